#pragma once

#include <utility>
#include <vector>

#include "mcnls/grid.hpp"

namespace mcnls {

/// Knobs for the split-step evolution of iu_t + Delta u = mu |u|^{4/d} u.
struct SolverConfig {
    double mu = 1.0;   ///< +1 defocusing, -1 focusing, 0 for the free flow
    int dim = 1;
    double dt = 1e-3;
    enum class DtPolicy { fixed, adaptive } dt_policy = DtPolicy::fixed;
    double adaptive_cap = 0.1;   ///< dt <= cap * N(t)^{-2} under the adaptive policy
    double store_every = 1e-2;   ///< snapshot cadence (<= dt stores every step)
    long max_steps = 100'000'000;
    double scale_eta_ref = 0.1;  ///< eta used for the concentration scale N(t)
};

/// Time-ordered snapshots of one numerical solution.
struct Trajectory {
    SolverConfig config;
    std::vector<double> times;
    std::vector<Field> fields;
    bool diverged = false;
    double boundary_mass_max = 0.0;
    double mass_drift = 0.0;  ///< max_t |M(u(t)) - M(u(t0))| / M(u(t0))

    std::size_t index_of_time(double t) const;  ///< snapshot lookup, throws if absent
};

/// e^{it Delta} f: multiply the spectrum by e^{-i t |xi|^2}.
Field free_propagate(const Field& f, double t);

/// Snapshots of the free flow e^{i(t-t0)Delta} f at cadence dt_store
/// (one spectral multiplication per snapshot, no time stepping).
Trajectory free_trajectory(const Field& f, std::pair<double, double> t_span, double dt_store);

/// Strang split-step integration over t_span = (t0, t1).  t1 < t0 runs the
/// time-reversed flow (conjugate-forward evolution of the conjugate data).
/// Divergence (non-finite samples, or concentration scale beyond the Nyquist
/// guard n pi/(8L)) truncates the trajectory and sets the flag, it does not
/// throw.
Trajectory evolve(const Field& u0, std::pair<double, double> t_span, const SolverConfig& config);

/// (integral_I integral |u|^p dx dt)^{1/p} by trapezoid over the snapshots.
double spacetime_lp_norm(const Trajectory& u, double p);

/// S(u) = integral of |u|^{2(d+2)/d} over space-time (the norm raised to p).
double scattering_size(const Trajectory& u);
double scattering_size_before(const Trajectory& u, double t);
double scattering_size_after(const Trajectory& u, double t);

struct ResidualReport {
    double duhamel_l2 = 0.0;
    double pde_dual_norm = 0.0;  ///< L^{2(d+2)/(d+4)}_{t,x} norm of iu_t + Delta u - F(u)
    std::pair<double, double> interval{0.0, 0.0};
};

/// Defect of u(t1) = e^{i(t1-t0)Delta} u(t0) - i int e^{i(t1-t)Delta} F(u) dt
/// measured from the stored snapshots (trapezoid in t), plus the dual-norm
/// defect of the equation itself (midpoint finite differences in t).
ResidualReport duhamel_residual(const Trajectory& u, double t0, double t1);

/// L^{2(d+2)/(d+4)}_{t,x} norm of (i d/dt + Delta) u - (subtract_nonlinearity ?
/// F(u) : 0), midpoint rule between consecutive snapshots.
double pde_defect_dual_norm(const Trajectory& u, bool subtract_nonlinearity,
                            std::size_t i0, std::size_t i1);

/// v(t,x) = |t|^{-d/2} e^{i|x|^2/4t} u(-1/t, x/t) applied snapshot-wise.
/// The source interval must not contain or touch t = 0.
Trajectory pseudoconformal(const Trajectory& u);

struct StabilityReport {
    double S_diff = 0.0;     ///< S(u - v) over the common interval
    double delta = 0.0;
    bool diverged = false;
    bool passed = false;     ///< v stayed finite over the whole interval
};

/// Evolve v from v0 over u's interval with u's solver settings and report the
/// scattering size of the difference.
StabilityReport stability_experiment(const Trajectory& u, const Field& v0, double delta);

struct BlowupSample {
    double t = 0.0;
    double concentration_scale = 0.0;  ///< N(t), dyadic
    double max_amplitude = 0.0;
    double mass_in_ball = 0.0;         ///< mass within radius r of x(t)
    std::array<double, 2> x_center{0.0, 0.0};
    std::array<double, 2> xi_center{0.0, 0.0};
};

/// Per-snapshot concentration series; near-zero snapshots report the floor
/// scale dxi and an origin center.
std::vector<BlowupSample> blowup_monitor(const Trajectory& u, double ball_radius);

/// Nyquist guard threshold n pi / (8 L).
double nyquist_guard(const Grid& g);

}  // namespace mcnls
