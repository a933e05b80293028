#pragma once

#include <map>
#include <utility>
#include <vector>

#include "mcnls/grid.hpp"
#include "mcnls/propagator.hpp"

namespace mcnls {

/// Dyadic frequency cutoff.  Sharp multipliers are exact indicators; the
/// raised-cosine shape rolls off over one octave in log2|xi| so that the band
/// family below forms an exact partition of unity on the lattice.
struct LPProjector {
    enum class Shape { sharp, raised_cosine };
    enum class Kind { low, band, high };

    double cutoff = 1.0;  ///< dyadic scale N
    Shape shape = Shape::raised_cosine;
    Kind kind = Kind::band;

    double multiplier(double abs_xi) const;
};

LPProjector low_pass(double N, LPProjector::Shape shape = LPProjector::Shape::sharp);
LPProjector high_pass(double N, LPProjector::Shape shape = LPProjector::Shape::sharp);
LPProjector band_pass(double N, LPProjector::Shape shape = LPProjector::Shape::raised_cosine);

/// Multiply the spectrum by the cutoff and invert; never increases mass.
Field project(const Field& f, const LPProjector& p);

/// Dyadic ladder 2^k clamped to [dxi, nyquist] for this grid.
std::vector<double> dyadic_ladder(const Grid& g);

/// Band family whose multipliers sum to 1 at every lattice node: a low floor
/// at the bottom rung plus one band per rung up to past the lattice corner.
std::vector<LPProjector> lp_band_family(const Grid& g, LPProjector::Shape shape);

/// Coordinate-wise mass medians of |u|^2 and |u_hat|^2; ties break toward
/// the smaller coordinate.  Requires mass > 1e-12.
std::pair<Vec, Vec> centers(const Field& f);

/// Smallest dyadic N with spectral mass outside {|xi - xi_center| <= N} at
/// most eta_ref * M(f), clamped to [dxi, nyquist].
double concentration_scale(const Field& f, double eta_ref);

struct ConcentrationTrack {
    std::vector<double> times;
    std::vector<Vec> x_center;
    std::vector<Vec> xi_center;
    std::vector<double> scale;            ///< N(t)
    std::map<double, double> c_eta_table; ///< eta -> C(eta), joint over the track
};

/// Per-snapshot centers and scale, plus for each eta the smallest constant
/// C(eta) such that both concentration estimates
///   mass outside |x - x(t)| >= C/N(t)   <= eta * M
///   mass outside |xi - xi(t)| >= C N(t) <= eta * M
/// hold at every snapshot.
ConcentrationTrack concentration_profile(const Trajectory& u, const std::vector<double>& etas);

struct FrequencyLocalizationReport {
    double N_loc = 0.0;
    double low_mass = 0.0;   ///< ||P_{<= c N_loc} f||_2
    double high_mass = 0.0;  ///< ||P_{>= C N_loc} f||_2
    double band_mass = 0.0;  ///< ||P_{c N_loc < . < C N_loc} f||_2
    double eta = 0.0;
    bool localized = false;
};

FrequencyLocalizationReport frequency_localization_report(const Field& f, double eta,
                                                          double low_ratio = 1.0 / 16.0,
                                                          double high_ratio = 16.0);

/// ||u1 u2||_{L^q_{t,x}} / (N^{d-(d+2)/q} ||u1||_{S*} ||u2||_{S*}) where
/// ||u||_{S*} = ||u(t0)||_2 + ||(i d/dt + Delta) u||_{L^{2(d+2)/(d+4)}_{t,x}}.
/// Both trajectories must be frequency-supported in |xi| <= N with supports
/// separated by at least freq_gap (leakage beyond 1e-6 of mass throws).
double bilinear_ratio(const Trajectory& u1, const Trajectory& u2, double q, double N,
                      double freq_gap);

struct NegativeRegularityRow {
    double N = 0.0;
    double data_norm = 0.0;       ///< ||P_N u0||_2
    double spacetime_norm = 0.0;  ///< ||P_N u||_{L^{2(d+2)/d}_{t,x}}
    double bound_ratio = 0.0;     ///< spacetime_norm / (A N^s)
};

struct NegativeRegularityReport {
    std::vector<NegativeRegularityRow> table;
    double worst_ratio = 0.0;
    bool hypothesis_ok = false;   ///< ||P_N u0||_2 <= A N^s held on every rung
    double hypothesis_worst = 0.0;
    bool diverged = false;
};

/// Evolve u0 and tabulate the per-band spacetime norms against the dyadic
/// envelope A N^s of the data.  No universal constant is asserted; callers
/// compare worst_ratio across resolutions.
NegativeRegularityReport negative_regularity_check(
    const Field& u0, double A, double s, std::pair<double, double> t_span,
    const SolverConfig& config,
    LPProjector::Shape shape = LPProjector::Shape::raised_cosine);

/// L^{4d/(2d-1)}_x norm of |grad|^{-1/4} applied to the Galilean transform
/// of the slice: e^{i x.xi} e^{-i t |xi|^2} f(x - 2 t xi) with t the slice
/// time.  The |grad|^{-1/4} zero mode is set to 0.
double galilean_functional(const Field& f, const Vec& xi, double slice_time = 0.0);

}  // namespace mcnls
