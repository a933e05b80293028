#include "mcnls/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mcnls/diagnostics.hpp"

namespace mcnls {

namespace {

constexpr double kZeroMass = 1e-12;
constexpr double kMinStep = 1e-10;

inline double nl_power(const cplx& z, int d) {
    // |z|^{4/d} without pow(): d=1 -> |z|^4, d=2 -> |z|^2
    const double m = std::norm(z);
    return d == 1 ? m * m : m;
}

void apply_kinetic(const Grid& g, std::vector<cplx>& v, const std::vector<cplx>& mult) {
    g.fft(v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mult[i];
    g.ifft(v);
}

std::vector<double> freq_sq_table(const Grid& g) {
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto xi = g.freq_point(i);
        w[i] = xi[0] * xi[0] + xi[1] * xi[1];
    }
    return w;
}

std::vector<cplx> kinetic_multiplier(const std::vector<double>& xi2, double t) {
    std::vector<cplx> m(xi2.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::polar(1.0, -t * xi2[i]);
    return m;
}

bool finite_values(const std::vector<cplx>& v) {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

// Concentration scale with the near-zero floor convention.
double guarded_scale(const Field& f, double eta_ref, double m) {
    if (m < kZeroMass) return f.grid->dxi();
    return concentration_scale(f, eta_ref);
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y,
                 std::size_t i0, std::size_t i1) {
    double acc = 0.0;
    for (std::size_t k = i0; k + 1 <= i1; ++k)
        acc += 0.5 * (t[k + 1] - t[k]) * (y[k] + y[k + 1]);
    return acc;
}

std::vector<double> lp_power_series(const Trajectory& u, double p) {
    std::vector<double> y(u.fields.size());
    const double w = u.fields.empty() ? 0.0 : u.fields.front().grid->cell_volume();
    for (std::size_t k = 0; k < u.fields.size(); ++k) {
        double acc = 0.0;
        for (const auto& z : u.fields[k].values) acc += std::pow(std::abs(z), p);
        y[k] = acc * w;
    }
    return y;
}

}  // namespace

std::size_t Trajectory::index_of_time(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t - 1e-9);
    if (it != times.end() && std::abs(*it - t) <= 1e-9 * (1.0 + std::abs(t)) + 1e-12)
        return static_cast<std::size_t>(it - times.begin());
    throw std::invalid_argument("Trajectory: no snapshot at requested time");
}

double nyquist_guard(const Grid& g) { return g.nyquist() / 4.0; }

Field free_propagate(const Field& f, double t) {
    Field out = f;
    const Grid& g = *f.grid;
    g.fft(out.values);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        auto xi = g.freq_point(i);
        out.values[i] *= std::polar(1.0, -t * (xi[0] * xi[0] + xi[1] * xi[1]));
    }
    g.ifft(out.values);
    return out;
}

Trajectory free_trajectory(const Field& f, std::pair<double, double> t_span, double dt_store) {
    const auto [t0, t1] = t_span;
    if (!(dt_store > 0.0) || t1 <= t0)
        throw std::invalid_argument("free_trajectory: need t1 > t0 and dt_store > 0");
    const Grid& g = *f.grid;
    const auto xi2 = freq_sq_table(g);
    std::vector<cplx> base = f.values;
    g.fft(base);

    Trajectory traj;
    traj.config.mu = 0.0;
    traj.config.dim = g.dim();
    traj.config.dt = dt_store;
    traj.config.store_every = dt_store;

    const long n_steps = std::max<long>(1, static_cast<long>(std::ceil((t1 - t0) / dt_store - 1e-9)));
    for (long k = 0; k <= n_steps; ++k) {
        const double t = (k == n_steps) ? t1 : t0 + k * ((t1 - t0) / n_steps);
        Field snap = make_field(f.grid, f.label);
        snap.values = base;
        const double lag = t - t0;
        for (std::size_t i = 0; i < snap.values.size(); ++i)
            snap.values[i] *= std::polar(1.0, -lag * xi2[i]);
        g.ifft(snap.values);
        traj.times.push_back(t);
        traj.boundary_mass_max = std::max(traj.boundary_mass_max, boundary_mass_fraction(snap));
        traj.fields.push_back(std::move(snap));
    }
    return traj;
}

Trajectory evolve(const Field& u0, std::pair<double, double> t_span, const SolverConfig& config) {
    const auto [t0, t1] = t_span;
    if (!std::isfinite(t0) || !std::isfinite(t1))
        throw std::invalid_argument("evolve: non-finite time span");
    if (config.dt <= 0.0 || config.max_steps < 1)
        throw std::invalid_argument("evolve: dt must be positive, max_steps >= 1");
    if (config.dim != u0.grid->dim())
        throw std::invalid_argument("evolve: config dimension does not match grid");

    if (t1 < t0) {
        // Time reversal: conj(u(t0 - s)) solves the same equation forward in s.
        Field v0 = u0;
        for (auto& z : v0.values) z = std::conj(z);
        Trajectory back = evolve(v0, {0.0, t0 - t1}, config);
        Trajectory out;
        out.config = config;
        out.diverged = back.diverged;
        out.boundary_mass_max = back.boundary_mass_max;
        out.mass_drift = back.mass_drift;
        for (std::size_t k = back.times.size(); k-- > 0;) {
            out.times.push_back(t0 - back.times[k]);
            Field f = back.fields[k];
            for (auto& z : f.values) z = std::conj(z);
            out.fields.push_back(std::move(f));
        }
        return out;
    }

    const Grid& g = *u0.grid;
    const int d = g.dim();
    const auto xi2 = freq_sq_table(g);
    const double guard = nyquist_guard(g);
    const double store_every = config.store_every > 0.0 ? config.store_every : config.dt;

    Trajectory traj;
    traj.config = config;

    std::vector<cplx> state = u0.values;
    double mass0 = -1.0;
    long steps_taken = 0;

    auto push_snapshot = [&](double t) -> bool {
        // returns false when evolution must stop
        if (!finite_values(state)) {
            traj.diverged = true;
            return false;
        }
        Field f = make_field(u0.grid, u0.label);
        f.values = state;
        const double m = mass(f);
        if (mass0 < 0.0) mass0 = m;
        if (mass0 > kZeroMass)
            traj.mass_drift = std::max(traj.mass_drift, std::abs(m - mass0) / mass0);
        traj.boundary_mass_max = std::max(traj.boundary_mass_max, boundary_mass_fraction(f));
        const double N = guarded_scale(f, config.scale_eta_ref, m);
        traj.times.push_back(t);
        traj.fields.push_back(std::move(f));
        if (N >= guard) {
            traj.diverged = true;
            return false;
        }
        return true;
    };

    if (!push_snapshot(t0)) return traj;
    if (t1 == t0) return traj;

    double dt_current = config.dt;
    double cached_half = -1.0;
    std::vector<cplx> half_kinetic;

    long n_segments = static_cast<long>(std::ceil((t1 - t0) / store_every - 1e-9));
    n_segments = std::max<long>(n_segments, 1);
    for (long seg = 0; seg < n_segments; ++seg) {
        const double ta = t0 + seg * store_every;
        const double tb = (seg + 1 == n_segments) ? t1 : t0 + (seg + 1) * store_every;

        if (config.dt_policy == SolverConfig::DtPolicy::adaptive) {
            Field cur = make_field(u0.grid);
            cur.values = state;
            const double m = mass(cur);
            const double N = guarded_scale(cur, config.scale_eta_ref, m);
            dt_current = std::min(dt_current, config.adaptive_cap / (N * N));
            if (dt_current < kMinStep) {
                traj.diverged = true;
                break;
            }
        }

        const long m_steps = std::max<long>(1, static_cast<long>(std::ceil((tb - ta) / dt_current - 1e-9)));
        const double dt_seg = (tb - ta) / m_steps;
        if (dt_seg * 0.5 != cached_half) {
            cached_half = dt_seg * 0.5;
            half_kinetic = kinetic_multiplier(xi2, cached_half);
        }
        bool alive = true;
        for (long s = 0; s < m_steps; ++s) {
            apply_kinetic(g, state, half_kinetic);
            for (auto& z : state)
                z *= std::polar(1.0, -config.mu * nl_power(z, d) * dt_seg);
            apply_kinetic(g, state, half_kinetic);
            if (++steps_taken >= config.max_steps && !(seg + 1 == n_segments && s + 1 == m_steps)) {
                traj.diverged = true;
                alive = false;
                break;
            }
        }
        if (!alive) break;
        if (!push_snapshot(tb)) break;
    }
    return traj;
}

double spacetime_lp_norm(const Trajectory& u, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("spacetime_lp_norm: p must be >= 1");
    if (u.times.size() < 2) throw std::invalid_argument("spacetime_lp_norm: need >= 2 snapshots");
    auto y = lp_power_series(u, p);
    return std::pow(trapezoid(u.times, y, 0, u.times.size() - 1), 1.0 / p);
}

static double strichartz_exponent(const Trajectory& u) {
    const int d = u.fields.empty() ? 1 : u.fields.front().grid->dim();
    return 2.0 * (d + 2.0) / d;
}

double scattering_size(const Trajectory& u) {
    if (u.times.size() < 2) return 0.0;
    auto y = lp_power_series(u, strichartz_exponent(u));
    return trapezoid(u.times, y, 0, u.times.size() - 1);
}

double scattering_size_before(const Trajectory& u, double t) {
    auto y = lp_power_series(u, strichartz_exponent(u));
    return trapezoid(u.times, y, 0, u.index_of_time(t));
}

double scattering_size_after(const Trajectory& u, double t) {
    auto y = lp_power_series(u, strichartz_exponent(u));
    return trapezoid(u.times, y, u.index_of_time(t), u.times.size() - 1);
}

double pde_defect_dual_norm(const Trajectory& u, bool subtract_nonlinearity,
                            std::size_t i0, std::size_t i1) {
    if (i1 <= i0 || i1 >= u.times.size())
        throw std::invalid_argument("pde_defect_dual_norm: bad snapshot range");
    const Grid& g = *u.fields.front().grid;
    const int d = g.dim();
    const double r = 2.0 * (d + 2.0) / (d + 4.0);
    const auto xi2 = freq_sq_table(g);
    const double mu = u.config.mu;

    double acc = 0.0;
    for (std::size_t k = i0; k < i1; ++k) {
        const double dt = u.times[k + 1] - u.times[k];
        const auto& a = u.fields[k].values;
        const auto& b = u.fields[k + 1].values;
        std::vector<cplx> mid(a.size()), defect(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
        std::vector<cplx> lap = mid;
        g.fft(lap);
        for (std::size_t i = 0; i < lap.size(); ++i) lap[i] *= -xi2[i];
        g.ifft(lap);
        const cplx iu{0.0, 1.0};
        for (std::size_t i = 0; i < a.size(); ++i) {
            cplx v = iu * (b[i] - a[i]) / dt + lap[i];
            if (subtract_nonlinearity) v -= mu * nl_power(mid[i], d) * mid[i];
            defect[i] = v;
        }
        double cell = 0.0;
        for (const auto& z : defect) cell += std::pow(std::abs(z), r);
        acc += dt * cell * g.cell_volume();
    }
    return std::pow(acc, 1.0 / r);
}

ResidualReport duhamel_residual(const Trajectory& u, double t0, double t1) {
    const std::size_t i0 = u.index_of_time(t0);
    const std::size_t i1 = u.index_of_time(t1);
    if (i1 <= i0) throw std::invalid_argument("duhamel_residual: need t1 > t0");
    const Grid& g = *u.fields.front().grid;
    const int d = g.dim();
    const auto xi2 = freq_sq_table(g);
    const double mu = u.config.mu;

    // Accumulate everything as spectra at time t1.
    std::vector<cplx> acc(g.size(), cplx{0.0, 0.0});
    for (std::size_t k = i0; k <= i1; ++k) {
        const auto& v = u.fields[k].values;
        std::vector<cplx> fu(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            fu[i] = mu * nl_power(v[i], d) * v[i];
        g.fft(fu);
        double w;
        if (k == i0)
            w = 0.5 * (u.times[k + 1] - u.times[k]);
        else if (k == i1)
            w = 0.5 * (u.times[k] - u.times[k - 1]);
        else
            w = 0.5 * (u.times[k + 1] - u.times[k - 1]);
        const double lag = t1 - u.times[k];
        for (std::size_t i = 0; i < fu.size(); ++i)
            acc[i] += w * fu[i] * std::polar(1.0, -lag * xi2[i]);
    }
    std::vector<cplx> residual = u.fields[i1].values;
    g.fft(residual);
    std::vector<cplx> start = u.fields[i0].values;
    g.fft(start);
    const cplx iu{0.0, 1.0};
    for (std::size_t i = 0; i < residual.size(); ++i)
        residual[i] += -std::polar(1.0, -(t1 - t0) * xi2[i]) * start[i] + iu * acc[i];

    double l2sq = 0.0;
    for (const auto& z : residual) l2sq += std::norm(z);
    // Plancherel for the raw DFT: sum|F|^2 = n^d sum|f|^2
    l2sq *= g.cell_volume() / static_cast<double>(g.size());

    ResidualReport rep;
    rep.duhamel_l2 = std::sqrt(l2sq);
    rep.pde_dual_norm = pde_defect_dual_norm(u, true, i0, i1);
    rep.interval = {t0, t1};
    return rep;
}

Trajectory pseudoconformal(const Trajectory& u) {
    if (u.times.size() < 1) throw std::invalid_argument("pseudoconformal: empty trajectory");
    const double lo = u.times.front(), hi = u.times.back();
    if (lo <= 0.0 && hi >= 0.0)
        throw std::invalid_argument("pseudoconformal: interval must not contain t = 0");
    if (std::min(std::abs(lo), std::abs(hi)) < 1e-9)
        throw std::invalid_argument("pseudoconformal: interval touches t = 0");

    const Grid& g = *u.fields.front().grid;
    const int d = g.dim();
    Trajectory out;
    out.config = u.config;
    out.diverged = u.diverged;
    double m0 = -1.0;
    for (std::size_t k = 0; k < u.times.size(); ++k) {
        const double s = u.times[k];
        double fr = 0.0;
        // u(s, -s x) = u(s, x / (-1/s))
        Field w = dilate(u.fields[k], -1.0 / s, &fr);
        const double amp = std::pow(std::abs(s), 0.5 * d);
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            auto x = g.point(i);
            const double x2 = x[0] * x[0] + x[1] * x[1];
            w.values[i] *= amp * std::polar(1.0, -s * x2 / 4.0);
        }
        if (fr > 1e-6) w.diverged = true;
        out.diverged = out.diverged || w.diverged;
        out.times.push_back(-1.0 / s);
        const double m = mass(w);
        if (m0 < 0.0) m0 = m;
        if (m0 > kZeroMass)
            out.mass_drift = std::max(out.mass_drift, std::abs(m - m0) / m0);
        out.boundary_mass_max = std::max(out.boundary_mass_max, boundary_mass_fraction(w));
        out.fields.push_back(std::move(w));
    }
    return out;
}

StabilityReport stability_experiment(const Trajectory& u, const Field& v0, double delta) {
    if (u.times.size() < 2)
        throw std::invalid_argument("stability_experiment: reference trajectory too short");
    Trajectory v = evolve(v0, {u.times.front(), u.times.back()}, u.config);

    StabilityReport rep;
    rep.delta = delta;
    rep.diverged = v.diverged;
    const std::size_t common = std::min(u.times.size(), v.times.size());
    if (common < 2) {
        rep.S_diff = std::numeric_limits<double>::infinity();
        return rep;
    }
    const int d = u.fields.front().grid->dim();
    const double p = 2.0 * (d + 2.0) / d;
    const double cell = u.fields.front().grid->cell_volume();
    std::vector<double> y(common);
    for (std::size_t k = 0; k < common; ++k) {
        double accp = 0.0;
        const auto& a = u.fields[k].values;
        const auto& b = v.fields[k].values;
        for (std::size_t i = 0; i < a.size(); ++i)
            accp += std::pow(std::abs(a[i] - b[i]), p);
        y[k] = accp * cell;
    }
    rep.S_diff = trapezoid(u.times, y, 0, common - 1);
    rep.passed = !v.diverged;
    return rep;
}

std::vector<BlowupSample> blowup_monitor(const Trajectory& u, double ball_radius) {
    std::vector<BlowupSample> series;
    series.reserve(u.times.size());
    for (std::size_t k = 0; k < u.times.size(); ++k) {
        const Field& f = u.fields[k];
        const Grid& g = *f.grid;
        BlowupSample s;
        s.t = u.times[k];
        const double m = mass(f);
        for (const auto& z : f.values)
            s.max_amplitude = std::max(s.max_amplitude, std::abs(z));
        if (m < kZeroMass) {
            s.concentration_scale = g.dxi();
            s.mass_in_ball = 0.0;
        } else {
            auto c = centers(f);
            s.x_center = c.first;
            s.xi_center = c.second;
            s.concentration_scale = concentration_scale(f, u.config.scale_eta_ref);
            double acc = 0.0;
            for (std::size_t i = 0; i < f.values.size(); ++i) {
                auto x = g.point(i);
                const double dx0 = x[0] - s.x_center[0];
                const double dx1 = x[1] - s.x_center[1];
                if (dx0 * dx0 + dx1 * dx1 <= ball_radius * ball_radius)
                    acc += std::norm(f.values[i]);
            }
            s.mass_in_ball = acc * g.cell_volume();
        }
        series.push_back(s);
    }
    return series;
}

}  // namespace mcnls
