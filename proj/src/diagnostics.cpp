#include "mcnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcnls {

namespace {

constexpr double kZeroMass = 1e-12;

// Raised-cosine low-pass shape: 1 below the cutoff, cos^2 rolloff over one
// octave, 0 beyond twice the cutoff.
double lowpass_shape(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * std::log2(r));
    return c * c;
}

}  // namespace

double LPProjector::multiplier(double abs_xi) const {
    double low;
    if (shape == Shape::sharp) {
        low = abs_xi <= cutoff ? 1.0 : 0.0;
    } else {
        low = lowpass_shape(abs_xi / cutoff);
    }
    switch (kind) {
        case Kind::low:
            return low;
        case Kind::high:
            return 1.0 - low;
        case Kind::band: {
            double low_half = shape == Shape::sharp ? (abs_xi <= 0.5 * cutoff ? 1.0 : 0.0)
                                                    : lowpass_shape(2.0 * abs_xi / cutoff);
            return low - low_half;
        }
    }
    return 0.0;
}

LPProjector low_pass(double N, LPProjector::Shape shape) {
    return {N, shape, LPProjector::Kind::low};
}
LPProjector high_pass(double N, LPProjector::Shape shape) {
    return {N, shape, LPProjector::Kind::high};
}
LPProjector band_pass(double N, LPProjector::Shape shape) {
    return {N, shape, LPProjector::Kind::band};
}

Field project(const Field& f, const LPProjector& p) {
    const Grid& g = *f.grid;
    Field out = f;
    g.fft(out.values);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        auto xi = g.freq_point(i);
        out.values[i] *= p.multiplier(std::hypot(xi[0], xi[1]));
    }
    g.ifft(out.values);
    return out;
}

std::vector<double> dyadic_ladder(const Grid& g) {
    std::vector<double> ladder;
    int k0 = static_cast<int>(std::ceil(std::log2(g.dxi()) - 1e-12));
    int k1 = static_cast<int>(std::floor(std::log2(g.nyquist()) + 1e-12));
    for (int k = k0; k <= k1; ++k) ladder.push_back(std::ldexp(1.0, k));
    return ladder;
}

std::vector<LPProjector> lp_band_family(const Grid& g, LPProjector::Shape shape) {
    auto ladder = dyadic_ladder(g);
    // Extend past the lattice corner so the top low-pass is identically one.
    const double corner = g.nyquist() * std::sqrt(static_cast<double>(g.dim()));
    double top = ladder.empty() ? g.nyquist() : ladder.back();
    while (top < 2.0 * corner) {
        top *= 2.0;
        ladder.push_back(top);
    }
    std::vector<LPProjector> family;
    family.push_back(low_pass(ladder.front(), shape));
    for (std::size_t i = 1; i < ladder.size(); ++i)
        family.push_back(band_pass(ladder[i], shape));
    return family;
}

namespace {

// Coordinate-wise mass median over one axis of a |.|^2 marginal.
double axis_median(const Grid& g, const std::vector<double>& cellmass, int axis, bool freq_side) {
    const int n = g.n();
    std::vector<double> marginal(n, 0.0);
    for (std::size_t i = 0; i < cellmass.size(); ++i) {
        auto ij = g.indices(i);
        marginal[axis == 0 ? ij[0] : ij[1]] += cellmass[i];
    }
    double total = 0.0;
    for (double m : marginal) total += m;
    // Walk the axis in coordinate order (frequency storage is split).
    double cum = 0.0;
    for (int pos = 0; pos < n; ++pos) {
        int storage = freq_side ? (pos - n / 2 + n) % n : pos;
        cum += marginal[storage];
        if (cum >= 0.5 * total) {
            return freq_side ? g.dxi() * (pos - n / 2) : g.coord(pos);
        }
    }
    return freq_side ? 0.0 : g.coord(n - 1);
}

std::vector<double> cell_masses(const std::vector<cplx>& v) {
    std::vector<double> m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m[i] = std::norm(v[i]);
    return m;
}

// Smallest radius r (a realized node distance) such that the mass strictly
// outside distance r is <= budget.
double capture_radius(const std::vector<double>& dist, const std::vector<double>& m,
                      double budget) {
    std::vector<std::size_t> order(dist.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    double total = 0.0;
    for (double x : m) total += x;
    double outside = total;
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
        outside -= m[order[idx]];
        const bool last_at_r =
            idx + 1 == order.size() || dist[order[idx + 1]] > dist[order[idx]];
        if (last_at_r && outside <= budget) return dist[order[idx]];
    }
    return dist.empty() ? 0.0 : dist[order.back()];
}

}  // namespace

std::pair<Vec, Vec> centers(const Field& f) {
    const double m = mass(f);
    if (m < kZeroMass)
        throw std::invalid_argument(
            "centers: mass below 1e-12; use the concentration-scale floor convention");
    const Grid& g = *f.grid;
    auto phys = cell_masses(f.values);
    Spectrum s = fourier(f);
    auto spec = cell_masses(s.coeffs);

    Vec xc{axis_median(g, phys, 0, false), 0.0};
    Vec kc{axis_median(g, spec, 0, true), 0.0};
    if (g.dim() == 2) {
        xc[1] = axis_median(g, phys, 1, false);
        kc[1] = axis_median(g, spec, 1, true);
    }
    return {xc, kc};
}

double concentration_scale(const Field& f, double eta_ref) {
    const double m = mass(f);
    if (m < kZeroMass)
        throw std::invalid_argument("concentration_scale: mass below 1e-12");
    if (!(eta_ref > 0.0) || !(eta_ref < 1.0))
        throw std::invalid_argument("concentration_scale: eta_ref must lie in (0,1)");

    const Grid& g = *f.grid;
    Spectrum s = fourier(f);
    auto spec = cell_masses(s.coeffs);
    Vec kc = centers(f).second;

    double total = 0.0;
    for (double x : spec) total += x;
    auto ladder = dyadic_ladder(g);
    for (double N : ladder) {
        double outside = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            auto xi = g.freq_point(i);
            const double d0 = xi[0] - kc[0], d1 = xi[1] - kc[1];
            if (d0 * d0 + d1 * d1 > N * N) outside += spec[i];
        }
        if (outside <= eta_ref * total) return N;
    }
    return ladder.back();
}

ConcentrationTrack concentration_profile(const Trajectory& u, const std::vector<double>& etas) {
    ConcentrationTrack track;
    if (u.fields.empty()) return track;
    const Grid& g = *u.fields.front().grid;
    const double eta_ref = u.config.scale_eta_ref;

    std::map<double, double> table;
    for (double eta : etas) table[eta] = 0.0;

    for (std::size_t k = 0; k < u.times.size(); ++k) {
        const Field& f = u.fields[k];
        auto c = centers(f);  // propagates the degenerate-input error
        const double N = concentration_scale(f, eta_ref);
        track.times.push_back(u.times[k]);
        track.x_center.push_back(c.first);
        track.xi_center.push_back(c.second);
        track.scale.push_back(N);

        const double m = mass(f);
        auto phys = cell_masses(f.values);
        Spectrum s = fourier(f);
        auto spec = cell_masses(s.coeffs);
        double spec_total = 0.0;
        for (double x : spec) spec_total += x;
        double phys_total = 0.0;
        for (double x : phys) phys_total += x;

        std::vector<double> dx(phys.size()), dxi(spec.size());
        for (std::size_t i = 0; i < phys.size(); ++i) {
            auto x = g.point(i);
            dx[i] = std::hypot(x[0] - c.first[0], x[1] - c.first[1]);
            auto xi = g.freq_point(i);
            dxi[i] = std::hypot(xi[0] - c.second[0], xi[1] - c.second[1]);
        }
        (void)m;
        for (auto& [eta, C] : table) {
            const double rx = capture_radius(dx, phys, eta * phys_total);
            const double rxi = capture_radius(dxi, spec, eta * spec_total);
            C = std::max({C, N * rx, rxi / N});
        }
    }
    track.c_eta_table = table;
    return track;
}

FrequencyLocalizationReport frequency_localization_report(const Field& f, double eta,
                                                          double low_ratio, double high_ratio) {
    const double m = mass(f);
    if (m < kZeroMass)
        throw std::invalid_argument("frequency_localization_report: mass below 1e-12");
    const Grid& g = *f.grid;
    FrequencyLocalizationReport rep;
    rep.eta = eta;
    rep.N_loc = concentration_scale(f, eta);

    Spectrum s = fourier(f);
    const double lo = low_ratio * rep.N_loc;
    const double hi = high_ratio * rep.N_loc;
    double mlow = 0.0, mhigh = 0.0, mband = 0.0;
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        auto xi = g.freq_point(i);
        const double r = std::hypot(xi[0], xi[1]);
        const double cell = std::norm(s.coeffs[i]);
        if (r <= lo)
            mlow += cell;
        else if (r >= hi)
            mhigh += cell;
        else
            mband += cell;
    }
    const double scale = g.freq_cell_volume() / std::pow(2.0 * std::numbers::pi, g.dim());
    rep.low_mass = std::sqrt(mlow * scale);
    rep.high_mass = std::sqrt(mhigh * scale);
    rep.band_mass = std::sqrt(mband * scale);
    const double l2 = std::sqrt(m);
    rep.localized = rep.low_mass <= eta * l2 && rep.high_mass <= eta * l2 &&
                    rep.band_mass >= 0.5 * l2;
    return rep;
}

namespace {

struct SupportBall {
    double center0 = 0.0, center1 = 0.0, radius = 0.0;
};

// Minimal ball around the spectral median holding all but 1e-6 of the mass,
// unioned over snapshots.
SupportBall frequency_support(const Trajectory& u) {
    SupportBall ball;
    const Grid& g = *u.fields.front().grid;
    Vec kc = centers(u.fields.front()).second;
    ball.center0 = kc[0];
    ball.center1 = kc[1];
    for (const Field& f : u.fields) {
        Spectrum s = fourier(f);
        auto spec = cell_masses(s.coeffs);
        std::vector<double> dist(spec.size());
        double total = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            auto xi = g.freq_point(i);
            dist[i] = std::hypot(xi[0] - ball.center0, xi[1] - ball.center1);
            total += spec[i];
        }
        ball.radius = std::max(ball.radius, capture_radius(dist, spec, 1e-6 * total));
    }
    return ball;
}

double trajectory_mass_beyond(const Trajectory& u, double N) {
    const Grid& g = *u.fields.front().grid;
    double worst = 0.0;
    for (const Field& f : u.fields) {
        Spectrum s = fourier(f);
        double beyond = 0.0, total = 0.0;
        for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
            auto xi = g.freq_point(i);
            const double cell = std::norm(s.coeffs[i]);
            total += cell;
            if (std::hypot(xi[0], xi[1]) > N) beyond += cell;
        }
        if (total > 0.0) worst = std::max(worst, beyond / total);
    }
    return worst;
}

}  // namespace

double bilinear_ratio(const Trajectory& u1, const Trajectory& u2, double q, double N,
                      double freq_gap) {
    if (u1.fields.empty() || u2.fields.empty())
        throw std::invalid_argument("bilinear_ratio: empty trajectory");
    const Grid& g = *u1.fields.front().grid;
    const int d = g.dim();
    if (!(q >= (d + 3.0) / (d + 1.0) - 1e-12))
        throw std::invalid_argument("bilinear_ratio: q must be at least (d+3)/(d+1)");
    if (u1.times.size() != u2.times.size())
        throw std::invalid_argument("bilinear_ratio: trajectories must share snapshot times");

    const double m2 = mass(u2.fields.front());
    if (m2 > kZeroMass) {  // support checks are vacuous against the zero solution
        if (trajectory_mass_beyond(u1, N) > 1e-6 || trajectory_mass_beyond(u2, N) > 1e-6)
            throw std::invalid_argument("bilinear_ratio: spectral leakage beyond |xi| <= N");
        SupportBall b1 = frequency_support(u1);
        SupportBall b2 = frequency_support(u2);
        const double dist = std::hypot(b1.center0 - b2.center0, b1.center1 - b2.center1) -
                            b1.radius - b2.radius;
        if (dist + 1e-9 < freq_gap)
            throw std::invalid_argument("bilinear_ratio: insufficient frequency separation");
    }

    std::vector<double> y(u1.times.size());
    const double cell = g.cell_volume();
    for (std::size_t k = 0; k < u1.times.size(); ++k) {
        double acc = 0.0;
        const auto& a = u1.fields[k].values;
        const auto& b = u2.fields[k].values;
        for (std::size_t i = 0; i < a.size(); ++i)
            acc += std::pow(std::abs(a[i] * b[i]), q);
        y[k] = acc * cell;
    }
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < u1.times.size(); ++k)
        integral += 0.5 * (u1.times[k + 1] - u1.times[k]) * (y[k] + y[k + 1]);
    const double product_norm = std::pow(integral, 1.0 / q);

    auto strong_norm = [](const Trajectory& u) {
        double n0 = std::sqrt(mass(u.fields.front()));
        return n0 + pde_defect_dual_norm(u, false, 0, u.times.size() - 1);
    };
    const double denom = std::pow(N, d - (d + 2.0) / q) * strong_norm(u1) * strong_norm(u2);
    return denom > 0.0 ? product_norm / denom : 0.0;
}

NegativeRegularityReport negative_regularity_check(const Field& u0, double A, double s,
                                                   std::pair<double, double> t_span,
                                                   const SolverConfig& config,
                                                   LPProjector::Shape shape) {
    if (!(A > 0.0)) throw std::invalid_argument("negative_regularity_check: A must be positive");
    const Grid& g = *u0.grid;
    NegativeRegularityReport rep;

    auto family = lp_band_family(g, shape);
    rep.hypothesis_worst = 0.0;
    std::vector<double> data_norms;
    for (const auto& p : family) {
        Field pf = project(u0, p);
        const double nrm = std::sqrt(mass(pf));
        data_norms.push_back(nrm);
        rep.hypothesis_worst =
            std::max(rep.hypothesis_worst, nrm / (A * std::pow(p.cutoff, s)));
    }
    rep.hypothesis_ok = rep.hypothesis_worst <= 1.0 + 1e-9;

    Trajectory u = evolve(u0, t_span, config);
    rep.diverged = u.diverged;
    const int d = g.dim();
    const double p_exp = 2.0 * (d + 2.0) / d;

    for (std::size_t bi = 0; bi < family.size(); ++bi) {
        Trajectory banded;
        banded.config = u.config;
        banded.times = u.times;
        for (const Field& f : u.fields) banded.fields.push_back(project(f, family[bi]));
        NegativeRegularityRow row;
        row.N = family[bi].cutoff;
        row.data_norm = data_norms[bi];
        row.spacetime_norm = u.times.size() >= 2 ? spacetime_lp_norm(banded, p_exp) : 0.0;
        row.bound_ratio = row.spacetime_norm / (A * std::pow(row.N, s));
        rep.worst_ratio = std::max(rep.worst_ratio, row.bound_ratio);
        rep.table.push_back(row);
    }
    return rep;
}

double galilean_functional(const Field& f, const Vec& xi, double slice_time) {
    const double m = mass(f);
    if (m < kZeroMass) return 0.0;
    const Grid& g = *f.grid;
    Field w = f;
    if (slice_time != 0.0 && (xi[0] != 0.0 || xi[1] != 0.0)) {
        // f(x - 2 t xi) via a spectral shift
        g.fft(w.values);
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            auto k = g.freq_point(i);
            w.values[i] *= std::polar(1.0, -2.0 * slice_time * (xi[0] * k[0] + xi[1] * k[1]));
        }
        g.ifft(w.values);
    }
    const double phase0 = -slice_time * dot(xi, xi);
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        auto x = g.point(i);
        w.values[i] *= std::polar(1.0, phase0 + x[0] * xi[0] + x[1] * xi[1]);
    }
    g.fft(w.values);
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        auto k = g.freq_point(i);
        const double r = std::hypot(k[0], k[1]);
        w.values[i] = r > 0.0 ? w.values[i] * std::pow(r, -0.25) : cplx{0.0, 0.0};
    }
    g.ifft(w.values);
    const int d = g.dim();
    return lp_norm(w, 4.0 * d / (2.0 * d - 1.0));
}

}  // namespace mcnls
