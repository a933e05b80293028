#include "mcnls/symmetry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcnls {

double wrap_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) t += two_pi;
    if (t == two_pi) t = 0.0;
    return t;
}

GroupElement identity_element() { return {}; }
GroupElement phase_element(double theta) { return {wrap_angle(theta), {0, 0}, {0, 0}, 1.0}; }
GroupElement modulation_element(const Vec& xi0) { return {0.0, xi0, {0, 0}, 1.0}; }
GroupElement translation_element(const Vec& x0) { return {0.0, {0, 0}, x0, 1.0}; }
GroupElement dilation_element(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("dilation_element: lambda must be positive");
    return {0.0, {0, 0}, {0, 0}, lambda};
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
    GroupElement g;
    g.theta = wrap_angle(a.theta + b.theta - dot(a.x0, b.xi0) / a.lambda);
    g.xi0 = a.xi0 + (1.0 / a.lambda) * b.xi0;
    g.x0 = a.x0 + a.lambda * b.x0;
    g.lambda = a.lambda * b.lambda;
    return g;
}

GroupElement inverse(const GroupElement& g) {
    GroupElement inv;
    inv.theta = wrap_angle(-g.theta - dot(g.x0, g.xi0));
    inv.xi0 = (-g.lambda) * g.xi0;
    inv.x0 = (-1.0 / g.lambda) * g.x0;
    inv.lambda = 1.0 / g.lambda;
    return inv;
}

namespace {

void spectral_translate(Field& f, const Vec& x0) {
    const Grid& g = *f.grid;
    std::vector<cplx>& v = f.values;
    g.fft(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto xi = g.freq_point(i);
        v[i] *= std::polar(1.0, -(x0[0] * xi[0] + x0[1] * xi[1]));
    }
    g.ifft(v);
}

}  // namespace

Field apply(const GroupElement& g, const Field& f) {
    if (!(g.lambda > 0.0) || !std::isfinite(g.lambda))
        throw std::invalid_argument("apply: lambda must be positive and finite");
    const Grid& grid = *f.grid;
    const int d = grid.dim();

    Field out = f;
    double aliased_total = 0.0;
    double remaining = g.lambda;
    while (remaining != 1.0) {
        double stage = std::clamp(remaining, kDilationStageMin, kDilationStageMax);
        double fr = 0.0;
        out = dilate(out, stage, &fr);
        aliased_total += fr;
        const double amp = std::pow(stage, -0.5 * d);
        for (auto& z : out.values) z *= amp;
        remaining /= stage;
        if (std::abs(remaining - 1.0) < 1e-15) remaining = 1.0;
    }

    if (g.x0[0] != 0.0 || g.x0[1] != 0.0) spectral_translate(out, g.x0);

    const bool modulate = g.xi0[0] != 0.0 || g.xi0[1] != 0.0;
    if (modulate || g.theta != 0.0) {
        for (std::size_t i = 0; i < out.values.size(); ++i) {
            auto x = grid.point(i);
            out.values[i] *= std::polar(1.0, g.theta + x[0] * g.xi0[0] + x[1] * g.xi0[1]);
        }
    }
    if (aliased_total > kAliasTolerance) out.diverged = true;
    return out;
}

Field apply_enlarged(const EnlargedElement& g, const Field& f) {
    return apply(g.base, free_propagate(f, g.t0));
}

Field apply_enlarged_inverse(const EnlargedElement& g, const Field& f) {
    return free_propagate(apply(inverse(g.base), f), -g.t0);
}

double separation(const EnlargedElement& a, const EnlargedElement& b) {
    const double la = a.base.lambda, lb = b.base.lambda;
    return la / lb + lb / la + std::abs(a.t0 * la * la - b.t0 * lb * lb) +
           norm2(a.base.xi0 - b.base.xi0) + norm2(a.base.x0 - b.base.x0);
}

Trajectory apply_trajectory(const GroupElement& g, const Trajectory& u) {
    Trajectory out;
    out.config = u.config;
    out.diverged = u.diverged;
    const double l2 = g.lambda * g.lambda;
    const double speed2 = dot(g.xi0, g.xi0);
    out.times.reserve(u.times.size());
    out.fields.reserve(u.fields.size());
    double m0 = -1.0;
    for (std::size_t k = 0; k < u.times.size(); ++k) {
        const double t = l2 * u.times[k];
        GroupElement gt = g;
        gt.theta = wrap_angle(g.theta - t * speed2);
        gt.x0 = g.x0 + (2.0 * t) * g.xi0;
        Field v = apply(gt, u.fields[k]);
        out.times.push_back(t);
        out.boundary_mass_max = std::max(out.boundary_mass_max, boundary_mass_fraction(v));
        const double m = mass(v);
        if (m0 < 0.0) m0 = m;
        if (m0 > 0.0)
            out.mass_drift = std::max(out.mass_drift, std::abs(m - m0) / m0);
        out.fields.push_back(std::move(v));
    }
    return out;
}

}  // namespace mcnls
