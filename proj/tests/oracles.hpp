#pragma once

// Closed-form references and generators shared by the test suites.  Everything
// here is computed from formulas or brute-force quadrature, independent of the
// library's transform/solver paths it is used to check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mcnls/grid.hpp"

namespace oracles {

using mcnls::cplx;

// Unique positive even solution of Q'' + Q^5 = Q.
inline double q1d(double x) {
    return std::pow(3.0, 0.25) * std::sqrt(1.0 / std::cosh(2.0 * x));
}

// integral of q1d^2 over the line.
inline double q1d_mass() { return std::sqrt(3.0) * std::numbers::pi / 2.0; }

// transform of e^{-x^2} under f_hat(xi) = int e^{-ix xi} f dx.
inline double gaussian_ft(double xi) {
    return std::sqrt(std::numbers::pi) * std::exp(-xi * xi / 4.0);
}

// free flow of e^{-x^2}.
inline cplx gaussian_free(double x, double t) {
    const cplx denom{1.0, 4.0 * t};
    return std::exp(-x * x / denom) / std::sqrt(denom);
}

inline double l2_diff(const mcnls::Field& a, const mcnls::Field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        acc += std::norm(a.values[i] - b.values[i]);
    return std::sqrt(acc * a.grid->cell_volume());
}

inline double rel_err(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

// Band-limited random field, unit mass.
inline mcnls::Field random_field(const mcnls::GridPtr& g, std::mt19937_64& rng,
                                 double bandwidth = 4.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    mcnls::Spectrum s{g, std::vector<cplx>(g->size())};
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        auto xi = g->freq_point(i);
        const double r2 = (xi[0] * xi[0] + xi[1] * xi[1]) / (bandwidth * bandwidth);
        s.coeffs[i] = std::polar(std::exp(-r2) * unit(rng),
                                 2.0 * std::numbers::pi * unit(rng));
    }
    mcnls::Field f = mcnls::inverse_fourier(s);
    const double m = mcnls::mass(f);
    const double sc = 1.0 / std::sqrt(m);
    for (auto& z : f.values) z *= sc;
    return f;
}

// Random field confined to the inner box (group actions assume the support
// stays away from the seam).
inline mcnls::Field random_localized_field(const mcnls::GridPtr& g, std::mt19937_64& rng,
                                           double bandwidth = 3.0, double envelope = 3.0) {
    mcnls::Field f = random_field(g, rng, bandwidth);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        auto x = g->point(i);
        f.values[i] *= std::exp(-(x[0] * x[0] + x[1] * x[1]) / (envelope * envelope));
    }
    const double m = mcnls::mass(f);
    const double sc = 1.0 / std::sqrt(m);
    for (auto& z : f.values) z *= sc;
    return f;
}

inline mcnls::Field gaussian(const mcnls::GridPtr& g, double width = 1.0,
                             double amplitude = 1.0) {
    return mcnls::sample(g, [width, amplitude](std::array<double, 2> x) {
        return cplx{amplitude * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (width * width)),
                    0.0};
    });
}

}  // namespace oracles
