#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mcnls/grid.hpp"
#include "mcnls/propagator.hpp"
#include "oracles.hpp"

using namespace mcnls;

TEST_CASE("grid construction and derived quantities") {
    GridPtr g = Grid::make(1, 256, 16.0);
    CHECK(g->spacing() == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(g->dxi() == doctest::Approx(0.19634954084936207).epsilon(1e-14));
    CHECK(g->spacing() * g->n() == 32.0);  // h n = 2L exactly

    GridPtr g2 = Grid::make(2, 64, 8.0);
    CHECK(g2->size() == 4096);

    CHECK_THROWS_AS(Grid::make(1, 100, 16.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make(1, 4, 16.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make(3, 64, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make(1, 64, -1.0), std::invalid_argument);
}

TEST_CASE("frequency lattice is symmetric up to the unpaired mode") {
    GridPtr g = Grid::make(1, 64, 8.0);
    for (int k = 1; k < g->n() / 2; ++k)
        CHECK(g->freq(k) == -g->freq(g->n() - k));
    CHECK(g->freq(g->n() / 2) == -g->nyquist());
}

TEST_CASE("fourier of a lattice exponential concentrates at its node") {
    GridPtr g = Grid::make(1, 256, 16.0);
    const int k = 37;
    const double xi_k = k * g->dxi();
    Field f = sample(g, [xi_k](std::array<double, 2> x) { return std::polar(1.0, x[0] * xi_k); });
    Spectrum s = fourier(f);
    const double peak = std::abs(s.coeffs[k]);
    CHECK(peak == doctest::Approx(2.0 * g->box_halfwidth()).epsilon(1e-12));
    for (int j = 0; j < g->n(); ++j) {
        if (j == k) continue;
        CHECK(std::abs(s.coeffs[j]) < 1e-12 * peak);
    }
}

TEST_CASE("fourier matches the closed-form Gaussian transform") {
    GridPtr g = Grid::make(1, 256, 16.0);
    Field f = oracles::gaussian(g);
    Spectrum s = fourier(f);
    // relative comparison where the transform sits above the roundoff floor
    double worst = 0.0;
    for (int k = 0; k < g->n(); ++k) {
        const double ref = oracles::gaussian_ft(g->freq(k));
        if (ref < 1e-6) continue;
        worst = std::max(worst, std::abs(std::abs(s.coeffs[k]) - ref) / ref);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("round trip and Plancherel over random fields") {
    GridPtr g = Grid::make(1, 128, 12.0);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        Field f = oracles::random_field(g, rng);
        Field back = inverse_fourier(fourier(f));
        CHECK(oracles::l2_diff(back, f) < 1e-12);
        Spectrum s = fourier(f);
        CHECK(oracles::rel_err(spectral_mass(s), mass(f)) < 1e-10);
    }
}

TEST_CASE("Parseval for inner products in both representations") {
    GridPtr g = Grid::make(1, 128, 12.0);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        Field f = oracles::random_field(g, rng);
        Field h = oracles::random_field(g, rng);
        Spectrum sf = fourier(f), sh = fourier(h);
        cplx phys = inner(f, h);
        cplx freq{0.0, 0.0};
        for (std::size_t i = 0; i < sf.coeffs.size(); ++i)
            freq += sf.coeffs[i] * std::conj(sh.coeffs[i]);
        freq *= g->freq_cell_volume() / (2.0 * std::numbers::pi);
        CHECK(std::abs(phys - freq) < 1e-10 * std::abs(phys) + 1e-14);
    }
}

TEST_CASE("mass: zero field, quadrature oracle, homogeneity") {
    GridPtr g = Grid::make(1, 256, 16.0);
    CHECK(mass(make_field(g)) == 0.0);

    // mass(e^{-x^2/2}) = int e^{-x^2} = sqrt(pi)
    Field f = sample(g, [](std::array<double, 2> x) {
        return cplx{std::exp(-0.5 * x[0] * x[0]), 0.0};
    });
    CHECK(oracles::rel_err(mass(f), std::sqrt(std::numbers::pi)) < 1e-10);

    const cplx c{0.7, -1.3};
    Field cf = f;
    for (auto& z : cf.values) z *= c;
    CHECK(oracles::rel_err(mass(cf), std::norm(c) * mass(f)) < 1e-14);
}

TEST_CASE("inner product and lp norms") {
    GridPtr g = Grid::make(1, 128, 16.0);
    std::mt19937_64 rng(3);
    Field f = oracles::random_field(g, rng);
    CHECK(std::abs(inner(f, f) - mass(f)) < 1e-14 * mass(f));

    // conjugate linearity in the second slot
    Field h = oracles::random_field(g, rng);
    const cplx c{0.3, 0.9};
    Field ch = h;
    for (auto& z : ch.values) z *= c;
    CHECK(std::abs(inner(f, ch) - std::conj(c) * inner(f, h)) < 1e-12);

    // single occupied cell of height 1: ||f||_p = h^{d/p}
    Field cell = make_field(g);
    cell.values[10] = 1.0;
    for (double p : {1.0, 2.0, 3.0, 6.0})
        CHECK(oracles::rel_err(lp_norm(cell, p), std::pow(g->spacing(), 1.0 / p)) < 1e-13);

    CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("translation by whole cells commutes with mass exactly") {
    GridPtr g = Grid::make(1, 128, 16.0);
    std::mt19937_64 rng(4);
    Field f = oracles::random_field(g, rng);
    const double m0 = mass(f);
    Field t = translate_cells(f, {17, 0});
    CHECK(mass(t) == m0);  // bit-for-bit: the sum has the same terms

    GridPtr g2 = Grid::make(2, 32, 16.0);
    Field f2 = oracles::gaussian(g2);
    CHECK(mass(translate_cells(f2, {5, -9})) == mass(f2));
}

TEST_CASE("boundary mass monitor") {
    GridPtr g = Grid::make(1, 256, 16.0);
    CHECK(boundary_mass_fraction(oracles::gaussian(g)) < 1e-20);
    Field edge = sample(g, [](std::array<double, 2> x) {
        return cplx{std::exp(-(x[0] - 12.0) * (x[0] - 12.0)), 0.0};
    });
    CHECK(boundary_mass_fraction(edge) > 0.99);
}

TEST_CASE("spacetime norm of a time-constant field reduces to the spatial norm") {
    GridPtr g = Grid::make(1, 128, 16.0);
    Field f = oracles::gaussian(g);
    Trajectory u;
    u.config.dim = 1;
    for (int k = 0; k <= 10; ++k) {
        u.times.push_back(0.1 * k);
        u.fields.push_back(f);
    }
    CHECK(oracles::rel_err(spacetime_lp_norm(u, 6.0), lp_norm(f, 6.0)) < 1e-12);
    CHECK_THROWS_AS(spacetime_lp_norm(u, 0.9), std::invalid_argument);
}

TEST_CASE("dilate: mass preservation and round trip both ways") {
    GridPtr g = Grid::make(1, 512, 16.0);
    Field f = oracles::gaussian(g);
    const double m0 = mass(f);
    for (double a : {2.0, 0.5, 1.7, 0.41, -1.0}) {
        Field d = dilate(f, a);
        CHECK(oracles::rel_err(mass(d), std::abs(a) * m0) < 1e-9);
        Field back = dilate(d, 1.0 / a);
        CHECK(oracles::l2_diff(back, f) < 1e-9);
    }
    CHECK_THROWS_AS(dilate(f, 0.0), std::invalid_argument);
}

TEST_CASE("dilate in two dimensions") {
    GridPtr g = Grid::make(2, 256, 16.0);
    Field f = oracles::gaussian(g);
    const double m0 = mass(f);
    for (double a : {2.0, 0.5}) {
        Field d = dilate(f, a);
        CHECK(oracles::rel_err(mass(d), a * a * m0) < 1e-9);
        Field exact = sample(g, [a](std::array<double, 2> x) {
            return cplx{std::exp(-(x[0] * x[0] + x[1] * x[1]) / (a * a)), 0.0};
        });
        CHECK(oracles::l2_diff(d, exact) < 1e-9);
    }
}
