#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "mcnls/propagator.hpp"
#include "mcnls/symmetry.hpp"
#include "oracles.hpp"

using namespace mcnls;

namespace {

std::mt19937_64 rng(2024);

GroupElement random_element(double lam_spread = 1.0) {
    std::uniform_real_distribution<double> uang(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> upar(-3.0, 3.0);
    std::uniform_real_distribution<double> ulog(-lam_spread, lam_spread);
    return {uang(rng), {upar(rng), 0}, {upar(rng), 0}, std::exp2(ulog(rng))};
}

double angle_dist(double a, double b) {
    double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, 2.0 * std::numbers::pi - d);
}

double param_dist(const GroupElement& a, const GroupElement& b) {
    return std::max({angle_dist(a.theta, b.theta), std::abs(a.xi0[0] - b.xi0[0]),
                     std::abs(a.xi0[1] - b.xi0[1]), std::abs(a.x0[0] - b.x0[0]),
                     std::abs(a.x0[1] - b.x0[1]), std::abs(a.lambda - b.lambda)});
}

}  // namespace

TEST_CASE("group law: hand-computed composition") {
    // (0, xi=1, x=2, lam=2) * (0, xi'=3, x'=1, lam'=0.5)
    GroupElement a{0.0, {1.0, 0}, {2.0, 0}, 2.0};
    GroupElement b{0.0, {3.0, 0}, {1.0, 0}, 0.5};
    GroupElement c = compose(a, b);
    CHECK(c.theta == doctest::Approx(2.0 * std::numbers::pi - 3.0).epsilon(1e-12));
    CHECK(c.xi0[0] == doctest::Approx(2.5));
    CHECK(c.x0[0] == doctest::Approx(4.0));
    CHECK(c.lambda == doctest::Approx(1.0));
}

TEST_CASE("inverse: hand-computed parameters") {
    GroupElement g{1.0, {2.0, 0}, {3.0, 0}, 4.0};
    GroupElement inv = inverse(g);
    CHECK(inv.theta == doctest::Approx(-7.0 + 4.0 * std::numbers::pi).epsilon(1e-12));
    CHECK(inv.xi0[0] == doctest::Approx(-8.0));
    CHECK(inv.x0[0] == doctest::Approx(-0.75));
    CHECK(inv.lambda == doctest::Approx(0.25));
    CHECK(param_dist(inverse(identity_element()), identity_element()) == 0.0);
}

TEST_CASE("group axioms over random elements") {
    for (int i = 0; i < 200; ++i) {
        GroupElement a = random_element(), b = random_element(), c = random_element();
        CHECK(param_dist(compose(compose(a, b), c), compose(a, compose(b, c))) < 1e-12);
        CHECK(param_dist(compose(a, identity_element()), a) < 1e-15);
        CHECK(param_dist(compose(identity_element(), a), a) < 1e-15);
        CHECK(param_dist(compose(a, inverse(a)), identity_element()) < 1e-14);
        CHECK(param_dist(compose(inverse(a), compose(a, b)), b) < 1e-13);
    }
}

TEST_CASE("factorization phase*modulation*translation*dilation") {
    for (int i = 0; i < 100; ++i) {
        GroupElement a = random_element();
        GroupElement f = compose(
            phase_element(a.theta),
            compose(modulation_element(a.xi0),
                    compose(translation_element(a.x0), dilation_element(a.lambda))));
        CHECK(param_dist(f, a) < 1e-13);
    }
}

TEST_CASE("apply: identity and unitarity") {
    GridPtr g = Grid::make(1, 256, 16.0);
    Field f = oracles::gaussian(g);
    CHECK(oracles::l2_diff(apply(identity_element(), f), f) < 1e-12);
    std::uniform_real_distribution<double> usmall(-2.0, 2.0);
    std::uniform_real_distribution<double> ulog(-1.0, 1.0);
    std::uniform_real_distribution<double> uang(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 20; ++i) {
        GroupElement h{uang(rng), {usmall(rng), 0}, {usmall(rng), 0}, std::exp2(ulog(rng))};
        CHECK(oracles::rel_err(mass(apply(h, f)), mass(f)) < 1e-9);
    }
}

TEST_CASE("modulation shifts the spectrum by whole lattice nodes") {
    GridPtr g = Grid::make(1, 256, 16.0);
    Field f = oracles::gaussian(g);
    const int shift = 16;
    Field mf = apply(modulation_element({shift * g->dxi(), 0}), f);
    Spectrum s0 = fourier(f), s1 = fourier(mf);
    double worst = 0.0;
    for (int k = 0; k < g->n(); ++k) {
        const int src = ((k - shift) % g->n() + g->n()) % g->n();
        worst = std::max(worst, std::abs(s1.coeffs[k] - s0.coeffs[src]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("the action is a homomorphism on fields") {
    GridPtr g = Grid::make(1, 256, 16.0);
    Field f = oracles::gaussian(g);
    std::uniform_real_distribution<double> usmall(-1.5, 1.5);
    std::uniform_real_distribution<double> ulog(-0.7, 0.7);
    std::uniform_real_distribution<double> uang(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 20; ++i) {
        GroupElement a{uang(rng), {usmall(rng), 0}, {usmall(rng), 0}, std::exp2(ulog(rng))};
        GroupElement b{uang(rng), {usmall(rng), 0}, {usmall(rng), 0}, std::exp2(ulog(rng))};
        Field lhs = apply(compose(a, b), f);
        Field rhs = apply(a, apply(b, f));
        CHECK(oracles::l2_diff(lhs, rhs) < 1e-8);
    }
}

TEST_CASE("enlarged elements: identity, unitarity, inverse flow") {
    GridPtr g = Grid::make(1, 512, 32.0);
    Field f = oracles::gaussian(g);
    EnlargedElement e0{identity_element(), 0.0};
    CHECK(oracles::l2_diff(apply_enlarged(e0, f), f) < 1e-12);

    std::uniform_real_distribution<double> usmall(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        Field fl = oracles::random_localized_field(g, rng, 2.0, 2.0);
        EnlargedElement e{random_element(0.7), usmall(rng)};
        e.base.x0 = {usmall(rng), 0};  // keep the moved support inside the box
        Field ef = apply_enlarged(e, fl);
        CHECK(oracles::rel_err(mass(ef), mass(fl)) < 1e-9);
        CHECK(oracles::l2_diff(apply_enlarged_inverse(e, ef), fl) < 1e-8);
    }

    EnlargedElement fwd{identity_element(), 0.8};
    EnlargedElement bwd{identity_element(), -0.8};
    CHECK(oracles::l2_diff(apply_enlarged(bwd, apply_enlarged(fwd, f)), f) < 1e-10);
}

TEST_CASE("separation: hand values") {
    EnlargedElement a{GroupElement{0.4, {0, 0}, {0, 0}, 1.0}, 0.0};
    CHECK(separation(a, a) == doctest::Approx(2.0));

    EnlargedElement b = a;
    b.base.x0 = {5.0, 0};
    b.base.theta = 1.0;
    CHECK(separation(a, b) == doctest::Approx(7.0));

    EnlargedElement c{GroupElement{0.0, {1.0, 0}, {2.0, 0}, 4.0}, 1.0};
    EnlargedElement d{GroupElement{0.3, {1.0, 0}, {2.0, 0}, 1.0}, 0.0};
    CHECK(separation(c, d) == doctest::Approx(20.25).epsilon(1e-10));
}

TEST_CASE("apply_trajectory: identity, scattering-size invariance, residual transport") {
    GridPtr g = Grid::make(1, 512, 16.0);
    Field u0 = oracles::gaussian(g, 1.0, 0.6);
    SolverConfig sc;
    sc.mu = 1.0;
    sc.dim = 1;
    sc.dt = 1e-3;
    sc.store_every = 0.05;
    Trajectory u = evolve(u0, {0.0, 1.0}, sc);

    Trajectory same = apply_trajectory(identity_element(), u);
    CHECK(oracles::l2_diff(same.fields.back(), u.fields.back()) < 1e-12);

    GroupElement ge{0.3, {0.5, 0}, {1.0, 0}, 2.0};
    Trajectory moved = apply_trajectory(ge, u);
    CHECK(moved.times.front() == doctest::Approx(0.0));
    CHECK(moved.times.back() == doctest::Approx(4.0));
    CHECK(oracles::rel_err(scattering_size(moved), scattering_size(u)) < 1e-6);

    // a Galilean image of a numerical solution solves the equation as well
    Trajectory boosted = apply_trajectory(modulation_element({1.0, 0}), u);
    const double r0 = duhamel_residual(u, 0.0, 1.0).duhamel_l2;
    const double r1 = duhamel_residual(boosted, 0.0, 1.0).duhamel_l2;
    CHECK(r1 <= 2.0 * r0);
}

TEST_CASE("inner products of transported profiles decouple at large separation") {
    GridPtr g = Grid::make(1, 1024, 32.0);
    std::mt19937_64 local(11);
    Field f = oracles::random_localized_field(g, local);
    Field h = oracles::random_localized_field(g, local);
    const double bound = std::sqrt(mass(f) * mass(h));

    // widely separated translations: the overlap must be essentially gone
    EnlargedElement a{translation_element({-12.0, 0}), 0.0};
    EnlargedElement b{translation_element({12.0, 0}), 0.0};
    CHECK(separation(a, b) > 20.0);
    CHECK(std::abs(inner(apply_enlarged(a, f), apply_enlarged(b, h))) < 0.02 * bound);
}

TEST_CASE("bilinear overlap of transported packets vanishes along each axis") {
    // The mixed quantity of the theta = 1/2 product, measured as the full
    // spacetime integral (the norm raised to its own power, as with the
    // scattering size), against free-flow trajectories.
    GridPtr g = Grid::make(1, 4096, 64.0);
    Field v = oracles::gaussian(g);
    const int d = 1;
    const double p = 2.0 * (d + 2.0) / d;

    auto mixed_overlap = [&](const EnlargedElement& ga, const EnlargedElement& gb,
                             double t_ref, double dt_store) {
        Trajectory a = free_trajectory(apply_enlarged(ga, v), {-t_ref, t_ref}, dt_store);
        Trajectory b = free_trajectory(apply_enlarged(gb, v), {-t_ref, t_ref}, dt_store);
        std::vector<double> y(a.times.size());
        for (std::size_t k = 0; k < a.times.size(); ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < a.fields[k].values.size(); ++i)
                acc += std::pow(
                    std::abs(a.fields[k].values[i]) * std::abs(b.fields[k].values[i]),
                    0.5 * p);
            y[k] = acc * g->cell_volume();
        }
        double integral = 0.0;
        for (std::size_t k = 0; k + 1 < y.size(); ++k)
            integral += 0.5 * (a.times[k + 1] - a.times[k]) * (y[k] + y[k + 1]);
        return integral;
    };

    auto elem = [](double xi, double x, double lam, double t0) {
        return EnlargedElement{GroupElement{0.0, {xi, 0}, {x, 0}, lam}, t0};
    };
    const EnlargedElement id = elem(0, 0, 1, 0);

    struct Sweep {
        const char* name;
        double t_ref;      // the xi axis needs a fine quadrature: the overlap
        double dt_store;   // is a spike of width ~ 1/(relative velocity)
        std::vector<std::array<EnlargedElement, 2>> pairs;
    };
    std::vector<Sweep> sweeps = {
        {"x", 3.0, 0.1,
         {{elem(0, -3, 1, 0), elem(0, 3, 1, 0)},
          {elem(0, -6, 1, 0), elem(0, 6, 1, 0)},
          {elem(0, -12, 1, 0), elem(0, 12, 1, 0)}}},
        {"xi", 1.0, 0.004,
         {{elem(-2, 0, 1, 0), elem(2, 0, 1, 0)},
          {elem(-4, 0, 1, 0), elem(4, 0, 1, 0)},
          {elem(-8, 0, 1, 0), elem(8, 0, 1, 0)},
          {elem(-16, 0, 1, 0), elem(16, 0, 1, 0)}}},
        {"lambda_up", 3.0, 0.1,
         {{elem(0, 0, 0.5, 0), elem(0, 0, 2, 0)},
          {elem(0, 0, 0.25, 0), elem(0, 0, 4, 0)},
          {elem(0, 0, 0.125, 0), elem(0, 0, 8, 0)},
          {elem(0, 0, 0.0625, 0), elem(0, 0, 16, 0)},
          {elem(0, 0, 1.0 / 24, 0), elem(0, 0, 24, 0)}}},
        {"lambda_down", 3.0, 0.1,
         {{elem(0, 0, 2, 0), elem(0, 0, 0.5, 0)},
          {elem(0, 0, 4, 0), elem(0, 0, 0.25, 0)},
          {elem(0, 0, 8, 0), elem(0, 0, 0.125, 0)},
          {elem(0, 0, 16, 0), elem(0, 0, 0.0625, 0)},
          {elem(0, 0, 24, 0), elem(0, 0, 1.0 / 24, 0)}}},
        {"t0", 3.0, 0.1,
         {{id, elem(0, 0, 1, 4)}, {id, elem(0, 0, 1, 8)}, {id, elem(0, 0, 1, 16)},
          {id, elem(0, 0, 1, 24)}}},
    };
    for (const auto& sweep : sweeps) {
        INFO(sweep.name);
        const double base = mixed_overlap(id, id, sweep.t_ref, sweep.dt_store);
        double prev = base;
        double last = base;
        for (const auto& pr : sweep.pairs) {
            const double val = mixed_overlap(pr[0], pr[1], sweep.t_ref, sweep.dt_store);
            CHECK(val <= prev * (1.0 + 1e-9));
            prev = val;
            last = val;
        }
        CHECK(last < 0.05 * base);
    }
}
