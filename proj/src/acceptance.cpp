#include "mcnls/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <numbers>
#include <random>

#include "mcnls/diagnostics.hpp"
#include "mcnls/groundstate.hpp"
#include "mcnls/profiles.hpp"
#include "mcnls/propagator.hpp"
#include "mcnls/scenarios.hpp"
#include "mcnls/symmetry.hpp"

namespace mcnls {

namespace {

struct Check {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += "FAILED: " + what;
        }
    }
    void note(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
    std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }
};

int grid_n(const AcceptanceOptions& o, int def_n) {
    return o.override_n > 0 ? o.override_n : def_n;
}

double mu_sign(const AcceptanceOptions& o, double mu) {
    return o.flip_mu_sign ? -mu : mu;
}

double l2_diff(const Field& a, const Field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        acc += std::norm(a.values[i] - b.values[i]);
    return std::sqrt(acc * a.grid->cell_volume());
}

Field scaled_gaussian(const GridPtr& g, double amplitude) {
    return sample(g, [amplitude](std::array<double, 2> x) {
        return cplx{amplitude * std::exp(-(x[0] * x[0] + x[1] * x[1])), 0.0};
    });
}

// --- criterion bodies -------------------------------------------------------

void c1_groundstate_mass(const AcceptanceOptions& o, Check& ck) {
    GridPtr g = Grid::make(1, grid_n(o, 512), 16.0);
    GroundState q = petviashvili_solve(g, 1e-10, 500);
    const double ref = std::sqrt(3.0) * std::numbers::pi / 2.0;
    const double rel = std::abs(q.mass - ref) / ref;
    ck.note("M(Q)=" + ck.num(q.mass) + " rel_err=" + ck.num(rel) +
            " iters=" + std::to_string(q.iterations));
    ck.require(rel < 1e-8, "d=1 ground-state mass off by >= 1e-8 relative");
}

void c2_soliton(const AcceptanceOptions& o, Check& ck) {
    GridPtr g = Grid::make(1, grid_n(o, 512), 16.0);
    GroundState q = petviashvili_solve(g, 1e-10, 500);
    SolverConfig sc;
    sc.mu = mu_sign(o, -1.0);
    sc.dim = 1;
    sc.dt = 1e-4;
    sc.store_every = 1e-2;
    Trajectory u = evolve(q.field, {0.0, 1.0}, sc);
    double sup = 0.0;
    for (std::size_t k = 0; k < u.times.size(); ++k) {
        Field exact = q.field;
        const cplx ph = std::polar(1.0, u.times[k]);
        for (auto& z : exact.values) z *= ph;
        sup = std::max(sup, l2_diff(u.fields[k], exact));
    }
    ck.note("sup_err=" + ck.num(sup) + " mass_drift=" + ck.num(u.mass_drift));
    ck.require(!u.diverged, "soliton run diverged");
    ck.require(sup < 1e-6, "sup_t ||u - e^{it}Q||_2 >= 1e-6");
    ck.require(u.mass_drift < 1e-8, "mass drift >= 1e-8");
}

void c3_free_gaussian(const AcceptanceOptions& o, Check& ck) {
    GridPtr g = Grid::make(1, grid_n(o, 1024), 24.0);
    Field u0 = scaled_gaussian(g, 1.0);
    double worst = 0.0;
    for (double t : {0.1, 0.5, 1.0}) {
        Field num = free_propagate(u0, t);
        Field exact = sample(g, [t](std::array<double, 2> x) {
            const cplx denom{1.0, 4.0 * t};
            return std::exp(-x[0] * x[0] / denom) / std::sqrt(denom);
        });
        worst = std::max(worst, l2_diff(num, exact));
    }
    ck.note("worst_l2_err=" + ck.num(worst));
    ck.require(worst < 1e-8, "free Gaussian L2 error >= 1e-8");
}

double angle_dist(double a, double b) {
    double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, 2.0 * std::numbers::pi - d);
}

void c4_group_axioms(const AcceptanceOptions& o, Check& ck) {
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> uang(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> upar(-3.0, 3.0);
    std::uniform_real_distribution<double> ulog(-1.0, 1.0);
    auto rnd = [&]() {
        return GroupElement{uang(rng), {upar(rng), 0}, {upar(rng), 0},
                            std::exp2(ulog(rng))};
    };
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        GroupElement a = rnd(), b = rnd(), c = rnd();
        GroupElement lhs = compose(compose(a, b), c);
        GroupElement rhs = compose(a, compose(b, c));
        worst = std::max({worst, angle_dist(lhs.theta, rhs.theta),
                          std::abs(lhs.xi0[0] - rhs.xi0[0]), std::abs(lhs.x0[0] - rhs.x0[0]),
                          std::abs(lhs.lambda - rhs.lambda)});
        GroupElement e = compose(a, inverse(a));
        worst = std::max({worst, angle_dist(e.theta, 0.0), std::abs(e.xi0[0]),
                          std::abs(e.x0[0]), std::abs(e.lambda - 1.0)});
        GroupElement f = compose(
            phase_element(a.theta),
            compose(modulation_element(a.xi0),
                    compose(translation_element(a.x0), dilation_element(a.lambda))));
        worst = std::max({worst, angle_dist(f.theta, a.theta), std::abs(f.xi0[0] - a.xi0[0]),
                          std::abs(f.x0[0] - a.x0[0]), std::abs(f.lambda - a.lambda)});
    }
    ck.note("worst_param_err=" + ck.num(worst));
    ck.require(worst < 1e-12, "group axioms violated beyond 1e-12 per parameter");

    GridPtr g = Grid::make(1, 256, 16.0);
    std::uniform_real_distribution<double> usmall(-2.0, 2.0);
    std::uniform_real_distribution<double> uwidth(0.7, 1.5);
    double worst_mass = 0.0;
    for (int i = 0; i < 50; ++i) {
        Field f = sample(g, [&, w = uwidth(rng), x0 = usmall(rng)](std::array<double, 2> x) {
            return cplx{std::exp(-(x[0] - x0) * (x[0] - x0) / (w * w)), 0.0};
        });
        GroupElement h{uang(rng), {usmall(rng), 0}, {usmall(rng), 0}, std::exp2(ulog(rng))};
        const double m0 = mass(f);
        const double m1 = mass(apply(h, f));
        worst_mass = std::max(worst_mass, std::abs(m1 - m0) / m0);
    }
    ck.note("worst_mass_err=" + ck.num(worst_mass));
    ck.require(worst_mass < 1e-9, "unitarity violated beyond 1e-9 relative");
}

void c5_action_covariance(const AcceptanceOptions& o, Check& ck) {
    // wide box: the boosted packet's leading tail must never reach the seam
    GridPtr g = Grid::make(1, grid_n(o, 1024), 24.0);
    SolverConfig sc;
    sc.mu = mu_sign(o, 1.0);
    sc.dim = 1;
    sc.dt = 1e-3;
    sc.store_every = 0.05;
    Field u0 = scaled_gaussian(g, 0.6316);

    GroupElement boost = modulation_element({2.0, 0.0});
    Trajectory direct = evolve(apply(boost, u0), {0.0, 1.0}, sc);
    Trajectory mapped = apply_trajectory(boost, evolve(u0, {0.0, 1.0}, sc));
    double worst = 0.0;
    for (std::size_t k = 0; k < direct.times.size(); ++k)
        worst = std::max(worst, l2_diff(direct.fields[k], mapped.fields[k]));
    ck.note("covariance_err=" + ck.num(worst));
    ck.require(worst < 1e-5, "Galilean boost does not commute with evolve to 1e-5");

    Trajectory base = evolve(u0, {0.0, 1.0}, sc);
    GroupElement gen{0.3, {0.5, 0}, {1.0, 0}, 2.0};
    Trajectory moved = apply_trajectory(gen, base);
    const double s0 = scattering_size(base);
    const double s1 = scattering_size(moved);
    const double rel = std::abs(s1 - s0) / s0;
    ck.note("S_invariance_rel=" + ck.num(rel));
    ck.require(rel < 1e-6, "scattering size moved by >= 1e-6 under the action");
}

void c6_pseudoconformal(const AcceptanceOptions& o, Check& ck) {
    // the pc map stretches by up to 1/|t|; the box must hold the stretched tails
    GridPtr g = Grid::make(1, grid_n(o, 1024), 32.0);
    GroundState q = petviashvili_solve(g, 1e-10, 500);
    SolverConfig sc;
    sc.mu = mu_sign(o, -1.0);
    sc.dim = 1;
    sc.dt = 1e-4;
    sc.store_every = 1e-2;
    Field u0 = q.field;
    const cplx ph = std::polar(1.0, 0.5);
    for (auto& z : u0.values) z *= ph;
    Trajectory u = evolve(u0, {0.5, 2.0}, sc);

    Trajectory once = pseudoconformal(u);
    Trajectory twice = pseudoconformal(once);
    ck.note("pc_mass_drift=" + ck.num(once.mass_drift));
    ck.require(once.mass_drift < 1e-6, "pc image mass drift >= 1e-6");

    double worst = 0.0;
    for (std::size_t k = 0; k < u.times.size(); ++k)
        worst = std::max(worst, l2_diff(twice.fields[k], u.fields[k]));
    ck.note("involution_err=" + ck.num(worst));
    ck.require(worst < 1e-4, "double pc application missed the source by >= 1e-4");
}

void c7_residual_convergence(const AcceptanceOptions& o, Check& ck) {
    GridPtr g = Grid::make(1, grid_n(o, 512), 16.0);
    GroundState q = petviashvili_solve(g, 1e-10, 500);
    SolverConfig sc;
    sc.mu = mu_sign(o, -1.0);
    sc.dim = 1;

    std::vector<double> residuals;
    for (double dt : {2e-4, 1e-4, 5e-5, 2.5e-5}) {
        sc.dt = dt;
        sc.store_every = dt;  // Duhamel quadrature at solver resolution
        Trajectory u = evolve(q.field, {0.0, 0.2}, sc);
        residuals.push_back(duhamel_residual(u, 0.0, 0.2).duhamel_l2);
    }
    std::string rs = "ratios=";
    bool ok = true;
    for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
        const double ratio = residuals[i] / residuals[i + 1];
        rs += ck.num(ratio) + (i + 2 < residuals.size() ? "," : "");
        if (!(ratio >= 3.5 && ratio <= 4.5)) ok = false;
    }
    ck.note(rs);
    ck.require(ok, "Duhamel residual halving ratios left [3.5, 4.5]");

    sc.dt = 1e-4;
    sc.store_every = 1e-4;
    Trajectory u = evolve(q.field, {0.0, 0.5}, sc);
    const double r = duhamel_residual(u, 0.0, 0.5).duhamel_l2;
    ck.note("residual_dt1e-4=" + ck.num(r));
    ck.require(r < 1e-5, "soliton Duhamel residual at dt=1e-4 >= 1e-5");
}

void c8_profile_recovery(const AcceptanceOptions& o, Check& ck) {
    GridPtr g = Grid::make(1, grid_n(o, 2048), 64.0);
    GroundState q = petviashvili_solve(g, 1e-9, 500);
    ExtractOptions opts;
    opts.templates = {gaussian_template(g), q.field};
    opts.template_names = {"gaussian", "groundstate"};

    // single planted bubble
    EnlargedElement gt{GroupElement{0.7, {1.5, 0}, {5.0, 0}, 2.0}, 0.5};
    Field planted = apply_enlarged(gt, q.field);
    ProfileDecomposition dec = extract_profiles(planted, 2, -1.0, opts);
    ck.require(!dec.profiles.empty(), "no profile recovered from a planted bubble");
    if (!dec.profiles.empty()) {
        const double cap = dec.profiles.front().captured_mass;
        Field rec = apply_enlarged(dec.profiles.front().fit, dec.profiles.front().phi);
        const double orbit = orbit_distance(rec, planted);
        ck.note("captured=" + ck.num(cap / q.mass) + "M(Q) orbit_dist=" +
                ck.num(orbit / std::sqrt(q.mass)) + "||Q||");
        ck.require(cap >= 0.99 * q.mass, "captured mass below 0.99 M(Q)");
        ck.require(orbit < 0.05 * std::sqrt(q.mass), "orbit distance above 0.05 ||Q||_2");
    }

    // two planted bubbles beyond separation 100
    EnlargedElement g1{GroupElement{0.0, {-15.0, 0}, {-40.0, 0}, 1.0}, 0.0};
    EnlargedElement g2{GroupElement{1.0, {15.0, 0}, {40.0, 0}, 1.0}, 0.0};
    Field b1 = apply_enlarged(g1, q.field);
    Field b2 = apply_enlarged(g2, q.field);
    Field two = make_field(g);
    for (std::size_t i = 0; i < two.values.size(); ++i)
        two.values[i] = b1.values[i] + b2.values[i];
    ck.note("planted_sep=" + ck.num(separation(g1, g2)));
    ProfileDecomposition dec2 = extract_profiles(two, 3, -1.0, opts);
    ck.require(dec2.profiles.size() == 2, "two-bubble input did not yield 2 profiles");
    for (const auto& p : dec2.profiles)
        ck.require(p.captured_mass >= 0.95 * q.mass, "bubble captured below 0.95 M(Q)");
    const double defect_rel = dec2.decoupling_defect / mass(two);
    ck.note("decoupling_defect_rel=" + ck.num(defect_rel));
    ck.require(defect_rel < 0.02, "decoupling defect >= 0.02 M(u)");
}

void c9_decoupling_trends(const AcceptanceOptions& o, Check& ck) {
    GridPtr g = Grid::make(1, grid_n(o, 8192), 128.0);
    const double t_ref = 4.0, dt_store = 0.05;

    // odd mean-zero profile for the inner products, plain Gaussian for S
    Field odd = sample(g, [](std::array<double, 2> x) {
        return cplx{x[0] * std::exp(-0.5 * x[0] * x[0]), 0.0};
    });
    {
        const double m = mass(odd);
        for (auto& z : odd.values) z *= 1.0 / std::sqrt(m);
    }
    Field gauss = gaussian_template(g);

    // Both elements of each pair move apart along one coordinate of the
    // separation functional; everything else stays coincident.
    struct Axis {
        const char* name;
        std::vector<std::array<EnlargedElement, 2>> pairs;
    };
    auto elem = [](double xi, double x, double lam, double t0) {
        return EnlargedElement{GroupElement{0.0, {xi, 0}, {x, 0}, lam}, t0};
    };
    auto id = elem(0, 0, 1, 0);
    auto x_pair = [&](double s) {
        return std::array<EnlargedElement, 2>{elem(0, -s / 2, 1, 0), elem(0, s / 2, 1, 0)};
    };
    auto xi_pair = [&](double s) {
        return std::array<EnlargedElement, 2>{elem(-s / 2, 0, 1, 0), elem(s / 2, 0, 1, 0)};
    };
    auto lam_pair = [&](double r, bool up) {
        const double s = std::sqrt(r);
        return up ? std::array<EnlargedElement, 2>{elem(0, 0, 1.0 / s, 0), elem(0, 0, s, 0)}
                  : std::array<EnlargedElement, 2>{elem(0, 0, s, 0), elem(0, 0, 1.0 / s, 0)};
    };
    // one-sided: the decoupling mechanism is one packet focused while the
    // other is dispersed, so only the lag difference moves
    auto t_pair = [&](double s) {
        return std::array<EnlargedElement, 2>{id, elem(0, 0, 1, s)};
    };
    std::vector<Axis> axes = {
        {"x", {{id, id}, x_pair(6), x_pair(12), x_pair(24), x_pair(48)}},
        {"xi", {{id, id}, xi_pair(4), xi_pair(8), xi_pair(16), xi_pair(32)}},
        {"lambda_up",
         {{id, id}, lam_pair(4, true), lam_pair(16, true), lam_pair(64, true),
          lam_pair(256, true)}},
        {"lambda_down",
         {{id, id}, lam_pair(4, false), lam_pair(16, false), lam_pair(64, false),
          lam_pair(256, false)}},
        {"t0", {{id, id}, t_pair(6), t_pair(12), t_pair(24), t_pair(48)}},
    };

    auto s_of = [&](const Field& f) {
        return scattering_size(free_trajectory(f, {-t_ref, t_ref}, dt_store));
    };

    for (const auto& axis : axes) {
        std::vector<double> inner_vals, sgap_vals, seps;
        for (const auto& pr : axis.pairs) {
            seps.push_back(separation(pr[0], pr[1]));
            Field oa = apply_enlarged(pr[0], odd);
            Field ob = apply_enlarged(pr[1], odd);
            inner_vals.push_back(std::abs(inner(oa, ob)));

            Field a = apply_enlarged(pr[0], gauss);
            Field b = apply_enlarged(pr[1], gauss);
            Field sum = a;
            for (std::size_t i = 0; i < sum.values.size(); ++i)
                sum.values[i] += b.values[i];
            const double s_sum = s_of(sum);
            const double s_each = s_of(a) + s_of(b);
            sgap_vals.push_back(std::abs(s_sum - s_each) / s_each);
        }
        const double inner_rel = inner_vals.back() / inner_vals.front();
        const double sgap_rel = sgap_vals.back() / sgap_vals.front();
        ck.note(std::string(axis.name) + "(sep<=" + ck.num(seps.back()) + "): inner_rel=" +
                ck.num(inner_rel) + " Sgap_rel=" + ck.num(sgap_rel));
        ck.require(inner_rel < 0.05,
                   std::string("cross inner product above 5% along axis ") + axis.name);
        ck.require(sgap_rel < 0.05,
                   std::string("S_gap above 5% of coincident along axis ") + axis.name);
        for (std::size_t i = 2; i + 1 < inner_vals.size(); ++i) {
            ck.require(inner_vals[i + 1] <= inner_vals[i] + 1e-12,
                       std::string("inner products not decreasing along ") + axis.name);
            ck.require(sgap_vals[i + 1] <= sgap_vals[i] + 1e-12,
                       std::string("S_gap not decreasing along ") + axis.name);
        }
    }
}

void c10_power_law(const AcceptanceOptions& o, Check& ck) {
    GridPtr g = Grid::make(1, grid_n(o, 512), 80.0);
    SolverConfig sc;
    sc.mu = mu_sign(o, 1.0);
    sc.dim = 1;
    sc.dt = 1e-3;
    sc.store_every = 1e-2;

    const std::vector<double> masses = {1e-3, 4e-3, 1.6e-2};
    std::vector<double> logm, logs;
    double boundary_worst = 0.0;
    for (double m : masses) {
        Field f = scaled_gaussian(g, 1.0);
        const double scale = std::sqrt(m / mass(f));
        for (auto& z : f.values) z *= scale;
        Trajectory u = evolve(f, {0.0, 5.0}, sc);
        boundary_worst = std::max(boundary_worst, u.boundary_mass_max);
        logm.push_back(std::log(m));
        logs.push_back(std::log(scattering_size(u)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i) {
        sx += logm[i];
        sy += logs[i];
        sxx += logm[i] * logm[i];
        sxy += logm[i] * logs[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    ck.note("fitted_exponent=" + ck.num(slope) + " boundary_max=" + ck.num(boundary_worst));
    ck.require(std::abs(slope - 3.0) <= 0.15, "S vs M exponent off (d+2)/d = 3 by > 0.15");
    ck.require(boundary_worst < 1e-3, "boundary mass monitor above 1e-3");
}

void c11_negative_regularity(const AcceptanceOptions& o, Check& ck) {
    // Reuses the scenario implementation; its checks are the criterion.
    ScenarioConfig cfg;
    cfg.scenario = "neg-regularity";
    cfg.seed = o.seed;
    if (o.override_n > 0) cfg.n = o.override_n;
    if (o.flip_mu_sign) cfg.mu = -1.0;
    cfg.output_dir = std::filesystem::temp_directory_path() / "mcnls-accept";
    ScenarioOutcome out = run_scenario(cfg);
    for (const auto& f : out.failures) ck.require(false, f);
    if (out.passed) ck.note("worst_ratio stable under dt halving and n doubling");
}

void c12_concentration_covariance(const AcceptanceOptions& o, Check& ck) {
    GridPtr g = Grid::make(1, grid_n(o, 512), 16.0);
    GroundState q = petviashvili_solve(g, 1e-10, 500);

    const double nq = concentration_scale(q.field, 0.1);
    Field dil = apply(dilation_element(2.0), q.field);
    const double nd = concentration_scale(dil, 0.1);
    ck.note("N_Q=" + ck.num(nq) + " N_dilated=" + ck.num(nd));
    ck.require(nd == 0.5 * nq, "lambda=2 dilation did not shift scale one dyadic level");

    GroupElement gmod{0.0, {0.7, 0}, {1.3, 0}, 1.0};
    auto c = centers(apply(gmod, q.field));
    ck.note("centers=(" + ck.num(c.first[0]) + "," + ck.num(c.second[0]) + ")");
    ck.require(std::abs(c.first[0] - 1.3) <= g->spacing(), "x center off by more than a cell");
    ck.require(std::abs(c.second[0] - 0.7) <= g->dxi(), "xi center off by more than a cell");
    const double n_mod = concentration_scale(apply(modulation_element({0.7, 0}), q.field), 0.1);
    ck.require(n_mod == nq, "modulation changed the concentration scale");

    // synthetic orbit track
    Trajectory track;
    track.config.dim = 1;
    track.config.scale_eta_ref = 0.1;
    for (int k = 0; k <= 10; ++k) {
        const double t = 0.1 * k;
        Field f = q.field;
        const cplx ph = std::polar(1.0, t);
        for (auto& z : f.values) z *= ph;
        track.times.push_back(t);
        track.fields.push_back(std::move(f));
    }
    auto ct = concentration_profile(track, {0.5, 0.2, 0.1, 0.05});
    // walking eta from large to small, C(eta) must not shrink
    bool monotone = true;
    double last = 0.0;
    for (auto it = ct.c_eta_table.rbegin(); it != ct.c_eta_table.rend(); ++it) {
        if (it->second + 1e-12 < last) monotone = false;
        last = it->second;
    }
    ck.require(monotone, "C(eta) not monotone nonincreasing in eta");
}

void c13_determinism(const AcceptanceOptions& o, Check& ck) {
    auto probe = [&](unsigned long seed) {
        nlohmann::json j;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> upar(-2.0, 2.0);
        GridPtr g = Grid::make(1, 256, 16.0);
        Field f = sample(g, [&](std::array<double, 2> x) {
            return cplx{std::exp(-x[0] * x[0]), 0.1 * std::exp(-2.0 * x[0] * x[0])};
        });
        GroupElement h{upar(rng), {upar(rng), 0}, {upar(rng), 0}, std::exp2(0.25 * upar(rng))};
        Field hf = apply(h, f);
        j["mass"] = mass(hf);
        SolverConfig sc;
        sc.mu = mu_sign(o, 1.0);
        sc.dim = 1;
        sc.dt = 1e-3;
        sc.store_every = 0.05;
        Trajectory u = evolve(hf, {0.0, 0.5}, sc);
        j["S"] = scattering_size(u);
        j["drift"] = u.mass_drift;
        j["N"] = concentration_scale(u.fields.back(), 0.1);
        ProfileDecomposition dec = extract_profiles(u.fields.back(), 1, -1.0);
        j["captured"] = dec.profiles.empty() ? 0.0 : dec.profiles.front().captured_mass;
        return j.dump();
    };
    const std::string a = probe(o.seed);
    const std::string b = probe(o.seed);
    ck.note("report_bytes=" + std::to_string(a.size()));
    ck.require(a == b, "identical seeds produced different reports");
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    void (*body)(const AcceptanceOptions&, Check&);
};

const Criterion kCriteria[] = {
    {1, "ground-state mass (d=1 closed form)", 5, c1_groundstate_mass},
    {2, "soliton fidelity", 60, c2_soliton},
    {3, "free-evolution Gaussian oracle", 5, c3_free_gaussian},
    {4, "group axioms and unitarity", 10, c4_group_axioms},
    {5, "action covariance", 120, c5_action_covariance},
    {6, "pseudoconformal involution and mass", 60, c6_pseudoconformal},
    {7, "Duhamel residual convergence", 600, c7_residual_convergence},
    {8, "profile recovery (planted bubbles)", 300, c8_profile_recovery},
    {9, "decoupling trends along the five axes", 300, c9_decoupling_trends},
    {10, "small-data scattering power law", 300, c10_power_law},
    {11, "negative-regularity envelope stability", 600, c11_negative_regularity},
    {12, "concentration covariance", 60, c12_concentration_covariance},
    {13, "determinism", 0, c13_determinism},
};

}  // namespace

const std::vector<int>& criterion_ids() {
    static const std::vector<int> ids = [] {
        std::vector<int> v;
        for (const auto& c : kCriteria) v.push_back(c.id);
        return v;
    }();
    return ids;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
    const Criterion* found = nullptr;
    for (const auto& c : kCriteria)
        if (c.id == id) found = &c;
    if (!found) throw ConfigError("unknown acceptance criterion id");
    if (opts.override_n > 0) Grid::make(1, opts.override_n, 16.0);  // validate before running

    CriterionResult res;
    res.id = found->id;
    res.name = found->name;
    res.runtime_limit = found->limit_seconds;
    Check ck;
    const auto start = std::chrono::steady_clock::now();
    try {
        found->body(opts, ck);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        ck.require(false, std::string("exception: ") + e.what());
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (found->limit_seconds > 0 && res.seconds > found->limit_seconds)
        ck.require(false, "runtime limit exceeded");
    res.passed = ck.ok;
    res.detail = ck.detail;
    return res;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
    std::vector<CriterionResult> all;
    for (int id : criterion_ids()) {
        CriterionResult r = run_criterion(id, opts);
        std::printf("[%s] criterion %2d: %-42s (%.1fs)  %s\n", r.passed ? "PASS" : "FAIL",
                    r.id, r.name.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
        all.push_back(std::move(r));
    }
    return all;
}

nlohmann::json acceptance_report(const std::vector<CriterionResult>& results) {
    nlohmann::json j;
    j["version"] = "mcnls 0.1.0";
    nlohmann::json arr = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        arr.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed},
                       {"detail", r.detail}});
        all = all && r.passed;
    }
    j["criteria"] = arr;
    j["passed"] = all;
    return j;
}

}  // namespace mcnls
