#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "mcnls/acceptance.hpp"
#include "mcnls/diagnostics.hpp"
#include "mcnls/groundstate.hpp"
#include "mcnls/io.hpp"
#include "mcnls/profiles.hpp"
#include "mcnls/propagator.hpp"
#include "mcnls/scenarios.hpp"
#include "mcnls/symmetry.hpp"

namespace {

std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("MCNLS_OUTPUT_DIR")) return env;
    return "mcnls-out";
}

void attach_scenario_flags(CLI::App* cmd, mcnls::ScenarioConfig& cfg) {
    cmd->add_option("--dim", [&cfg](const std::vector<std::string>& v) {
        cfg.dim = std::stoi(v.at(0));
        return true;
    }, "space dimension (scenario default if omitted)");
    cmd->add_option("--grid-n", [&cfg](const std::vector<std::string>& v) {
        cfg.n = std::stoi(v.at(0));
        return true;
    }, "samples per axis (power of two)");
    cmd->add_option("--box-halfwidth", [&cfg](const std::vector<std::string>& v) {
        cfg.box_halfwidth = std::stod(v.at(0));
        return true;
    }, "half-width L of the periodic box");
    cmd->add_option("--dt", [&cfg](const std::vector<std::string>& v) {
        cfg.dt = std::stod(v.at(0));
        return true;
    }, "time step");
    cmd->add_option("--mu", [&cfg](const std::vector<std::string>& v) {
        cfg.mu = std::stod(v.at(0));
        return true;
    }, "nonlinearity sign (+1 defocusing, -1 focusing)");
    cmd->add_option("--t-end", [&cfg](const std::vector<std::string>& v) {
        cfg.t_end = std::stod(v.at(0));
        return true;
    }, "evolution endpoint");
    cmd->add_option("--store-every", [&cfg](const std::vector<std::string>& v) {
        cfg.store_every = std::stod(v.at(0));
        return true;
    }, "snapshot cadence");
    cmd->add_option("--seed", cfg.seed, "random seed recorded in the manifest");
    cmd->add_option("--output-dir", cfg.output_dir, "artifact root (or MCNLS_OUTPUT_DIR)");
    cmd->add_option("--jobs", cfg.jobs, "parallel sweep points");
}

int do_run(const mcnls::ScenarioConfig& cfg) {
    auto outcome = mcnls::run_scenario(cfg);
    std::printf("scenario %s: %s (%s)\n", cfg.scenario.c_str(),
                outcome.passed ? "PASS" : "FAIL", outcome.dir.string().c_str());
    for (const auto& f : outcome.failures) std::printf("  failure: %s\n", f.c_str());
    return outcome.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the mass-critical nonlinear Schrodinger equation"};
    app.require_subcommand(1);

    // run ------------------------------------------------------------------
    mcnls::ScenarioConfig run_cfg;
    auto* run = app.add_subcommand("run", "run a named scenario");
    run->add_option("--scenario", run_cfg.scenario, "scenario name")->required();
    run->set_config("--config", "", "key = value configuration file (flags win)");
    attach_scenario_flags(run, run_cfg);

    // verify ---------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run the full acceptance suite");
    mcnls::AcceptanceOptions acc;
    std::string verify_out;
    verify->add_option("--seed", acc.seed, "random seed");
    verify->add_option("--grid-n", acc.override_n, "override grid resolution (validated)");
    verify->add_flag("--inject-mu-flip", acc.flip_mu_sign,
                     "fault injection: flip the nonlinearity sign");
    verify->add_option("--report", verify_out, "write a JSON report here");

    // groundstate ------------------------------------------------------------
    auto* gs = app.add_subcommand("groundstate", "compute the ground state");
    int gs_dim = 1, gs_n = 512;
    double gs_L = 16.0, gs_tol = 1e-10;
    std::string gs_out = "groundstate";
    gs->add_option("--dim", gs_dim);
    gs->add_option("--grid-n", gs_n);
    gs->add_option("--box-halfwidth", gs_L);
    gs->add_option("--tol", gs_tol);
    gs->add_option("--output", gs_out, "output basename (.field/.json)");

    // decompose --------------------------------------------------------------
    auto* dec = app.add_subcommand("decompose", "profile-decompose a snapshot file");
    std::string dec_in, dec_out = "decomposition";
    int dec_max = 4;
    double dec_floor = -1.0;
    bool dec_radial = false, dec_with_q = false;
    dec->add_option("input", dec_in, "snapshot file")->required();
    dec->add_option("--max-profiles", dec_max);
    dec->add_option("--mass-floor", dec_floor, "absolute floor (default 1e-3 M(u))");
    dec->add_flag("--radial", dec_radial, "restrict to the radial subgroup");
    dec->add_flag("--with-groundstate", dec_with_q, "add Q to the template dictionary");
    dec->add_option("--output", dec_out, "output basename");

    // transform ---------------------------------------------------------------
    auto* tr = app.add_subcommand("transform", "apply a group element to a snapshot");
    std::string tr_in, tr_out = "transformed.field", tr_elem;
    tr->add_option("input", tr_in, "snapshot file")->required();
    tr->add_option("--element", tr_elem,
                   "JSON {theta, xi0:[..], x0:[..], lambda, t0?}")->required();
    tr->add_option("--output", tr_out);

    // norms ---------------------------------------------------------------------
    auto* nm = app.add_subcommand("norms", "report M / L^p norms of snapshot files");
    std::vector<std::string> nm_in;
    double nm_p = 2.0;
    nm->add_option("inputs", nm_in, "snapshot files")->required();
    nm->add_option("-p,--p", nm_p, "Lebesgue exponent");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (run_cfg.output_dir.empty()) run_cfg.output_dir = default_output_root();
            return do_run(run_cfg);
        }
        if (verify->parsed()) {
            auto results = mcnls::run_acceptance(acc);
            bool all = true;
            for (const auto& r : results) all = all && r.passed;
            if (!verify_out.empty()) {
                std::ofstream out(verify_out);
                out << mcnls::acceptance_report(results).dump(2) << "\n";
            }
            return all ? 0 : 1;
        }
        if (gs->parsed()) {
            auto grid = mcnls::Grid::make(gs_dim, gs_n, gs_L);
            auto q = mcnls::petviashvili_solve(grid, gs_tol, 500);
            mcnls::write_field(gs_out + ".field", q.field);
            nlohmann::json j{{"d", gs_dim},
                             {"mass", q.mass},
                             {"residual", q.residual},
                             {"iterations", q.iterations}};
            std::ofstream out(gs_out + ".json");
            out << j.dump(2) << "\n";
            std::printf("groundstate: mass=%.10g residual=%.3g iterations=%d\n", q.mass,
                        q.residual, q.iterations);
            return 0;
        }
        if (dec->parsed()) {
            mcnls::Field u = mcnls::read_field(dec_in);
            mcnls::ExtractOptions opts;
            if (dec_with_q) {
                auto q = mcnls::petviashvili_solve(u.grid, 1e-9, 500);
                opts.templates = {mcnls::gaussian_template(u.grid), q.field};
                opts.template_names = {"gaussian", "groundstate"};
            }
            auto d = dec_radial
                         ? mcnls::extract_profiles_radial(u, dec_max, dec_floor, opts)
                         : mcnls::extract_profiles(u, dec_max, dec_floor, opts);
            nlohmann::json j;
            j["total_mass"] = d.total_mass;
            j["decoupling_defect"] = d.decoupling_defect;
            j["remainder_linear_S"] = d.remainder_linear_S;
            j["remainder_mass"] = mcnls::mass(d.remainder);
            nlohmann::json arr = nlohmann::json::array();
            for (std::size_t i = 0; i < d.profiles.size(); ++i) {
                const auto& p = d.profiles[i];
                std::string name = dec_out + "_profile" + std::to_string(i) + ".field";
                mcnls::write_field(name, p.phi);
                arr.push_back({{"fit", mcnls::enlarged_to_json(p.fit, u.grid->dim())},
                               {"captured_mass", p.captured_mass},
                               {"template", p.template_name},
                               {"file", name}});
            }
            j["profiles"] = arr;
            std::ofstream out(dec_out + ".json");
            out << j.dump(2) << "\n";
            std::printf("decompose: %zu profile(s), defect %.3g\n", d.profiles.size(),
                        d.decoupling_defect);
            return 0;
        }
        if (tr->parsed()) {
            mcnls::Field f = mcnls::read_field(tr_in);
            auto j = nlohmann::json::parse(tr_elem);
            auto e = mcnls::enlarged_from_json(j);
            mcnls::Field out = mcnls::apply_enlarged(e, f);
            mcnls::write_field(tr_out, out);
            std::printf("transform: wrote %s (mass %.10g)\n", tr_out.c_str(),
                        mcnls::mass(out));
            return 0;
        }
        if (nm->parsed()) {
            for (const auto& path : nm_in) {
                mcnls::Field f = mcnls::read_field(path);
                std::printf("%s: mass=%.12g l2=%.12g l%g=%.12g boundary_frac=%.3g\n",
                            path.c_str(), mcnls::mass(f), mcnls::lp_norm(f, 2.0), nm_p,
                            mcnls::lp_norm(f, nm_p), mcnls::boundary_mass_fraction(f));
            }
            return 0;
        }
    } catch (const mcnls::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
