#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mcnls {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// User-facing configuration: scenario name plus optional grid/solver
/// overrides.  Unset fields take per-scenario defaults.
struct ScenarioConfig {
    std::string scenario;
    std::optional<int> dim;
    std::optional<int> n;
    std::optional<double> box_halfwidth;
    std::optional<double> dt;
    std::optional<double> mu;
    std::optional<double> t_end;
    std::optional<double> store_every;
    unsigned long seed = 1;
    std::filesystem::path output_dir;
    int jobs = 1;
};

struct ScenarioOutcome {
    bool passed = false;
    std::vector<std::string> failures;
    std::filesystem::path dir;
};

const std::vector<std::string>& scenario_names();

/// Runs one scenario, writing manifest.json, CSV series, snapshots and plots
/// under its output directory.  Unknown names and invalid grids throw
/// ConfigError before anything runs.
ScenarioOutcome run_scenario(const ScenarioConfig& config);

nlohmann::json load_manifest(const std::filesystem::path& dir);

}  // namespace mcnls
