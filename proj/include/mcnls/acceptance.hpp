#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace mcnls {

struct AcceptanceOptions {
    unsigned long seed = 1;
    bool flip_mu_sign = false;  ///< fault-injection hook for the mutation check
    int override_n = 0;         ///< nonzero: force this grid resolution (validated)
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;        ///< measured values, human-readable
    double runtime_limit = 0;  ///< seconds; 0 = unlimited
};

/// All criterion ids, in order.
const std::vector<int>& criterion_ids();

/// Runs one criterion (1..13).  Throws ConfigError on invalid options before
/// any computation starts.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts);

/// Runs the whole suite in order, printing one pass/fail line per criterion
/// to stdout; returns the results.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// Machine-readable report (no timings, so identical runs serialize
/// identically).
nlohmann::json acceptance_report(const std::vector<CriterionResult>& results);

}  // namespace mcnls
