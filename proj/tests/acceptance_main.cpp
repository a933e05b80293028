#include <cstdio>
#include <cstring>
#include <string>

#include "mcnls/acceptance.hpp"

int main(int argc, char** argv) {
    mcnls::AcceptanceOptions opts;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) opts.seed = std::stoul(argv[++i]);
        if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::stoi(argv[++i]);
        if (!std::strcmp(argv[i], "--inject-mu-flip")) opts.flip_mu_sign = true;
    }
    if (only > 0) {
        auto r = mcnls::run_criterion(only, opts);
        std::printf("[%s] criterion %2d: %s (%.1fs)  %s\n", r.passed ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.detail.c_str());
        return r.passed ? 0 : 1;
    }
    auto results = mcnls::run_acceptance(opts);
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    std::printf("acceptance: %s\n", all ? "ALL CRITERIA PASS" : "FAILURES PRESENT");
    return all ? 0 : 1;
}
