#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace logshrink::cli {

struct SuiteResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string detail;  // first failure, if any
    bool passed() const { return failures == 0; }
};

struct SelfCheckOptions {
    std::string suite = "all";
    std::size_t trials = 0;  // 0 = per-suite default
    std::uint64_t seed = 12345;
};

const std::vector<std::string>& selfcheck_suites();

/// Throws std::invalid_argument for an unknown suite name.
std::vector<SuiteResult> run_selfcheck(const SelfCheckOptions& options);

}  // namespace logshrink::cli
