#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tlab::verify {

struct CriterionResult {
    std::string id;
    std::string title;
    bool pass = false;
    std::string detail;  ///< semicolon-separated metrics, CSV-safe
};

struct SuiteResult {
    std::string suite;
    bool known_suite = false;
    bool all_pass = false;
    std::vector<CriterionResult> criteria;
};

/// Suites: "operators", "oracles", "solver", "determinism", "all".
std::vector<std::string> suite_names();

/// Runs a named suite; when `outdir` is non-empty, writes
/// verify_<suite>.json and verify_<suite>.csv there (no timestamps, so
/// repeated runs are byte-identical). When `log` is set, prints one
/// PASS/FAIL line per criterion.
SuiteResult run_suite(const std::string& name, const std::string& outdir = "",
                      std::ostream* log = nullptr);

}  // namespace tlab::verify
