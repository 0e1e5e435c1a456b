#pragma once

#include <string>

#include "core/config.hpp"

namespace tlab {

/// Status values double as CLI exit codes.
enum class RunStatus : int {
    ok = 0,
    verify_failed = 1,
    bad_input = 2,
    no_convergence = 3,
    internal_error = 4,
};

struct RunOutcome {
    RunStatus status = RunStatus::ok;
    std::string summary_json;  ///< machine-readable summary of the run
    std::string error;         ///< human-readable message when status != ok
};

/// Solves the configured problem; writes field.csv, solve_result.json and
/// run_manifest.json into the config's output directory.
RunOutcome run_solve(const ExperimentConfig& cfg);

/// Loads a field dump (validated against the configured grid) and computes the
/// requested diagnostics; writes diagnostics_report.json plus the CSV tables.
RunOutcome run_diagnose(const ExperimentConfig& cfg, const std::string& field_csv_path);

/// Runs the cross product of the sweep axes, one subdirectory per run, and
/// emits a combined sweep.csv. Worker count is capped by the
/// TRANSMISSION_LAB_WORKERS environment variable.
RunOutcome run_sweep(const ExperimentConfig& cfg);

}  // namespace tlab
