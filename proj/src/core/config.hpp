#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "core/oracles.hpp"
#include "core/solver.hpp"

namespace tlab {

struct BoundarySource {
    enum class Kind { oracle, constant } kind = Kind::constant;
    double value = 0.0;  ///< for constant
};

struct DiagnosticsRequest {
    std::vector<Point> centers;
    std::vector<double> radii;
    int growth_j0 = 2;
    int growth_j1 = 6;
    double c0 = 0.1;          ///< density threshold reported against
    double band_delta = 0.0;  ///< |u| <= band_delta defines the zero set
    std::vector<std::string> run;  ///< which diagnostics to compute
};

struct SweepSpec {
    std::vector<int> nodes_per_axis;
    std::vector<double> c0;
    std::vector<int> outer_max_iters;
    struct OperatorVariant {
        std::string label;
        OperatorSpec f1;
        OperatorSpec f2;
    };
    std::vector<OperatorVariant> operators;

    bool empty() const {
        return nodes_per_axis.empty() && c0.empty() && outer_max_iters.empty() &&
               operators.empty();
    }
};

/// One JSON document describing a whole experiment. Unknown keys anywhere in
/// the document are rejected.
struct ExperimentConfig {
    Grid grid;
    OperatorSpec f1;
    OperatorSpec f2;
    double rhs = 1.0;
    double delta = -1.0;  ///< negative = auto (h^2 * box diameter)
    BoundarySource boundary;
    std::optional<Oracle> oracle;
    SolverConfig solver;
    DiagnosticsRequest diagnostics;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    SweepSpec sweep;

    std::string canonical_json;  ///< re-serialized config, hashed into manifests

    ProblemSpec problem() const;
    /// Boundary/comparison callable: the oracle when selected, else constant.
    std::function<double(const Point&)> boundary_fn() const;
};

/// Parses and validates a config document. Throws invalid_input with a
/// description on malformed JSON, unknown keys, or bad values.
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);

/// Operator spec ingestion shared with the C API:
/// {"kind": "pucci_plus"|"pucci_minus"|"bellman"|"linear",
///  "lambda": ..., "Lambda": ..., "matrices": [[[...]]] }.
OperatorSpec parse_operator(const nlohmann::json& spec);

}  // namespace tlab
