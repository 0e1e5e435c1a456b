#include "core/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

namespace tlab {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw invalid_input("config: unknown key \"" + item.key() + "\" in " + where);
}

double get_number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw invalid_input(std::string("config: ") + key + " must be a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw invalid_input(std::string("config: ") + key + " must be an integer");
    return obj[key].get<int>();
}

SymMatrix parse_matrix(const json& rows) {
    if (!rows.is_array() || rows.empty())
        throw invalid_input("config: matrix must be a non-empty array of rows");
    const int d = static_cast<int>(rows.size());
    SymMatrix m(d);
    for (int i = 0; i < d; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != d)
            throw invalid_input("config: matrix rows must all have the same length");
        for (int j = 0; j <= i; ++j) {
            const double a = row[static_cast<std::size_t>(j)].get<double>();
            const double b = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].get<double>();
            if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
                throw invalid_input("config: matrix must be symmetric");
            m.set(i, j, 0.5 * (a + b));
        }
    }
    return m;
}

Grid parse_grid(const json& spec) {
    if (!spec.is_object()) throw invalid_input("config: grid must be an object");
    reject_unknown_keys(spec, {"dimension", "lower", "upper", "nodes_per_axis"}, "grid");
    const int dim = get_int(spec, "dimension", 2);
    const int n = get_int(spec, "nodes_per_axis", 65);
    Point lower{0, 0, 0}, upper{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        lower[static_cast<std::size_t>(a)] = -1.0;
        upper[static_cast<std::size_t>(a)] = 1.0;
    }
    const auto read_point = [&](const char* key, Point& out) {
        if (!spec.contains(key)) return;
        const json& arr = spec[key];
        if (!arr.is_array() || static_cast<int>(arr.size()) != dim)
            throw invalid_input(std::string("config: grid.") + key + " must list one value per axis");
        for (int a = 0; a < dim; ++a) out[static_cast<std::size_t>(a)] = arr[static_cast<std::size_t>(a)].get<double>();
    };
    read_point("lower", lower);
    read_point("upper", upper);
    return Grid(dim, lower, upper, n);
}

Oracle parse_oracle(const json& spec, int dim) {
    if (!spec.is_object()) throw invalid_input("config: oracle must be an object");
    reject_unknown_keys(spec, {"kind", "gamma", "C", "a", "rotation"}, "oracle");
    if (!spec.contains("kind")) throw invalid_input("config: oracle.kind is required");
    const std::string kind = spec["kind"].get<std::string>();
    if (kind == "radial") return radial_solution(dim);
    if (kind == "half_space")
        return half_space_solution(get_number(spec, "gamma", 1.0), get_number(spec, "C", 0.0));
    std::vector<double> a(static_cast<std::size_t>(dim), 0.0);
    if (spec.contains("a")) {
        const json& arr = spec["a"];
        if (!arr.is_array()) throw invalid_input("config: oracle.a must be an array");
        a.assign(arr.begin(), arr.end());
    }
    if (kind == "quadratic_p2" || kind == "custom_quadratic") {
        Oracle o = custom_quadratic(a, get_number(spec, "rotation", 0.0));
        o.kind = kind;
        return o;
    }
    throw invalid_input("config: unknown oracle kind \"" + kind + "\"");
}

SolverConfig parse_solver(const json& spec) {
    SolverConfig cfg;
    if (spec.is_null()) return cfg;
    if (!spec.is_object()) throw invalid_input("config: solver must be an object");
    reject_unknown_keys(spec,
                        {"outer_max_iters", "inner_max_iters", "linear_tol", "residual_tol",
                         "damping", "stencil_k", "pucci_frames", "initial_guess"},
                        "solver");
    cfg.outer_max_iters = get_int(spec, "outer_max_iters", cfg.outer_max_iters);
    cfg.inner_max_iters = get_int(spec, "inner_max_iters", cfg.inner_max_iters);
    cfg.linear_tol = get_number(spec, "linear_tol", cfg.linear_tol);
    cfg.residual_tol = get_number(spec, "residual_tol", cfg.residual_tol);
    cfg.damping = get_number(spec, "damping", cfg.damping);
    cfg.stencil_k = get_int(spec, "stencil_k", cfg.stencil_k);
    cfg.pucci_frames = get_int(spec, "pucci_frames", cfg.pucci_frames);
    if (spec.contains("initial_guess")) {
        const std::string g = spec["initial_guess"].get<std::string>();
        if (g == "plus") cfg.initial_guess = InitialGuess::plus;
        else if (g == "minus") cfg.initial_guess = InitialGuess::minus;
        else if (g == "zero") cfg.initial_guess = InitialGuess::zero;
        else throw invalid_input("config: initial_guess must be plus, minus or zero");
    }
    if (!(cfg.linear_tol > 0.0) || !(cfg.residual_tol > 0.0))
        throw invalid_input("config: tolerances must be positive");
    if (!(cfg.damping > 0.0) || cfg.damping > 1.0)
        throw invalid_input("config: damping must lie in (0, 1]");
    return cfg;
}

DiagnosticsRequest parse_diagnostics(const json& spec, int dim) {
    DiagnosticsRequest req;
    if (spec.is_null()) return req;
    if (!spec.is_object()) throw invalid_input("config: diagnostics must be an object");
    reject_unknown_keys(spec,
                        {"centers", "radii", "growth_j0", "growth_j1", "c0", "band_delta", "run"},
                        "diagnostics");
    if (spec.contains("centers")) {
        for (const json& c : spec["centers"]) {
            if (!c.is_array() || static_cast<int>(c.size()) != dim)
                throw invalid_input("config: diagnostics.centers entries must match the dimension");
            Point p{0, 0, 0};
            for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)].get<double>();
            req.centers.push_back(p);
        }
    }
    if (spec.contains("radii"))
        req.radii.assign(spec["radii"].begin(), spec["radii"].end());
    req.growth_j0 = get_int(spec, "growth_j0", req.growth_j0);
    req.growth_j1 = get_int(spec, "growth_j1", req.growth_j1);
    req.c0 = get_number(spec, "c0", req.c0);
    req.band_delta = get_number(spec, "band_delta", req.band_delta);
    if (spec.contains("run")) {
        static const std::set<std::string> known = {
            "density",  "thickness",        "growth",      "nondegeneracy", "c11",
            "viscosity", "convexity",        "gradient_support", "fb_fraction",
            "class_membership"};
        for (const json& name : spec["run"]) {
            const std::string s = name.get<std::string>();
            if (!known.count(s)) throw invalid_input("config: unknown diagnostic \"" + s + "\"");
            req.run.push_back(s);
        }
    }
    return req;
}

SweepSpec parse_sweep(const json& spec) {
    SweepSpec sweep;
    if (spec.is_null()) return sweep;
    if (!spec.is_object()) throw invalid_input("config: sweep must be an object");
    reject_unknown_keys(spec, {"nodes_per_axis", "c0", "outer_max_iters", "operators"}, "sweep");
    if (spec.contains("nodes_per_axis"))
        sweep.nodes_per_axis.assign(spec["nodes_per_axis"].begin(), spec["nodes_per_axis"].end());
    if (spec.contains("c0")) sweep.c0.assign(spec["c0"].begin(), spec["c0"].end());
    if (spec.contains("outer_max_iters"))
        sweep.outer_max_iters.assign(spec["outer_max_iters"].begin(),
                                     spec["outer_max_iters"].end());
    if (spec.contains("operators")) {
        for (const json& variant : spec["operators"]) {
            reject_unknown_keys(variant, {"label", "F1", "F2"}, "sweep.operators");
            SweepSpec::OperatorVariant v;
            v.label = variant.contains("label") ? variant["label"].get<std::string>() : "variant";
            if (!variant.contains("F1") || !variant.contains("F2"))
                throw invalid_input("config: sweep operator variants need F1 and F2");
            v.f1 = parse_operator(variant["F1"]);
            v.f2 = parse_operator(variant["F2"]);
            sweep.operators.push_back(std::move(v));
        }
    }
    return sweep;
}

}  // namespace

OperatorSpec parse_operator(const json& spec) {
    if (!spec.is_object()) throw invalid_input("config: operator must be an object");
    reject_unknown_keys(spec, {"kind", "lambda", "Lambda", "matrices"}, "operator");
    if (!spec.contains("kind")) throw invalid_input("config: operator.kind is required");
    const std::string kind = spec["kind"].get<std::string>();
    EllipticityBounds bounds{get_number(spec, "lambda", 1.0), get_number(spec, "Lambda", 1.0)};
    if (kind == "pucci_plus") return OperatorSpec::make_pucci_plus(bounds);
    if (kind == "pucci_minus") return OperatorSpec::make_pucci_minus(bounds);
    if (kind == "linear" || kind == "bellman") {
        if (!spec.contains("matrices") || !spec["matrices"].is_array() || spec["matrices"].empty())
            throw invalid_input("config: " + kind + " operator needs a non-empty matrices list");
        std::vector<SymMatrix> mats;
        for (const json& rows : spec["matrices"]) mats.push_back(parse_matrix(rows));
        if (kind == "linear") {
            if (mats.size() != 1)
                throw invalid_input("config: linear operator takes exactly one matrix");
            return OperatorSpec::make_linear(mats.front(), bounds);
        }
        return OperatorSpec::make_bellman(make_bellman_family(bounds, std::move(mats)));
    }
    throw invalid_input("config: unknown operator kind \"" + kind + "\"");
}

ProblemSpec ExperimentConfig::problem() const {
    ProblemSpec p;
    p.grid = grid;
    p.f1 = f1;
    p.f2 = f2;
    p.rhs = rhs;
    p.delta = delta;
    p.dirichlet = boundary_fn();
    return p;
}

std::function<double(const Point&)> ExperimentConfig::boundary_fn() const {
    if (boundary.kind == BoundarySource::Kind::oracle) {
        if (!oracle) throw invalid_input("config: boundary source is oracle but no oracle given");
        const Oracle o = *oracle;
        return [o](const Point& x) { return o(x); };
    }
    const double v = boundary.value;
    return [v](const Point&) { return v; };
}

namespace {
ExperimentConfig parse_config_doc(const json& doc);
}

ExperimentConfig parse_config_text(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw invalid_input(std::string("config: JSON parse error: ") + e.what());
    }
    try {
        return parse_config_doc(doc);
    } catch (const json::exception& e) {
        // wrongly-typed values surface as nlohmann type errors
        throw invalid_input(std::string("config: ") + e.what());
    }
}

namespace {

ExperimentConfig parse_config_doc(const json& doc) {
    if (!doc.is_object()) throw invalid_input("config: document must be a JSON object");
    reject_unknown_keys(doc,
                        {"grid", "problem", "oracle", "solver", "diagnostics", "output_dir",
                         "seed", "sweep"},
                        "document root");

    ExperimentConfig cfg;
    if (!doc.contains("grid")) throw invalid_input("config: grid is required");
    cfg.grid = parse_grid(doc["grid"]);
    const int dim = cfg.grid.dim();

    if (doc.contains("oracle")) cfg.oracle = parse_oracle(doc["oracle"], dim);

    const SymMatrix eye = SymMatrix::identity(dim);
    cfg.f1 = OperatorSpec::make_linear(eye, {1.0, 1.0});
    cfg.f2 = cfg.f1;
    cfg.boundary.kind =
        cfg.oracle ? BoundarySource::Kind::oracle : BoundarySource::Kind::constant;

    if (doc.contains("problem")) {
        const json& prob = doc["problem"];
        if (!prob.is_object()) throw invalid_input("config: problem must be an object");
        reject_unknown_keys(prob, {"F1", "F2", "rhs", "delta", "boundary"}, "problem");
        if (prob.contains("F1")) cfg.f1 = parse_operator(prob["F1"]);
        if (prob.contains("F2")) cfg.f2 = parse_operator(prob["F2"]);
        cfg.rhs = get_number(prob, "rhs", 1.0);
        if (prob.contains("delta")) {
            if (prob["delta"].is_string()) {
                if (prob["delta"].get<std::string>() != "auto")
                    throw invalid_input("config: delta must be a number >= 0 or \"auto\"");
                cfg.delta = -1.0;
            } else {
                cfg.delta = prob["delta"].get<double>();
                if (cfg.delta < 0.0) throw invalid_input("config: delta must be >= 0");
            }
        }
        if (prob.contains("boundary")) {
            const json& b = prob["boundary"];
            reject_unknown_keys(b, {"source", "value"}, "problem.boundary");
            const std::string source = b.contains("source") ? b["source"].get<std::string>() : "constant";
            if (source == "oracle") {
                if (!cfg.oracle)
                    throw invalid_input("config: boundary source oracle requires an oracle section");
                cfg.boundary.kind = BoundarySource::Kind::oracle;
            } else if (source == "constant") {
                cfg.boundary.kind = BoundarySource::Kind::constant;
                cfg.boundary.value = get_number(b, "value", 0.0);
            } else {
                throw invalid_input("config: boundary source must be oracle or constant");
            }
        }
        // a transmission problem is one pair of operators with shared bounds
        if (std::abs(cfg.f1.bounds().lambda - cfg.f2.bounds().lambda) > 1e-12 ||
            std::abs(cfg.f1.bounds().Lambda - cfg.f2.bounds().Lambda) > 1e-12)
            throw invalid_input("config: F1 and F2 must share the ellipticity bounds");
    }

    cfg.solver = parse_solver(doc.contains("solver") ? doc["solver"] : json());
    cfg.diagnostics = parse_diagnostics(doc.contains("diagnostics") ? doc["diagnostics"] : json(), dim);
    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    cfg.sweep = parse_sweep(doc.contains("sweep") ? doc["sweep"] : json());

    cfg.canonical_json = doc.dump();
    return cfg;
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

}  // namespace tlab
