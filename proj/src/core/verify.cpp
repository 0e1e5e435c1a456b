#include "core/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "core/diagnostics.hpp"
#include "core/oracles.hpp"
#include "core/solver.hpp"

namespace tlab::verify {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::duration<double>>(Clock::now() - start)
        .count();
}

std::string num(double v) { return format_g17(v); }

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += ";";
        detail += what + (ok ? "" : "[FAIL]");
    }
};

Grid square_grid(double lo, double hi, int n) {
    return Grid(2, Point{lo, lo, 0.0}, Point{hi, hi, 0.0}, n);
}

OperatorSpec laplacian_2d() {
    return OperatorSpec::make_linear(SymMatrix::identity(2), {1.0, 1.0});
}

// --- shared solve scenarios ------------------------------------------------

ProblemSpec radial_problem(int n) {
    ProblemSpec p;
    p.grid = square_grid(-1.0, 1.0, n);
    p.f1 = laplacian_2d();
    p.f2 = laplacian_2d();
    const Oracle oracle = radial_solution(2);
    p.dirichlet = [oracle](const Point& x) { return oracle(x); };
    p.rhs = 1.0;
    p.delta = 0.0;  // the zero set of the radial solution is a curve
    return p;
}

ProblemSpec half_space_problem(int n) {
    ProblemSpec p;
    p.grid = square_grid(-1.0, 1.0, n);
    p.f1 = laplacian_2d();
    p.f2 = laplacian_2d();
    const Oracle oracle = half_space_solution(1.0);
    p.dirichlet = [oracle](const Point& x) { return oracle(x); };
    p.rhs = 1.0;
    const double h = p.grid.spacing();
    p.delta = 0.25 * h * h;  // tight band so the fat zero set is recovered
    return p;
}

SolverConfig radial_solver_config() {
    SolverConfig cfg;
    cfg.initial_guess = InitialGuess::plus;
    return cfg;
}

SolverConfig half_space_solver_config() {
    SolverConfig cfg;
    // The all-plus warm start converges to a sign-changing strong solution of
    // the same data (the problem is not unique); growing the positivity set
    // from zero selects the half-space solution.
    cfg.initial_guess = InitialGuess::zero;
    cfg.outer_max_iters = 400;
    return cfg;
}

double max_error(const GridFunction& u, const Oracle& oracle) {
    double err = 0.0;
    const long count = u.grid.node_count();
    for (long i = 0; i < count; ++i)
        err = std::max(err, std::abs(u[i] - oracle(u.grid.coords(i))));
    return err;
}

/// Lazily computed fields shared by several criteria.
struct VerifyContext {
    std::map<int, SolveResult> half_space_solves;
    std::optional<SolveResult> radial_solve_result;
    std::optional<GridFunction> half_space_field_129;
    std::optional<double> radial_runtime;

    const SolveResult& half_space(int n) {
        auto it = half_space_solves.find(n);
        if (it == half_space_solves.end()) {
            const ProblemSpec p = half_space_problem(n);
            it = half_space_solves.emplace(n, solve(p, half_space_solver_config())).first;
        }
        return it->second;
    }

    const SolveResult& radial() {
        if (!radial_solve_result) {
            const Clock::time_point start = Clock::now();
            radial_solve_result = solve(radial_problem(129), radial_solver_config());
            radial_runtime = seconds_since(start);
        }
        return *radial_solve_result;
    }

    const GridFunction& half_space_field() {
        if (!half_space_field_129) {
            const Oracle oracle = half_space_solution(1.0);
            half_space_field_129 = sample(square_grid(-1.0, 1.0, 129),
                                          [oracle](const Point& x) { return oracle(x); });
        }
        return *half_space_field_129;
    }
};

// --- criteria ---------------------------------------------------------------

CriterionResult c01_operator_algebra() {
    const Clock::time_point start = Clock::now();
    Check check;
    const EllipticityBounds b{1.0, 2.0};
    const SymMatrix m_mixed = SymMatrix::diagonal({1.0, -1.0});
    check.require(std::abs(pucci_plus(m_mixed, b) - 1.0) <= 1e-12, "pucci_plus(diag(1,-1))=1");
    check.require(std::abs(pucci_minus(m_mixed, b) + 1.0) <= 1e-12, "pucci_minus(diag(1,-1))=-1");

    Rng rng(2024);
    double worst_duality = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int dim = (i % 2 == 0) ? 2 : 3;
        const SymMatrix m = random_symmetric(rng, dim, 2.0);
        worst_duality =
            std::max(worst_duality, std::abs(pucci_minus(m, b) + pucci_plus(-m, b)));
    }
    check.require(worst_duality <= 1e-12, "duality_max_err=" + num(worst_duality));

    std::vector<OperatorSpec> ops;
    ops.push_back(OperatorSpec::make_pucci_plus(b));
    ops.push_back(OperatorSpec::make_pucci_minus(b));
    for (int k = 0; k < 20; ++k) {
        ops.push_back(OperatorSpec::make_linear(random_with_spectrum(rng, 2, 1.0, 2.0), b));
        std::vector<SymMatrix> family;
        for (int j = 0; j < 5; ++j) family.push_back(random_with_spectrum(rng, 2, 1.0, 2.0));
        ops.push_back(OperatorSpec::make_bellman(make_bellman_family(b, std::move(family))));
    }
    double worst_sandwich = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
        const SymMatrix m = random_symmetric(rng, 2, 2.0);
        const double lo = pucci_minus(m, b), hi = pucci_plus(m, b);
        for (const OperatorSpec& op : ops) {
            const double v = evaluate(op, m);
            worst_sandwich = std::min({worst_sandwich, v - lo, hi - v});
        }
    }
    check.require(worst_sandwich >= -1e-12, "sandwich_margin=" + num(worst_sandwich));

    const double runtime = seconds_since(start);
    check.require(runtime < 1.0, "runtime_s=" + num(runtime));
    return {"C01", "operator algebra: hand values, duality, Pucci sandwich", check.pass,
            check.detail};
}

CriterionResult c02_gamma_solver() {
    Check check;
    const GammaResult lap = half_space_gamma(laplacian_2d());
    check.require(std::abs(lap.gamma - 1.0) <= 1e-12, "laplacian_gamma=" + num(lap.gamma));

    const EllipticityBounds b12{1.0, 2.0};
    const OperatorSpec pair = OperatorSpec::make_bellman(make_bellman_family(
        b12, {SymMatrix::diagonal({2.0, 1.0}), SymMatrix::diagonal({1.0, 2.0})}));
    const GammaResult bell = half_space_gamma(pair);
    check.require(std::abs(bell.gamma - 0.5) <= 1e-12, "bellman_gamma=" + num(bell.gamma));

    Rng rng(7);
    std::vector<OperatorSpec> ops;
    ops.push_back(OperatorSpec::make_pucci_plus(b12));
    ops.push_back(OperatorSpec::make_pucci_minus(b12));
    ops.push_back(OperatorSpec::make_pucci_plus({0.5, 3.0}));
    ops.push_back(OperatorSpec::make_pucci_minus({0.5, 3.0}));
    for (int k = 0; k < 10; ++k) {
        ops.push_back(OperatorSpec::make_linear(random_with_spectrum(rng, 2, 1.0, 2.0), b12));
        std::vector<SymMatrix> family;
        for (int j = 0; j < 4; ++j) family.push_back(random_with_spectrum(rng, 2, 1.0, 2.0));
        ops.push_back(OperatorSpec::make_bellman(make_bellman_family(b12, std::move(family))));
    }
    bool in_range = true;
    double worst_eq = 0.0;
    for (const OperatorSpec& op : ops) {
        const GammaResult r = half_space_gamma(op);
        const double lo = 1.0 / op.bounds().Lambda - 1e-10;
        const double hi = 1.0 / op.bounds().lambda + 1e-10;
        in_range = in_range && r.gamma >= lo && r.gamma <= hi;
        worst_eq = std::max(worst_eq, std::abs(r.equation_value - 1.0));
    }
    check.require(in_range, "gamma_in_[1/Lambda,1/lambda]");
    check.require(worst_eq <= 1e-12, "equation_max_err=" + num(worst_eq));
    return {"C02", "half-space gamma: Laplacian, Bellman pair, range", check.pass, check.detail};
}

CriterionResult c03_radial_solve(VerifyContext& ctx) {
    Check check;
    const SolveResult& result = ctx.radial();
    const Oracle oracle = radial_solution(2);
    const double h = result.u.grid.spacing();

    check.require(result.converged, "converged");
    const double err = max_error(result.u, oracle);
    check.require(err <= 1e-8, "max_err=" + num(err));
    double worst_fb = 0.0;
    for (long node : result.partition.fb_nodes) {
        const Point x = result.u.grid.coords(node);
        worst_fb = std::max(worst_fb, std::abs(std::hypot(x[0], x[1]) - 0.5));
    }
    check.require(worst_fb <= h + 1e-12, "fb_max_dist=" + num(worst_fb));
    check.require(result.residual <= 1e-8, "residual=" + num(result.residual));
    const ViscosityPairCheck pair = check_viscosity_pair(
        result.u, laplacian_2d(), laplacian_2d(), result.partition, 1.0);
    check.require(pair.violations == 0,
                  "viscosity_violations=" + std::to_string(pair.violations));
    check.require(ctx.radial_runtime.value_or(0.0) < 30.0,
                  "runtime_s=" + num(ctx.radial_runtime.value_or(0.0)));
    return {"C03", "radial oracle solve at h=1/64", check.pass, check.detail};
}

CriterionResult c04_half_space_solve(VerifyContext& ctx) {
    Check check;
    const Oracle oracle = half_space_solution(1.0);
    std::map<int, double> errors;
    for (int n : {33, 65, 129}) {
        const SolveResult& r = ctx.half_space(n);
        check.require(r.converged, "converged_n" + std::to_string(n));
        errors[n] = max_error(r.u, oracle);
    }
    check.require(errors[129] <= 5e-3, "max_err_h64=" + num(errors[129]));

    const SolveResult& fine = ctx.half_space(129);
    const Grid& g = fine.u.grid;
    const double h = g.spacing();
    bool one_layer = true;
    const long count = g.node_count();
    for (long i = 0; i < count; ++i) {
        if (g.is_boundary(i)) continue;
        const bool is_plus = fine.partition.labels[static_cast<std::size_t>(i)] == NodeLabel::plus;
        const double x1 = g.coords(i)[0];
        if (x1 > h + 1e-12 && !is_plus) one_layer = false;
        if (x1 < -h - 1e-12 && is_plus) one_layer = false;
    }
    check.require(one_layer, "omega_plus_matches_one_layer");

    check.require(errors[33] > errors[65] && errors[65] > errors[129],
                  "monotone_errors=" + num(errors[33]) + ">" + num(errors[65]) + ">" +
                      num(errors[129]));
    const double order = std::log2(errors[33] / errors[129]) / 2.0;
    check.require(order >= 1.0, "observed_order=" + num(order));
    return {"C04", "half-space oracle solve and mesh refinement", check.pass, check.detail};
}

CriterionResult c05_quadratic_growth() {
    Check check;
    const Oracle oracle = half_space_solution(1.0);
    const GridFunction u =
        sample(square_grid(-0.3, 0.3, 769), [oracle](const Point& x) { return oracle(x); });
    const Point origin{0, 0, 0};

    const GrowthProfile fit = growth_profile(u, origin, 2, 6);
    check.require(std::abs(fit.exponent - 2.0) <= 0.05, "exponent=" + num(fit.exponent));

    const GrowthProfile wide = growth_profile(u, origin, 2, 7);
    bool all_in_m = true;
    double worst_ratio_err = 0.0;
    for (std::size_t i = 0; i + 1 < wide.sup.size(); ++i) {
        all_in_m = all_in_m && wide.in_m[i];
        worst_ratio_err =
            std::max(worst_ratio_err, std::abs(wide.sup[i + 1] / wide.sup[i] - 0.25));
    }
    check.require(all_in_m, "all_j_in_M");
    check.require(worst_ratio_err <= 1e-12, "dyadic_ratio_err=" + num(worst_ratio_err));

    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (std::size_t i = 0; i < fit.ratio.size(); ++i) {
        rmin = std::min(rmin, fit.ratio[i]);
        rmax = std::max(rmax, fit.ratio[i]);
    }
    check.require(rmax / rmin <= 1.05, "ratio_spread=" + num(rmax / rmin));
    return {"C05", "quadratic growth of the half-space solution", check.pass, check.detail};
}

CriterionResult c06_density_necessity() {
    Check check;
    const Oracle oracle = radial_solution(2);
    const Grid grid(2, Point{0.25, -0.25, 0.0}, Point{0.75, 0.25, 0.0}, 1025);
    const GridFunction u = sample(grid, [oracle](const Point& x) { return oracle(x); });
    const Point center{0.5, 0.0, 0.0};

    const FlaggedValue v = volume_density(u, center, 1.0 / 32.0, 0.0);
    constexpr double half_pi = 1.5707963267948966;
    check.require(std::abs(v.value - half_pi) <= 0.05, "V_r=" + num(v.value));
    check.require(v.value > 0.1, "violates_c0_0.1");

    const GrowthProfile fit = growth_profile(u, center, 3, 6);
    check.require(std::abs(fit.exponent - 1.0) <= 0.1, "exponent=" + num(fit.exponent));
    return {"C06", "density hypothesis necessity (radial counterexample)", check.pass,
            check.detail};
}

CriterionResult c07_nondegeneracy(VerifyContext& ctx) {
    Check check;
    const GridFunction& u = ctx.half_space_field();
    const double h = u.grid.spacing();
    const NondegeneracyProfile profile =
        nondegeneracy_profile(u, Point{0, 0, 0}, {1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0});
    for (std::size_t i = 0; i < profile.radius.size(); ++i) {
        const double tol = 10.0 * h / profile.radius[i];
        check.require(std::abs(profile.value[i] - 0.5) <= tol,
                      "N(" + num(profile.radius[i]) + ")=" + num(profile.value[i]));
    }
    check.require(profile.min_value > 0.0, "constant_positive=" + num(profile.min_value));
    return {"C07", "non-degeneracy profile of the half-space solution", check.pass,
            check.detail};
}

CriterionResult c08_thickness_blowup(VerifyContext& ctx) {
    Check check;
    const GridFunction& u = ctx.half_space_field();
    const double h = u.grid.spacing();
    const Point origin{0, 0, 0};
    for (double r : {0.125, 0.25}) {
        const double tol = 4.0 * h / r;
        const FlaggedValue t = thickness(u, origin, r, 0.0);
        check.require(std::abs(t.value - 1.0) <= tol,
                      "delta_r(" + num(r) + ")=" + num(t.value));
        const int target_n = static_cast<int>(std::lround(2.0 * r / h)) + 1;
        const GridFunction zoom = blow_up(u, origin, r, target_n);
        const FlaggedValue t1 = thickness(zoom, origin, 1.0, 0.0);
        check.require(std::abs(t1.value - t.value) <= tol,
                      "blowup_identity_err=" + num(std::abs(t1.value - t.value)));
    }

    const Oracle p2 = custom_quadratic({0.25, 0.25});
    const GridFunction up2 =
        sample(square_grid(-1.0, 1.0, 129), [p2](const Point& x) { return p2(x); });
    const double r = 0.25;
    const FlaggedValue tp2 = thickness(up2, origin, r, 0.0);
    check.require(tp2.value <= 2.0 * up2.grid.spacing() / r, "p2_thickness=" + num(tp2.value));
    return {"C08", "thickness and blow-up identity", check.pass, check.detail};
}

CriterionResult c09_c11_seminorm(VerifyContext& ctx) {
    Check check;
    const StencilSet s = StencilSet::make(2, 8);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int n : {33, 65, 129}) {
        const double c11 = c11_seminorm(ctx.half_space(n).u, s);
        lo = std::min(lo, c11);
        hi = std::max(hi, c11);
        check.require(c11 >= 0.9 && c11 <= 1.5, "c11_n" + std::to_string(n) + "=" + num(c11));
    }
    check.require(hi - lo <= 0.2, "spread=" + num(hi - lo));
    return {"C09", "C^{1,1} seminorm bounded across refinements", check.pass, check.detail};
}

CriterionResult c10_viscosity_pair(VerifyContext& ctx) {
    Check check;
    const OperatorSpec lap = laplacian_2d();

    const Oracle radial = radial_solution(2);
    const GridFunction ur =
        sample(square_grid(-1.0, 1.0, 129), [radial](const Point& x) { return radial(x); });
    const ViscosityPairCheck r1 =
        check_viscosity_pair(ur, lap, lap, update_partition(ur, 0.0), 1.0);
    check.require(r1.violations == 0, "radial_oracle=" + std::to_string(r1.violations));

    const GridFunction& uh = ctx.half_space_field();
    const ViscosityPairCheck r2 =
        check_viscosity_pair(uh, lap, lap, update_partition(uh, 0.0), 1.0);
    check.require(r2.violations == 0, "half_space_oracle=" + std::to_string(r2.violations));

    const SolveResult& rs = ctx.radial();
    const ViscosityPairCheck r3 = check_viscosity_pair(rs.u, lap, lap, rs.partition, 1.0);
    check.require(r3.violations == 0, "radial_solve=" + std::to_string(r3.violations));

    const SolveResult& hs = ctx.half_space(129);
    const ViscosityPairCheck r4 = check_viscosity_pair(hs.u, lap, lap, hs.partition, 1.0);
    check.require(r4.violations == 0, "half_space_solve=" + std::to_string(r4.violations));
    return {"C10", "viscosity pair holds away from the interface", check.pass, check.detail};
}

CriterionResult c11_convexity(VerifyContext& ctx) {
    Check check;
    const SolveResult& hs = ctx.half_space(129);
    const double gap = convexity_gap(hs.u);
    check.require(gap <= 10.0 * hs.u.grid.spacing(), "half_space_gap=" + num(gap));

    const Oracle control = custom_quadratic({-1.0, -1.0});
    const GridFunction uc =
        sample(square_grid(-1.0, 1.0, 65), [control](const Point& x) { return control(x); });
    const double control_gap = convexity_gap(uc);
    check.require(std::abs(control_gap - 2.0) <= 1e-10, "control_gap=" + num(control_gap));
    return {"C11", "convexity gap: solver output and non-convex control", check.pass,
            check.detail};
}

SuiteResult run_suite_impl(const std::string& name, const std::string& outdir,
                           std::ostream* log);

CriterionResult c12_determinism() {
    Check check;
    const fs::path dir1 = fs::path("verify_det_run1");
    const fs::path dir2 = fs::path("verify_det_run2");
    fs::create_directories(dir1);
    fs::create_directories(dir2);
    run_suite_impl("oracles", dir1.string(), nullptr);
    run_suite_impl("oracles", dir2.string(), nullptr);

    const auto read_bytes = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    for (const char* file : {"verify_oracles.json", "verify_oracles.csv"}) {
        const bool same = read_bytes(dir1 / file) == read_bytes(dir2 / file);
        check.require(same, std::string(file) + "_identical");
    }
    fs::remove_all(dir1);
    fs::remove_all(dir2);

    const ProblemSpec p = radial_problem(65);
    const SolveResult a = solve(p, radial_solver_config());
    const SolveResult b = solve(p, radial_solver_config());
    check.require(a.u.values == b.u.values, "repeated_solve_bitwise_identical");
    return {"C12", "determinism of verify artifacts and solves", check.pass, check.detail};
}

std::vector<CriterionResult> run_criteria(const std::string& suite, VerifyContext& ctx) {
    std::vector<CriterionResult> out;
    const bool all = suite == "all";
    if (all || suite == "operators") {
        out.push_back(c01_operator_algebra());
        out.push_back(c02_gamma_solver());
    }
    if (all || suite == "solver") {
        out.push_back(c03_radial_solve(ctx));
        out.push_back(c04_half_space_solve(ctx));
        out.push_back(c09_c11_seminorm(ctx));
        out.push_back(c10_viscosity_pair(ctx));
        out.push_back(c11_convexity(ctx));
    }
    if (all || suite == "oracles") {
        out.push_back(c05_quadratic_growth());
        out.push_back(c06_density_necessity());
        out.push_back(c07_nondegeneracy(ctx));
        out.push_back(c08_thickness_blowup(ctx));
    }
    if (all || suite == "determinism") {
        out.push_back(c12_determinism());
    }
    return out;
}

SuiteResult run_suite_impl(const std::string& name, const std::string& outdir,
                           std::ostream* log) {
    SuiteResult result;
    result.suite = name;
    const auto names = suite_names();
    result.known_suite = std::find(names.begin(), names.end(), name) != names.end();
    if (!result.known_suite) return result;

    VerifyContext ctx;
    result.criteria = run_criteria(name, ctx);
    result.all_pass = true;
    for (const CriterionResult& c : result.criteria) {
        result.all_pass = result.all_pass && c.pass;
        if (log)
            *log << (c.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << "  ("
                 << c.detail << ")\n";
    }
    if (log) *log << (result.all_pass ? "all criteria passed\n" : "criteria FAILED\n");

    if (!outdir.empty()) {
        fs::create_directories(outdir);
        nlohmann::json doc;
        doc["suite"] = name;
        doc["all_pass"] = result.all_pass;
        nlohmann::json list = nlohmann::json::array();
        for (const CriterionResult& c : result.criteria)
            list.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"detail", c.detail}});
        doc["criteria"] = list;
        std::ofstream json_out(fs::path(outdir) / ("verify_" + name + ".json"),
                               std::ios::binary);
        json_out << doc.dump(2) << "\n";

        std::ofstream csv_out(fs::path(outdir) / ("verify_" + name + ".csv"), std::ios::binary);
        csv_out << "criterion,pass,detail\n";
        for (const CriterionResult& c : result.criteria)
            csv_out << c.id << "," << (c.pass ? 1 : 0) << "," << c.detail << "\n";
    }
    return result;
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"operators", "oracles", "solver", "determinism", "all"};
}

SuiteResult run_suite(const std::string& name, const std::string& outdir, std::ostream* log) {
    return run_suite_impl(name, outdir, log);
}

}  // namespace tlab::verify
