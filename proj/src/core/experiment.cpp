#include "core/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <thread>

#include "core/diagnostics.hpp"

namespace tlab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string center_key(const Point& c, int dim) {
    std::string key;
    for (int a = 0; a < dim; ++a) {
        if (a) key += ";";
        key += format_g17(c[static_cast<std::size_t>(a)]);
    }
    return key;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot open " + path.string() + " for writing");
    out << text;
}

struct ManifestBuilder {
    std::vector<std::string> files;
    std::vector<std::pair<std::string, std::string>> stages;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void stage(const std::string& name, const std::string& status) {
        stages.emplace_back(name, status);
    }

    /// Wall clock lives only here; all data artifacts stay byte-deterministic.
    void write(const fs::path& dir, const std::string& config_hash) {
        files.push_back("run_manifest.json");
        json doc;
        doc["config_hash"] = config_hash;
        doc["tool_version"] = "0.1.0";
        const auto elapsed = std::chrono::steady_clock::now() - start;
        doc["wall_clock_seconds"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        json stage_list = json::array();
        for (const auto& [name, status] : stages) stage_list.push_back({{"name", name}, {"status", status}});
        doc["stages"] = stage_list;
        doc["files"] = files;
        write_text(dir / "run_manifest.json", doc.dump(2) + "\n");
    }
};

std::string config_hash_hex(const ExperimentConfig& cfg) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(cfg.canonical_json)));
    return buf;
}

json solve_summary(const SolveResult& result) {
    json doc;
    doc["converged"] = result.converged;
    doc["outer_iters"] = result.outer_iters;
    doc["residual"] = result.residual;
    doc["omega_plus_cells"] = result.partition.plus_count;
    doc["omega_minus_cells"] = result.partition.minus_count;
    doc["fb_cells"] = static_cast<long>(result.partition.fb_nodes.size());
    doc["delta"] = result.delta_used;
    doc["initial_guess"] = result.initial_guess_used;
    doc["inner_iters"] = result.inner_iters;
    doc["residual_history"] = result.residual_history;
    if (!result.message.empty()) doc["message"] = result.message;
    return doc;
}

SolveResult solve_configured(const ExperimentConfig& cfg) {
    return solve(cfg.problem(), cfg.solver);
}

json run_diagnostics_on(const ExperimentConfig& cfg, const GridFunction& u, const fs::path& dir,
                        ManifestBuilder* manifest) {
    const DiagnosticsRequest& req = cfg.diagnostics;
    const int dim = u.grid.dim();
    const auto requested = [&](const char* name) {
        return std::find(req.run.begin(), req.run.end(), name) != req.run.end();
    };

    json report;
    report["grid"] = {{"dimension", dim},
                      {"nodes_per_axis", u.grid.nodes_per_axis()},
                      {"spacing", u.grid.spacing()}};
    report["c0"] = req.c0;
    report["band_delta"] = req.band_delta;

    const PartitionState part = update_partition(u, req.band_delta);

    const auto write_table = [&](const char* name, const json& rows,
                                 const std::string& header,
                                 const std::function<std::string(const json&)>& to_row) {
        std::string csv = header + "\n";
        for (const json& row : rows) csv += to_row(row) + "\n";
        const std::string file = std::string(name) + ".csv";
        write_text(dir / file, csv);
        if (manifest) manifest->files.push_back(file);
    };

    if (requested("density")) {
        json rows = json::array();
        bool a4 = true;
        double max_v = 0.0;
        for (const Point& c : req.centers) {
            for (double r : req.radii) {
                const FlaggedValue v = volume_density(u, c, r, req.band_delta);
                rows.push_back({{"center", center_key(c, dim)},
                                {"r", r},
                                {"value", v.value},
                                {"low_resolution", v.flag}});
                if (v.value > req.c0) a4 = false;
                max_v = std::max(max_v, v.value);
            }
        }
        report["density"] = rows;
        report["a4_holds_at_c0"] = a4;
        report["max_density"] = max_v;
        write_table("density", rows, "center,r,value", [](const json& row) {
            return row["center"].get<std::string>() + "," + format_g17(row["r"].get<double>()) +
                   "," + format_g17(row["value"].get<double>());
        });
    }

    if (requested("thickness")) {
        json rows = json::array();
        for (const Point& c : req.centers) {
            for (double r : req.radii) {
                const FlaggedValue v = thickness(u, c, r, req.band_delta);
                rows.push_back({{"center", center_key(c, dim)},
                                {"r", r},
                                {"value", v.value},
                                {"empty_set", v.flag}});
            }
        }
        report["thickness"] = rows;
        write_table("thickness", rows, "center,r,value", [](const json& row) {
            return row["center"].get<std::string>() + "," + format_g17(row["r"].get<double>()) +
                   "," + format_g17(row["value"].get<double>());
        });
    }

    if (requested("growth")) {
        json profiles = json::array();
        json rows = json::array();
        for (const Point& c : req.centers) {
            const GrowthProfile gp = growth_profile(u, c, req.growth_j0, req.growth_j1);
            json profile;
            profile["center"] = center_key(c, dim);
            profile["exponent"] = gp.exponent;
            profile["amplitude"] = gp.amplitude;
            profile["degenerate"] = gp.degenerate;
            json points = json::array();
            for (std::size_t i = 0; i < gp.j.size(); ++i) {
                points.push_back({{"j", gp.j[i]},
                                  {"r", gp.radius[i]},
                                  {"S", gp.sup[i]},
                                  {"ratio", gp.ratio[i]},
                                  {"in_M", static_cast<bool>(gp.in_m[i])}});
                rows.push_back(points.back());
            }
            profile["points"] = points;
            profiles.push_back(profile);
        }
        report["growth"] = profiles;
        write_table("growth", rows, "j,r,S,ratio,in_M", [](const json& row) {
            return std::to_string(row["j"].get<int>()) + "," + format_g17(row["r"].get<double>()) +
                   "," + format_g17(row["S"].get<double>()) + "," +
                   format_g17(row["ratio"].get<double>()) + "," +
                   std::string(row["in_M"].get<bool>() ? "1" : "0");
        });
    }

    if (requested("nondegeneracy") && !req.radii.empty()) {
        json rows = json::array();
        for (const Point& c : req.centers) {
            const NondegeneracyProfile np = nondegeneracy_profile(u, c, req.radii);
            for (std::size_t i = 0; i < np.radius.size(); ++i)
                rows.push_back({{"center", center_key(c, dim)},
                                {"r", np.radius[i]},
                                {"value", np.value[i]}});
        }
        report["nondegeneracy"] = rows;
        write_table("nondeg", rows, "center,r,value", [](const json& row) {
            return row["center"].get<std::string>() + "," + format_g17(row["r"].get<double>()) +
                   "," + format_g17(row["value"].get<double>());
        });
    }

    if (requested("c11")) {
        const StencilSet s = StencilSet::make(dim, cfg.solver.stencil_k);
        report["c11_seminorm"] = c11_seminorm(u, s);
    }

    if (requested("viscosity")) {
        const ViscosityPairCheck check =
            check_viscosity_pair(u, cfg.f1, cfg.f2, part, cfg.rhs);
        report["viscosity_pair"] = {{"violations", check.violations},
                                    {"checked", check.checked},
                                    {"worst_min_excess", check.worst_min_excess},
                                    {"worst_max_deficit", check.worst_max_deficit},
                                    {"tolerance", check.tolerance}};
    }

    if (requested("class_membership")) {
        const ClassMembership cm = class_membership(u, cfg.f1.bounds(), cfg.rhs, part);
        report["class_membership"] = {{"S_upper", cm.in_s_upper},
                                      {"S_lower", cm.in_s_lower},
                                      {"S", cm.in_s},
                                      {"S_star", cm.in_s_star},
                                      {"checked", cm.checked}};
    }

    if (requested("convexity")) report["convexity_gap"] = convexity_gap(u);
    if (requested("gradient_support"))
        report["gradient_support_violations"] = gradient_support_check(u, part);
    if (requested("fb_fraction")) report["fb_cell_fraction"] = fb_cell_fraction(part, u.grid);

    return report;
}

double max_error_vs_oracle(const ExperimentConfig& cfg, const GridFunction& u) {
    if (!cfg.oracle) return std::numeric_limits<double>::quiet_NaN();
    const Oracle& o = *cfg.oracle;
    double err = 0.0;
    const long count = u.grid.node_count();
    for (long i = 0; i < count; ++i)
        err = std::max(err, std::abs(u[i] - o(u.grid.coords(i))));
    return err;
}

}  // namespace

RunOutcome run_solve(const ExperimentConfig& cfg) {
    RunOutcome outcome;
    try {
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir);
        ManifestBuilder manifest;

        const SolveResult result = solve_configured(cfg);
        manifest.stage("solve", result.converged ? "converged" : "not_converged");

        write_field_csv((dir / "field.csv").string(), result.u);
        manifest.files.push_back("field.csv");

        json summary = solve_summary(result);
        if (cfg.oracle) summary["max_error_vs_oracle"] = max_error_vs_oracle(cfg, result.u);
        write_text(dir / "solve_result.json", summary.dump(2) + "\n");
        manifest.files.push_back("solve_result.json");

        if (!cfg.diagnostics.run.empty()) {
            const json report = run_diagnostics_on(cfg, result.u, dir, &manifest);
            write_text(dir / "diagnostics_report.json", report.dump(2) + "\n");
            manifest.files.push_back("diagnostics_report.json");
            manifest.stage("diagnostics", "done");
        }

        manifest.write(dir, config_hash_hex(cfg));
        outcome.summary_json = summary.dump(2);
        outcome.status = result.converged ? RunStatus::ok : RunStatus::no_convergence;
        if (!result.converged) outcome.error = result.message;
    } catch (const invalid_input& e) {
        outcome.status = RunStatus::bad_input;
        outcome.error = e.what();
    } catch (const std::exception& e) {
        outcome.status = RunStatus::internal_error;
        outcome.error = e.what();
    }
    return outcome;
}

RunOutcome run_diagnose(const ExperimentConfig& cfg, const std::string& field_csv_path) {
    RunOutcome outcome;
    try {
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir);
        ManifestBuilder manifest;

        const GridFunction u = read_field_csv(field_csv_path, cfg.grid);
        manifest.stage("load_field", "done");

        const json report = run_diagnostics_on(cfg, u, dir, &manifest);
        write_text(dir / "diagnostics_report.json", report.dump(2) + "\n");
        manifest.files.push_back("diagnostics_report.json");
        manifest.stage("diagnostics", "done");

        manifest.write(dir, config_hash_hex(cfg));
        outcome.summary_json = report.dump(2);
        outcome.status = RunStatus::ok;
    } catch (const invalid_input& e) {
        outcome.status = RunStatus::bad_input;
        outcome.error = e.what();
    } catch (const std::exception& e) {
        outcome.status = RunStatus::internal_error;
        outcome.error = e.what();
    }
    return outcome;
}

namespace {

struct SweepRun {
    int index = 0;
    std::string label;
    ExperimentConfig cfg;
};

std::vector<SweepRun> expand_sweep(const ExperimentConfig& base) {
    std::vector<int> nodes = base.sweep.nodes_per_axis;
    if (nodes.empty()) nodes.push_back(base.grid.nodes_per_axis());
    std::vector<double> c0s = base.sweep.c0;
    if (c0s.empty()) c0s.push_back(base.diagnostics.c0);
    std::vector<int> outers = base.sweep.outer_max_iters;
    if (outers.empty()) outers.push_back(base.solver.outer_max_iters);

    std::vector<SweepSpec::OperatorVariant> variants = base.sweep.operators;
    if (variants.empty()) variants.push_back({"base", base.f1, base.f2});

    std::vector<SweepRun> runs;
    int index = 0;
    for (const auto& variant : variants) {
        for (int n : nodes) {
            for (double c0 : c0s) {
                for (int outer : outers) {
                    SweepRun run;
                    run.index = index++;
                    run.label = variant.label;
                    run.cfg = base;
                    run.cfg.sweep = SweepSpec{};
                    run.cfg.grid = Grid(base.grid.dim(), base.grid.lower(), base.grid.upper(), n);
                    run.cfg.diagnostics.c0 = c0;
                    run.cfg.solver.outer_max_iters = outer;
                    run.cfg.f1 = variant.f1;
                    run.cfg.f2 = variant.f2;
                    char sub[32];
                    std::snprintf(sub, sizeof(sub), "run_%04d", run.index);
                    run.cfg.output_dir = (fs::path(base.output_dir) / sub).string();
                    runs.push_back(std::move(run));
                }
            }
        }
    }
    return runs;
}

int worker_cap() {
    if (const char* env = std::getenv("TRANSMISSION_LAB_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

RunOutcome run_sweep(const ExperimentConfig& cfg) {
    RunOutcome outcome;
    try {
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir);
        ManifestBuilder manifest;

        std::vector<SweepRun> runs = expand_sweep(cfg);
        struct RowData {
            bool converged = false;
            int outer_iters = 0;
            double residual = 0.0;
            double h = 0.0;
            int n = 0;
            double c0 = 0.0;
            int outer_max = 0;
            double error = std::numeric_limits<double>::quiet_NaN();
            std::string label;
        };
        std::vector<RowData> rows(runs.size());

        std::atomic<std::size_t> next{0};
        const int workers = std::min<int>(worker_cap(), static_cast<int>(runs.size()));
        const auto work = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= runs.size()) break;
                const SweepRun& run = runs[i];
                fs::create_directories(run.cfg.output_dir);
                const SolveResult result = solve_configured(run.cfg);
                write_field_csv((fs::path(run.cfg.output_dir) / "field.csv").string(), result.u);
                json summary = solve_summary(result);
                if (run.cfg.oracle)
                    summary["max_error_vs_oracle"] = max_error_vs_oracle(run.cfg, result.u);
                write_text(fs::path(run.cfg.output_dir) / "solve_result.json",
                           summary.dump(2) + "\n");
                RowData& row = rows[i];
                row.converged = result.converged;
                row.outer_iters = result.outer_iters;
                row.residual = result.residual;
                row.h = run.cfg.grid.spacing();
                row.n = run.cfg.grid.nodes_per_axis();
                row.c0 = run.cfg.diagnostics.c0;
                row.outer_max = run.cfg.solver.outer_max_iters;
                row.error = max_error_vs_oracle(run.cfg, result.u);
                row.label = run.label;
            }
        };
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }

        std::string csv =
            "run,label,nodes_per_axis,h,c0,outer_max_iters,converged,outer_iters,residual,"
            "max_error_vs_oracle\n";
        bool all_converged = true;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const RowData& row = rows[i];
            all_converged = all_converged && row.converged;
            csv += std::to_string(i) + "," + row.label + "," + std::to_string(row.n) + "," +
                   format_g17(row.h) + "," + format_g17(row.c0) + "," +
                   std::to_string(row.outer_max) + "," + (row.converged ? "1" : "0") + "," +
                   std::to_string(row.outer_iters) + "," + format_g17(row.residual) + "," +
                   format_g17(row.error) + "\n";
        }
        write_text(dir / "sweep.csv", csv);
        manifest.files.push_back("sweep.csv");
        manifest.stage("sweep", all_converged ? "converged" : "partial_failure");
        manifest.write(dir, config_hash_hex(cfg));

        json summary;
        summary["runs"] = runs.size();
        summary["all_converged"] = all_converged;
        outcome.summary_json = summary.dump(2);
        outcome.status = all_converged ? RunStatus::ok : RunStatus::no_convergence;
        if (!all_converged) outcome.error = "at least one sweep run did not converge";
    } catch (const invalid_input& e) {
        outcome.status = RunStatus::bad_input;
        outcome.error = e.what();
    } catch (const std::exception& e) {
        outcome.status = RunStatus::internal_error;
        outcome.error = e.what();
    }
    return outcome;
}

}  // namespace tlab
