#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "transmission_lab.h"

namespace fs = std::filesystem;

TEST_CASE("c api: version and open failures") {
    CHECK(std::strcmp(tlab_version(), "0.1.0") == 0);

    char err[256] = {0};
    CHECK(tlab_experiment_open("no_such_config.json", err, sizeof(err)) == nullptr);
    CHECK(err[0] != '\0');

    err[0] = '\0';
    CHECK(tlab_experiment_open_json("{broken", err, sizeof(err)) == nullptr);
    CHECK(err[0] != '\0');
}

TEST_CASE("c api: solve through the handle") {
    const std::string outdir = "test_capi_out";
    fs::remove_all(outdir);
    nlohmann::json doc;
    doc["grid"] = {{"dimension", 2}, {"lower", {-1, -1}}, {"upper", {1, 1}},
                   {"nodes_per_axis", 33}};
    doc["problem"] = {{"delta", 0.0}, {"boundary", {{"source", "oracle"}}}};
    doc["oracle"] = {{"kind", "radial"}};
    doc["output_dir"] = outdir;
    const std::string text = doc.dump();

    char err[256] = {0};
    tlab_experiment* exp = tlab_experiment_open_json(text.c_str(), err, sizeof(err));
    REQUIRE(exp != nullptr);
    CHECK(tlab_solve(exp) == TLAB_OK);
    const nlohmann::json summary = nlohmann::json::parse(tlab_experiment_summary(exp));
    CHECK(summary["converged"].get<bool>());
    CHECK(tlab_diagnose(exp, "missing.csv") == TLAB_BAD_INPUT);
    CHECK(std::string(tlab_experiment_error(exp)).size() > 0);
    tlab_experiment_close(exp);
    fs::remove_all(outdir);
}

TEST_CASE("c api: verify surface") {
    char err[256] = {0};
    CHECK(tlab_verify("no_such_suite", nullptr, err, sizeof(err)) == TLAB_BAD_INPUT);
    CHECK(err[0] != '\0');
}

TEST_CASE("c api: direct operator helpers") {
    const char* pucci = R"({"kind": "pucci_plus", "lambda": 1, "Lambda": 2})";
    const double m[4] = {1.0, 0.0, 0.0, -1.0};
    double value = 0.0;
    REQUIRE(tlab_operator_eval(pucci, m, 2, &value) == TLAB_OK);
    CHECK(value == doctest::Approx(1.0));

    const char* lap = R"({"kind": "linear", "lambda": 1, "Lambda": 1,
                           "matrices": [[[1, 0], [0, 1]]]})";
    double gamma = 0.0;
    REQUIRE(tlab_half_space_gamma(lap, &gamma) == TLAB_OK);
    CHECK(gamma == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(tlab_operator_eval("{\"kind\": \"bad\"}", m, 2, &value) == TLAB_BAD_INPUT);
    CHECK(tlab_operator_eval(nullptr, m, 2, &value) == TLAB_BAD_INPUT);
}
