#include "transmission_lab.h"

#include <cstring>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>

#include "core/config.hpp"
#include "core/experiment.hpp"
#include "core/verify.hpp"

struct tlab_experiment {
    tlab::ExperimentConfig config;
    std::string last_error;
    std::string last_summary;
};

namespace {

void copy_message(const std::string& message, char* err, size_t errlen) {
    if (!err || errlen == 0) return;
    const size_t n = std::min(message.size(), errlen - 1);
    std::memcpy(err, message.data(), n);
    err[n] = '\0';
}

int store_outcome(tlab_experiment* exp, const tlab::RunOutcome& outcome) {
    exp->last_error = outcome.error;
    exp->last_summary = outcome.summary_json;
    return static_cast<int>(outcome.status);
}

}  // namespace

extern "C" {

const char* tlab_version(void) { return "0.1.0"; }

tlab_experiment* tlab_experiment_open(const char* config_path, char* err, size_t errlen) {
    if (!config_path) {
        copy_message("config path is null", err, errlen);
        return nullptr;
    }
    try {
        auto* exp = new tlab_experiment;
        exp->config = tlab::parse_config_file(config_path);
        return exp;
    } catch (const std::exception& e) {
        copy_message(e.what(), err, errlen);
        return nullptr;
    }
}

tlab_experiment* tlab_experiment_open_json(const char* json_text, char* err, size_t errlen) {
    if (!json_text) {
        copy_message("config text is null", err, errlen);
        return nullptr;
    }
    try {
        auto* exp = new tlab_experiment;
        exp->config = tlab::parse_config_text(json_text);
        return exp;
    } catch (const std::exception& e) {
        copy_message(e.what(), err, errlen);
        return nullptr;
    }
}

void tlab_experiment_close(tlab_experiment* exp) { delete exp; }

const char* tlab_experiment_error(const tlab_experiment* exp) {
    return exp ? exp->last_error.c_str() : "null experiment";
}

const char* tlab_experiment_summary(const tlab_experiment* exp) {
    return exp ? exp->last_summary.c_str() : "";
}

int tlab_solve(tlab_experiment* exp) {
    if (!exp) return TLAB_INTERNAL_ERROR;
    return store_outcome(exp, tlab::run_solve(exp->config));
}

int tlab_diagnose(tlab_experiment* exp, const char* field_csv_path) {
    if (!exp) return TLAB_INTERNAL_ERROR;
    if (!field_csv_path) {
        exp->last_error = "field csv path is null";
        return TLAB_BAD_INPUT;
    }
    return store_outcome(exp, tlab::run_diagnose(exp->config, field_csv_path));
}

int tlab_sweep(tlab_experiment* exp) {
    if (!exp) return TLAB_INTERNAL_ERROR;
    return store_outcome(exp, tlab::run_sweep(exp->config));
}

int tlab_verify(const char* suite, const char* output_dir, char* err, size_t errlen) {
    if (!suite) {
        copy_message("suite name is null", err, errlen);
        return TLAB_BAD_INPUT;
    }
    try {
        const tlab::verify::SuiteResult result = tlab::verify::run_suite(
            suite, output_dir ? output_dir : "", &std::cout);
        if (!result.known_suite) {
            copy_message("unknown suite \"" + std::string(suite) + "\"", err, errlen);
            return TLAB_BAD_INPUT;
        }
        return result.all_pass ? TLAB_OK : TLAB_VERIFY_FAILED;
    } catch (const std::exception& e) {
        copy_message(e.what(), err, errlen);
        return TLAB_INTERNAL_ERROR;
    }
}

int tlab_operator_eval(const char* operator_json, const double* sym, int dim, double* out) {
    if (!operator_json || !sym || !out || dim < 1) return TLAB_BAD_INPUT;
    try {
        const tlab::OperatorSpec op =
            tlab::parse_operator(nlohmann::json::parse(operator_json));
        tlab::SymMatrix m(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j <= i; ++j)
                m.set(i, j, 0.5 * (sym[i * dim + j] + sym[j * dim + i]));
        *out = tlab::evaluate(op, m);
        return TLAB_OK;
    } catch (const std::exception&) {
        return TLAB_BAD_INPUT;
    }
}

int tlab_half_space_gamma(const char* operator_json, double* out_gamma) {
    if (!operator_json || !out_gamma) return TLAB_BAD_INPUT;
    try {
        const tlab::OperatorSpec op =
            tlab::parse_operator(nlohmann::json::parse(operator_json));
        *out_gamma = tlab::half_space_gamma(op).gamma;
        return TLAB_OK;
    } catch (const std::exception&) {
        return TLAB_BAD_INPUT;
    }
}

}  // extern "C"
