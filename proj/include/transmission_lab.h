#ifndef TRANSMISSION_LAB_H
#define TRANSMISSION_LAB_H

/*
 * C interface to the transmission-lab solver and diagnostics library.
 *
 * An experiment is configured by a single JSON document (see README for the
 * schema), opened into an opaque handle, and driven through the run
 * functions. Status codes double as process exit codes in the CLI.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct tlab_experiment tlab_experiment;

typedef enum tlab_status {
    TLAB_OK = 0,
    TLAB_VERIFY_FAILED = 1,   /* a verification suite reported failures */
    TLAB_BAD_INPUT = 2,       /* config/CSV parse error, unknown suite */
    TLAB_NO_CONVERGENCE = 3,  /* solver hit the iteration cap; artifacts written */
    TLAB_INTERNAL_ERROR = 4
} tlab_status;

/* Library version string, e.g. "0.1.0". */
const char* tlab_version(void);

/*
 * Opens an experiment from a config file or a JSON string. Returns NULL on
 * failure and, when err is non-NULL, stores a message in err[0..errlen).
 */
tlab_experiment* tlab_experiment_open(const char* config_path, char* err, size_t errlen);
tlab_experiment* tlab_experiment_open_json(const char* json_text, char* err, size_t errlen);
void tlab_experiment_close(tlab_experiment* exp);

/* Last error message for this handle; empty string when none. */
const char* tlab_experiment_error(const tlab_experiment* exp);

/* Summary JSON of the most recent run; empty string before any run. */
const char* tlab_experiment_summary(const tlab_experiment* exp);

/* Solve the configured problem; artifacts land in the config's output_dir. */
int tlab_solve(tlab_experiment* exp);

/* Load a field dump and run the configured diagnostics on it. */
int tlab_diagnose(tlab_experiment* exp, const char* field_csv_path);

/* Run the sweep axes listed in the config. */
int tlab_sweep(tlab_experiment* exp);

/*
 * Runs a verification suite ("operators", "oracles", "solver",
 * "determinism", "all"). A pass/fail line per criterion is printed to
 * stdout. When output_dir is non-NULL, verify_<suite>.{json,csv} are
 * written there. Returns TLAB_OK, TLAB_VERIFY_FAILED, or TLAB_BAD_INPUT
 * for an unknown suite name.
 */
int tlab_verify(const char* suite, const char* output_dir, char* err, size_t errlen);

/*
 * Direct operator evaluation. operator_json follows the config schema, e.g.
 * {"kind":"pucci_plus","lambda":1,"Lambda":2}. sym is the full row-major
 * dim x dim matrix (symmetrized internally). Returns a tlab_status.
 */
int tlab_operator_eval(const char* operator_json, const double* sym, int dim, double* out);

/* Solves F(gamma e1 x e1) = 1 for the configured operator. */
int tlab_half_space_gamma(const char* operator_json, double* out_gamma);

#ifdef __cplusplus
}
#endif

#endif /* TRANSMISSION_LAB_H */
