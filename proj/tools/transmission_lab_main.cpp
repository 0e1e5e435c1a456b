// Command-line front end. Links only the public C API.

#include <stdio.h>
#include <string.h>

#include "transmission_lab.h"

static void usage(void) {
    fprintf(stderr,
            "transmission_lab %s\n"
            "usage:\n"
            "  transmission_lab solve <config.json>\n"
            "  transmission_lab diagnose <field.csv> <config.json>\n"
            "  transmission_lab verify <suite> [output_dir]\n"
            "  transmission_lab sweep <config.json>\n"
            "\n"
            "suites: operators, oracles, solver, determinism, all\n",
            tlab_version());
}

static int run_with_config(const char* config_path, int (*runner)(tlab_experiment*),
                           const char* field_csv) {
    char err[512] = {0};
    tlab_experiment* exp = tlab_experiment_open(config_path, err, sizeof(err));
    if (!exp) {
        fprintf(stderr, "error: %s\n", err);
        return TLAB_BAD_INPUT;
    }
    int status;
    if (field_csv)
        status = tlab_diagnose(exp, field_csv);
    else
        status = runner(exp);
    const char* summary = tlab_experiment_summary(exp);
    if (summary && summary[0]) printf("%s\n", summary);
    if (status != TLAB_OK) fprintf(stderr, "error: %s\n", tlab_experiment_error(exp));
    tlab_experiment_close(exp);
    return status;
}

int main(int argc, char** argv) {
    if (argc < 2) {
        usage();
        return TLAB_BAD_INPUT;
    }
    const char* cmd = argv[1];

    if (strcmp(cmd, "solve") == 0 && argc == 3)
        return run_with_config(argv[2], tlab_solve, NULL);

    if (strcmp(cmd, "diagnose") == 0 && argc == 4)
        return run_with_config(argv[3], NULL, argv[2]);

    if (strcmp(cmd, "sweep") == 0 && argc == 3)
        return run_with_config(argv[2], tlab_sweep, NULL);

    if (strcmp(cmd, "verify") == 0 && (argc == 3 || argc == 4)) {
        char err[512] = {0};
        const int status = tlab_verify(argv[2], argc == 4 ? argv[3] : NULL, err, sizeof(err));
        if (status == TLAB_BAD_INPUT) fprintf(stderr, "error: %s\n", err);
        return status;
    }

    usage();
    return TLAB_BAD_INPUT;
}
