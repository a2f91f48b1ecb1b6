#ifndef DSLAB_DSLAB_H
#define DSLAB_DSLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DSL_API __declspec(dllexport)
#else
#define DSL_API __attribute__((visibility("default")))
#endif

typedef enum dsl_status {
    DSL_OK = 0,
    DSL_ERR_NULL = 1,
    DSL_ERR_DOMAIN = 2,
    DSL_ERR_PARSE = 3,
    DSL_ERR_INTEGRATION = 4,
    DSL_ERR_SEEDING = 5,
    DSL_ERR_IO = 6,
    DSL_ERR_RANGE = 7,
    DSL_ERR_INTERNAL = 8
} dsl_status;

typedef struct dsl_scenario dsl_scenario;
typedef struct dsl_report dsl_report;

typedef struct dsl_verdict_info {
    const char* name;     /* owned by the report */
    double statistic;
    double threshold;
    int pass;
    const char* ensemble; /* owned by the report */
} dsl_verdict_info;

/* Message for the last failing call on this thread; empty after success. */
DSL_API const char* dsl_last_error(void);
DSL_API const char* dsl_status_name(dsl_status status);
DSL_API const char* dsl_version(void);

/* Scenarios */
DSL_API dsl_status dsl_scenario_parse(const char* text, dsl_scenario** out);
DSL_API dsl_status dsl_scenario_load(const char* path, dsl_scenario** out);
DSL_API dsl_status dsl_scenario_default(dsl_scenario** out);
DSL_API void dsl_scenario_free(dsl_scenario* scn);
DSL_API dsl_status dsl_scenario_hash(const dsl_scenario* scn, uint64_t* out);
DSL_API dsl_status dsl_scenario_set_seed(dsl_scenario* scn, uint64_t seed);
DSL_API dsl_status dsl_scenario_set_grid_refine(dsl_scenario* scn, int factor);
/* Comma separated target names; replaces the configured list. */
DSL_API dsl_status dsl_scenario_set_targets(dsl_scenario* scn, const char* targets);
/* Output directory from the config, "" when unset; owned by the scenario. */
DSL_API const char* dsl_scenario_out_dir(const dsl_scenario* scn);
DSL_API size_t dsl_target_count(void);
DSL_API const char* dsl_target_name(size_t index);

/* Runs */
DSL_API dsl_status dsl_scenario_run(const dsl_scenario* scn, dsl_report** out);
DSL_API void dsl_report_free(dsl_report* rep);
DSL_API dsl_status dsl_report_all_pass(const dsl_report* rep, int* out);
DSL_API size_t dsl_report_verdict_count(const dsl_report* rep);
DSL_API dsl_status dsl_report_verdict(const dsl_report* rep, size_t index, dsl_verdict_info* out);
/* Strings are owned by the report and stay valid until dsl_report_free. */
DSL_API const char* dsl_report_json(const dsl_report* rep);
DSL_API const char* dsl_report_summary(const dsl_report* rep);
DSL_API dsl_status dsl_report_write(const dsl_report* rep, const char* dir);

/* Standalone checks */
/* Max error relative to the Bessel modulus on [tau_seed, 1] for the frozen toy mode. */
DSL_API dsl_status dsl_bessel_check(double lambda, double tau_seed, double* max_err_j, double* max_err_y);
DSL_API dsl_status dsl_discrete_gronwall(const double* b, const double* c, size_t n, double* out);
DSL_API dsl_status dsl_gronwall_verify(uint64_t seed, int count, int k_max, int points, double b_scale,
                                       int* violations, double* worst_defect);

#ifdef __cplusplus
}
#endif

#endif
