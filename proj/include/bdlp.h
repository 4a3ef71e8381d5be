/* C interface to the bdlp toolkit: spatial birth-and-death simulation, the
 * limiting nonlocal logistic equation, and operator checks on finite
 * truncations. All functions return BDLP_OK (0) or a negative error code;
 * bdlp_last_error() describes the most recent failure on the calling thread.
 * Handles are opaque and must be released with the matching _free call. */

#ifndef BDLP_H
#define BDLP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BDLP_OK 0
#define BDLP_E_INVALID_ARG (-1)
#define BDLP_E_PARSE (-2)
#define BDLP_E_IO (-3)
#define BDLP_E_NO_CONVERGE (-4)
#define BDLP_E_REGIME (-5)
#define BDLP_E_UNSTABLE (-6)
#define BDLP_E_INTERNAL (-99)

typedef struct bdlp_experiment bdlp_experiment;
typedef struct bdlp_report bdlp_report;

const char* bdlp_version(void);
const char* bdlp_last_error(void);

/* Experiment handles: a parsed configuration plus run-time overrides. */
int bdlp_experiment_open(const char* config_path, bdlp_experiment** out);
int bdlp_experiment_parse(const char* json_text, bdlp_experiment** out);
void bdlp_experiment_free(bdlp_experiment* exp);

int bdlp_experiment_set_seed(bdlp_experiment* exp, unsigned long long seed);
int bdlp_experiment_set_replicates(bdlp_experiment* exp, int replicates);
int bdlp_experiment_set_eps_list(bdlp_experiment* exp, const double* eps, size_t count);
int bdlp_experiment_set_threads(bdlp_experiment* exp, int threads);
int bdlp_experiment_allow_out_of_regime(bdlp_experiment* exp, int allow);

/* Parameter validation (report-only; never fails on condition violations). */
typedef struct bdlp_validation {
  int bigmort_ok;
  int bigcomp_ok;
  int c_lower_ok;
  double bigmort_margin;
  double bigcomp_margin;
  double bigcomp_argmin;
  double c_lower_threshold;
  double contraction_q;
} bdlp_validation;

int bdlp_validate(const bdlp_experiment* exp, bdlp_validation* out);

/* Runs. Each produces a report holding named text artifacts (CSV/JSON) that
 * the caller writes to disk, plus a one-line-per-item summary. */
int bdlp_run_validate(const bdlp_experiment* exp, bdlp_report** out);
/* method: "picard" | "rk4" | "linear" */
int bdlp_run_vlasov(const bdlp_experiment* exp, const char* method, bdlp_report** out);
/* binned != 0 writes per-bin counts instead of raw positions */
int bdlp_run_ibm(const bdlp_experiment* exp, int binned, bdlp_report** out);
int bdlp_run_sweep(const bdlp_experiment* exp, bdlp_report** out);
/* check: "all" | "bounds" | "resolvent" | "chaos" | "adjoint" */
int bdlp_run_ops(const bdlp_experiment* exp, const char* check, bdlp_report** out);

int bdlp_report_ok(const bdlp_report* report);
const char* bdlp_report_summary(const bdlp_report* report);
int bdlp_report_artifact_count(const bdlp_report* report);
const char* bdlp_report_artifact_name(const bdlp_report* report, int index);
const char* bdlp_report_artifact_text(const bdlp_report* report, int index);
void bdlp_report_free(bdlp_report* report);

#ifdef __cplusplus
}
#endif

#endif /* BDLP_H */
