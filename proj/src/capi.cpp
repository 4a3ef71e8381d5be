#include "bdlp.h"

#include <exception>
#include <string>

#include <json.hpp>

#include "bdlp/experiment.hpp"
#include "bdlp/version.hpp"
#include "bdlp/vlasov.hpp"

struct bdlp_experiment {
  bdlp::ExperimentConfig cfg;
};

struct bdlp_report {
  bdlp::RunOutcome outcome;
};

namespace {

thread_local std::string t_last_error;

int fail(int code, const std::string& message) {
  t_last_error = message;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return BDLP_OK;
  } catch (const nlohmann::json::exception& e) {
    return fail(BDLP_E_PARSE, e.what());
  } catch (const bdlp::RegimeError& e) {
    return fail(BDLP_E_REGIME, e.what());
  } catch (const bdlp::ConvergenceError& e) {
    return fail(BDLP_E_NO_CONVERGE, e.what());
  } catch (const bdlp::StabilityError& e) {
    return fail(BDLP_E_UNSTABLE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BDLP_E_INVALID_ARG, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(BDLP_E_IO, e.what());
  } catch (const std::exception& e) {
    return fail(BDLP_E_INTERNAL, e.what());
  } catch (...) {
    return fail(BDLP_E_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* bdlp_version(void) { return bdlp::kVersion; }

const char* bdlp_last_error(void) { return t_last_error.c_str(); }

int bdlp_experiment_open(const char* config_path, bdlp_experiment** out) {
  if (!config_path || !out) return fail(BDLP_E_INVALID_ARG, "null argument");
  return guarded(
      [&] { *out = new bdlp_experiment{bdlp::ExperimentConfig::from_file(config_path)}; });
}

int bdlp_experiment_parse(const char* json_text, bdlp_experiment** out) {
  if (!json_text || !out) return fail(BDLP_E_INVALID_ARG, "null argument");
  return guarded(
      [&] { *out = new bdlp_experiment{bdlp::ExperimentConfig::from_json_text(json_text)}; });
}

void bdlp_experiment_free(bdlp_experiment* exp) { delete exp; }

int bdlp_experiment_set_seed(bdlp_experiment* exp, unsigned long long seed) {
  if (!exp) return fail(BDLP_E_INVALID_ARG, "null experiment");
  exp->cfg.ibm.seed = seed;
  exp->cfg.ops.seed = seed;
  return BDLP_OK;
}

int bdlp_experiment_set_replicates(bdlp_experiment* exp, int replicates) {
  if (!exp || replicates < 1) return fail(BDLP_E_INVALID_ARG, "replicates must be >= 1");
  exp->cfg.ibm.replicates = replicates;
  return BDLP_OK;
}

int bdlp_experiment_set_eps_list(bdlp_experiment* exp, const double* eps, size_t count) {
  if (!exp || !eps || count == 0) return fail(BDLP_E_INVALID_ARG, "empty eps list");
  for (size_t i = 0; i < count; ++i)
    if (!(eps[i] > 0.0 && eps[i] <= 1.0))
      return fail(BDLP_E_INVALID_ARG, "eps values must lie in (0, 1]");
  exp->cfg.ibm.eps_list.assign(eps, eps + count);
  return BDLP_OK;
}

int bdlp_experiment_set_threads(bdlp_experiment* exp, int threads) {
  if (!exp || threads < 0) return fail(BDLP_E_INVALID_ARG, "threads must be >= 0");
  exp->cfg.threads = threads;
  return BDLP_OK;
}

int bdlp_experiment_allow_out_of_regime(bdlp_experiment* exp, int allow) {
  if (!exp) return fail(BDLP_E_INVALID_ARG, "null experiment");
  exp->cfg.override_regime = allow != 0;
  return BDLP_OK;
}

int bdlp_validate(const bdlp_experiment* exp, bdlp_validation* out) {
  if (!exp || !out) return fail(BDLP_E_INVALID_ARG, "null argument");
  return guarded([&] {
    const bdlp::ValidationReport rep = bdlp::validate_params(exp->cfg.model);
    out->bigmort_ok = rep.bigmort_ok ? 1 : 0;
    out->bigcomp_ok = rep.bigcomp_ok ? 1 : 0;
    out->c_lower_ok = rep.c_lower_ok ? 1 : 0;
    out->bigmort_margin = rep.bigmort_margin;
    out->bigcomp_margin = rep.bigcomp_margin;
    out->bigcomp_argmin = rep.bigcomp_argmin;
    out->c_lower_threshold = rep.c_lower_threshold;
    out->contraction_q = rep.contraction_q;
  });
}

int bdlp_run_validate(const bdlp_experiment* exp, bdlp_report** out) {
  if (!exp || !out) return fail(BDLP_E_INVALID_ARG, "null argument");
  return guarded([&] { *out = new bdlp_report{bdlp::run_validate(exp->cfg)}; });
}

int bdlp_run_vlasov(const bdlp_experiment* exp, const char* method, bdlp_report** out) {
  if (!exp || !method || !out) return fail(BDLP_E_INVALID_ARG, "null argument");
  return guarded([&] { *out = new bdlp_report{bdlp::run_vlasov(exp->cfg, method)}; });
}

int bdlp_run_ibm(const bdlp_experiment* exp, int binned, bdlp_report** out) {
  if (!exp || !out) return fail(BDLP_E_INVALID_ARG, "null argument");
  return guarded([&] { *out = new bdlp_report{bdlp::run_ibm(exp->cfg, binned != 0)}; });
}

int bdlp_run_sweep(const bdlp_experiment* exp, bdlp_report** out) {
  if (!exp || !out) return fail(BDLP_E_INVALID_ARG, "null argument");
  return guarded([&] { *out = new bdlp_report{bdlp::run_sweep(exp->cfg)}; });
}

int bdlp_run_ops(const bdlp_experiment* exp, const char* check, bdlp_report** out) {
  if (!exp || !check || !out) return fail(BDLP_E_INVALID_ARG, "null argument");
  return guarded([&] { *out = new bdlp_report{bdlp::run_ops(exp->cfg, check)}; });
}

int bdlp_report_ok(const bdlp_report* report) { return report && report->outcome.ok ? 1 : 0; }

const char* bdlp_report_summary(const bdlp_report* report) {
  return report ? report->outcome.summary.c_str() : "";
}

int bdlp_report_artifact_count(const bdlp_report* report) {
  return report ? static_cast<int>(report->outcome.artifacts.size()) : 0;
}

const char* bdlp_report_artifact_name(const bdlp_report* report, int index) {
  if (!report || index < 0 || index >= bdlp_report_artifact_count(report)) return nullptr;
  return report->outcome.artifacts[index].name.c_str();
}

const char* bdlp_report_artifact_text(const bdlp_report* report, int index) {
  if (!report || index < 0 || index >= bdlp_report_artifact_count(report)) return nullptr;
  return report->outcome.artifacts[index].text.c_str();
}

void bdlp_report_free(bdlp_report* report) { delete report; }

}  // extern "C"
