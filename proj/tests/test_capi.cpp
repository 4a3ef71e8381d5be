// Exercises the shared-library C interface exactly as an external caller
// would: only bdlp.h types, error codes checked on every call.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "bdlp.h"

namespace {

const char* kConfig = R"({
  "model": {"m": 40.0, "kappa_minus": 1.0, "kappa_plus": 1.0, "C": 8.0, "eps": 0.1,
            "L": 16.0, "M": 64,
            "a_minus": {"family": "gaussian", "scale": 1.0},
            "a_plus": {"family": "gaussian", "scale": 1.0}},
  "initial": {"kind": "constant", "value": 8.0},
  "solver": {"T": 0.02, "dt": 0.001, "tol": 1e-8, "max_iter": 400, "rk4_dt": 0.0005},
  "ibm": {"eps_list": [0.4], "replicates": 4, "snapshot_times": [0.0, 0.005], "seed": 5,
          "bin_width": 0.5, "pair_bins": 8, "pair_rmax": 3.0},
  "truncation": {"N": 3, "M_ops": 16},
  "ops": {"samples": 4, "lambda": 1.0, "seed": 7}
})";

struct Exp {
  bdlp_experiment* h = nullptr;
  ~Exp() { bdlp_experiment_free(h); }
};

struct Rep {
  bdlp_report* h = nullptr;
  ~Rep() { bdlp_report_free(h); }
};

bool has_artifact(const bdlp_report* r, const char* name) {
  for (int i = 0; i < bdlp_report_artifact_count(r); ++i)
    if (std::strcmp(bdlp_report_artifact_name(r, i), name) == 0) return true;
  return false;
}

}  // namespace

TEST_CASE("version and error text") {
  CHECK(std::string(bdlp_version()) == "0.1.0");
  bdlp_experiment* exp = nullptr;
  CHECK(bdlp_experiment_parse("{ not json", &exp) == BDLP_E_PARSE);
  CHECK(std::string(bdlp_last_error()).size() > 0);
  CHECK(bdlp_experiment_open("/nonexistent/path.json", &exp) == BDLP_E_INVALID_ARG);
  CHECK(bdlp_experiment_parse(nullptr, &exp) == BDLP_E_INVALID_ARG);
}

TEST_CASE("validation through the C surface") {
  Exp exp;
  REQUIRE(bdlp_experiment_parse(kConfig, &exp.h) == BDLP_OK);
  bdlp_validation v{};
  REQUIRE(bdlp_validate(exp.h, &v) == BDLP_OK);
  CHECK(v.bigmort_ok == 1);
  CHECK(v.bigcomp_ok == 1);
  CHECK(v.c_lower_ok == 1);
  CHECK(v.contraction_q == doctest::Approx(0.9));
  CHECK(v.bigmort_margin == doctest::Approx(4.0));
}

TEST_CASE("vlasov run and artifacts") {
  Exp exp;
  REQUIRE(bdlp_experiment_parse(kConfig, &exp.h) == BDLP_OK);

  Rep rep;
  REQUIRE(bdlp_run_vlasov(exp.h, "rk4", &rep.h) == BDLP_OK);
  CHECK(bdlp_report_ok(rep.h) == 1);
  CHECK(has_artifact(rep.h, "trajectory.csv"));
  CHECK(has_artifact(rep.h, "diagnostics.json"));
  const std::string csv = bdlp_report_artifact_text(rep.h, 0);
  CHECK(csv.rfind("# bdlp 0.1.0 config=", 0) == 0);

  bdlp_report* bad = nullptr;
  CHECK(bdlp_run_vlasov(exp.h, "simplectic", &bad) == BDLP_E_INVALID_ARG);
}

TEST_CASE("regime refusal surfaces as an error code") {
  std::string text = kConfig;
  const auto pos = text.find("\"m\": 40.0");
  text.replace(pos, 9, "\"m\": 0.5");
  Exp exp;
  REQUIRE(bdlp_experiment_parse(text.c_str(), &exp.h) == BDLP_OK);
  bdlp_report* rep = nullptr;
  CHECK(bdlp_run_vlasov(exp.h, "picard", &rep) == BDLP_E_REGIME);
  REQUIRE(bdlp_experiment_allow_out_of_regime(exp.h, 1) == BDLP_OK);
  Rep ok;
  CHECK(bdlp_run_vlasov(exp.h, "picard", &ok.h) == BDLP_OK);
}

TEST_CASE("ibm, sweep and ops runs") {
  Exp exp;
  REQUIRE(bdlp_experiment_parse(kConfig, &exp.h) == BDLP_OK);
  REQUIRE(bdlp_experiment_set_seed(exp.h, 99) == BDLP_OK);
  REQUIRE(bdlp_experiment_set_replicates(exp.h, 3) == BDLP_OK);
  const double eps[2] = {0.5, 0.25};
  REQUIRE(bdlp_experiment_set_eps_list(exp.h, eps, 2) == BDLP_OK);

  Rep ibm;
  REQUIRE(bdlp_run_ibm(exp.h, 1, &ibm.h) == BDLP_OK);
  CHECK(has_artifact(ibm.h, "snapshots.csv"));
  CHECK(has_artifact(ibm.h, "density.csv"));

  Rep sweep;
  REQUIRE(bdlp_run_sweep(exp.h, &sweep.h) == BDLP_OK);
  CHECK(has_artifact(sweep.h, "sweep.csv"));
  const std::string csv = bdlp_report_artifact_text(sweep.h, 0);
  CHECK(csv.find("eps,t,l2_error,stderr") != std::string::npos);
  CHECK(csv.find("0.5,") != std::string::npos);

  Rep ops;
  REQUIRE(bdlp_run_ops(exp.h, "chaos", &ops.h) == BDLP_OK);
  CHECK(bdlp_report_ok(ops.h) == 1);
  CHECK(has_artifact(ops.h, "ops_report.json"));

  bdlp_report* bad = nullptr;
  CHECK(bdlp_run_ops(exp.h, "everything", &bad) == BDLP_E_INVALID_ARG);

  // replicate override validation
  CHECK(bdlp_experiment_set_replicates(exp.h, 0) == BDLP_E_INVALID_ARG);
  const double bad_eps[1] = {1.5};
  CHECK(bdlp_experiment_set_eps_list(exp.h, bad_eps, 1) == BDLP_E_INVALID_ARG);
}
