// Command-line front end. Talks to the toolkit exclusively through the C API
// in bdlp.h; artifacts come back as named text blobs and are written under
// the --out directory.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bdlp.h"

namespace {

struct ExperimentGuard {
  bdlp_experiment* handle = nullptr;
  ~ExperimentGuard() { bdlp_experiment_free(handle); }
};

struct ReportGuard {
  bdlp_report* handle = nullptr;
  ~ReportGuard() { bdlp_report_free(handle); }
};

int open_experiment(const std::string& config_path, ExperimentGuard& exp) {
  const int rc = bdlp_experiment_open(config_path.c_str(), &exp.handle);
  if (rc != BDLP_OK) std::cerr << "error: " << bdlp_last_error() << "\n";
  return rc;
}

int write_artifacts(const bdlp_report* report, const std::string& out_dir) {
  if (out_dir.empty()) return 0;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << "\n";
    return 1;
  }
  const int count = bdlp_report_artifact_count(report);
  for (int i = 0; i < count; ++i) {
    const std::filesystem::path path =
        std::filesystem::path(out_dir) / bdlp_report_artifact_name(report, i);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << path << "\n";
      return 1;
    }
    out << bdlp_report_artifact_text(report, i);
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bdlp: spatial birth-and-death dynamics, its kinetic limit, and "
      "operator checks on finite truncations\n\n"
      "Config file (JSON): every key is optional and defaults to\n"
      "  model:      m=1 kappa_minus=1 kappa_plus=1 C=1 eps=1 L=16 M=64\n"
      "              a_minus/a_plus={family: gaussian|tophat|laplace, scale: 1}\n"
      "  initial:    {kind: constant, value: 1} | {kind: sinusoid, mean, amplitude, mode}\n"
      "              | {kind: table, path}\n"
      "  solver:     T=0.1 dt=1e-3 tol=1e-8 max_iter=400 restart_every=0 rk4_dt=1e-4\n"
      "  ibm:        eps_list=[0.4,0.2,0.1] replicates=200 snapshot_times=[0.025,0.05]\n"
      "              seed=20240801 bin_width=0.5 pair_bins=12 pair_rmax=3\n"
      "  truncation: N=3 M_ops=16\n"
      "  ops:        samples=100 lambda=1.0 seed=7\n"
      "Units: rates are 1/time, lengths share the unit of L, densities 1/length.\n"
      "BDLP_THREADS caps the number of parallel replicate workers."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string method = "rk4";
  std::string check = "all";
  std::string eps_csv;
  long long seed = -1;
  int reps = 0;
  int threads = 0;
  bool strict = false;
  bool override_regime = false;
  bool binned = false;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    auto* out_opt = cmd->add_option("--out", out_dir, "output directory for artifacts");
    if (needs_out) out_opt->required();
    cmd->add_option("--seed", seed, "override the base random seed");
    cmd->add_option("--threads", threads, "parallel replicate workers (0 = auto, "
                                          "capped by BDLP_THREADS)");
  };

  auto* validate_cmd = app.add_subcommand("validate", "evaluate the generator conditions "
                                                      "(violations are warnings, not errors)");
  add_common(validate_cmd, false);

  auto* vlasov_cmd = app.add_subcommand("vlasov", "solve the density equation");
  add_common(vlasov_cmd, true);
  vlasov_cmd->add_option("--method", method, "picard | rk4 | linear (default rk4)");
  vlasov_cmd->add_flag("--override-regime", override_regime,
                       "run picard outside the guaranteed contraction regime");

  auto* ibm_cmd = app.add_subcommand("ibm", "simulate the particle process");
  add_common(ibm_cmd, true);
  ibm_cmd->add_flag("--binned", binned, "write per-bin counts instead of raw positions");
  ibm_cmd->add_option("--reps", reps, "override the replicate count");

  auto* sweep_cmd = app.add_subcommand("sweep", "mean-field convergence sweep over eps");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--eps-list", eps_csv, "comma-separated eps values, e.g. 0.4,0.2,0.1");
  sweep_cmd->add_option("--reps", reps, "override the replicate count");

  auto* ops_cmd = app.add_subcommand("ops", "operator checks on the truncation");
  add_common(ops_cmd, true);
  ops_cmd->add_option("--check", check, "all | bounds | resolvent | chaos | adjoint");
  ops_cmd->add_flag("--strict", strict, "exit nonzero when a check fails");

  CLI11_PARSE(app, argc, argv);

  ExperimentGuard exp;
  if (open_experiment(config_path, exp) != BDLP_OK) return 2;
  if (seed >= 0) bdlp_experiment_set_seed(exp.handle, static_cast<unsigned long long>(seed));
  if (reps > 0 && bdlp_experiment_set_replicates(exp.handle, reps) != BDLP_OK) {
    std::cerr << "error: " << bdlp_last_error() << "\n";
    return 2;
  }
  if (threads > 0) bdlp_experiment_set_threads(exp.handle, threads);
  if (override_regime) bdlp_experiment_allow_out_of_regime(exp.handle, 1);
  if (!eps_csv.empty()) {
    std::vector<double> eps;
    std::string item;
    std::stringstream ss(eps_csv);
    while (std::getline(ss, item, ',')) eps.push_back(std::stod(item));
    if (bdlp_experiment_set_eps_list(exp.handle, eps.data(), eps.size()) != BDLP_OK) {
      std::cerr << "error: " << bdlp_last_error() << "\n";
      return 2;
    }
  }

  ReportGuard report;
  int rc = BDLP_OK;
  if (*validate_cmd) {
    rc = bdlp_run_validate(exp.handle, &report.handle);
  } else if (*vlasov_cmd) {
    rc = bdlp_run_vlasov(exp.handle, method.c_str(), &report.handle);
  } else if (*ibm_cmd) {
    rc = bdlp_run_ibm(exp.handle, binned ? 1 : 0, &report.handle);
  } else if (*sweep_cmd) {
    rc = bdlp_run_sweep(exp.handle, &report.handle);
  } else if (*ops_cmd) {
    rc = bdlp_run_ops(exp.handle, check.c_str(), &report.handle);
  }

  if (rc != BDLP_OK) {
    std::cerr << "error (" << rc << "): " << bdlp_last_error() << "\n";
    return 2;
  }

  std::cout << bdlp_report_summary(report.handle);
  if (write_artifacts(report.handle, out_dir) != 0) return 2;

  if (*ops_cmd && strict && !bdlp_report_ok(report.handle)) {
    std::cerr << "error: one or more checks failed (--strict)\n";
    return 1;
  }
  return 0;
}
