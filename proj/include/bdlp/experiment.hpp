#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bdlp/estimators.hpp"
#include "bdlp/params.hpp"
#include "bdlp/vlasov.hpp"

namespace bdlp {

struct InitialCondition {
  enum class Kind { constant, sinusoid, table };
  Kind kind = Kind::constant;
  double value = 1.0;       // constant
  double mean = 1.0;        // sinusoid
  double amplitude = 0.0;   // sinusoid
  int mode = 1;             // sinusoid
  std::string table_path;   // table

  Field realize(const GridSpec& grid) const;
};

struct SolverSettings {
  double horizon = 0.1;
  double dt = 1e-3;
  double tol = 1e-8;
  int max_iter = 400;
  double restart_every = 0.0;
  double rk4_dt = 1e-4;
};

struct IbmSettings {
  std::vector<double> eps_list{0.4, 0.2, 0.1};
  int replicates = 200;
  std::vector<double> snapshot_times{0.025, 0.05};
  std::uint64_t seed = 20240801;
  double bin_width = 0.5;
  int pair_bins = 12;
  double pair_rmax = 3.0;
};

struct TruncationSettings {
  int levels = 3;    // N
  int grid_size = 16;  // M for operator experiments
};

struct OpsSettings {
  int samples = 100;
  double lambda = 1.0;
  std::uint64_t seed = 7;
};

// Everything one run needs, parsed from a JSON config file. Unknown keys are
// rejected; missing keys take the documented defaults.
struct ExperimentConfig {
  ModelParams model;
  InitialCondition initial;
  SolverSettings solver;
  IbmSettings ibm;
  TruncationSettings truncation;
  OpsSettings ops;
  bool override_regime = false;
  int threads = 0;  // 0: pick from hardware / BDLP_THREADS

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  // Canonical serialization (sorted keys) and its hash, embedded in every
  // output artifact for provenance.
  std::string canonical_json() const;
  std::string config_hash() const;

  int effective_threads() const;
};

struct RunArtifact {
  std::string name;  // suggested file name
  std::string text;
};

struct RunOutcome {
  bool ok = true;
  std::string summary;  // human-readable, one line per item
  std::vector<RunArtifact> artifacts;
};

RunOutcome run_validate(const ExperimentConfig& cfg);
RunOutcome run_vlasov(const ExperimentConfig& cfg, const std::string& method);
RunOutcome run_ibm(const ExperimentConfig& cfg, bool binned);
RunOutcome run_sweep(const ExperimentConfig& cfg);
// check: all | bounds | resolvent | chaos | adjoint
RunOutcome run_ops(const ExperimentConfig& cfg, const std::string& check);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace bdlp
