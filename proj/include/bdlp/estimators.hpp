#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bdlp/grid.hpp"
#include "bdlp/ibm.hpp"
#include "bdlp/params.hpp"

namespace bdlp {

// Rescaled density histogram: value_b = eps * (mean count in bin b) / width.
struct BinnedDensity {
  double length = 0.0;
  double bin_width = 0.0;
  double eps = 1.0;
  int replicates = 1;
  std::vector<double> values;

  int bin_count() const { return static_cast<int>(values.size()); }
  double center(int b) const { return (b + 0.5) * bin_width; }
  // width * sum(values) = eps * mean particle count (bookkeeping identity)
  double integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * bin_width;
  }
};

// Separation-binned normalized pair density g(r) with jackknife standard
// errors; g = 1 identically for a Poisson configuration.
struct PairCorrelationEstimate {
  double r_max = 0.0;
  double bin_width = 0.0;
  int replicates = 1;
  std::vector<double> g;
  std::vector<double> stderr_g;

  double center(int b) const { return (b + 0.5) * bin_width; }
};

struct SweepRow {
  double eps = 0.0;
  double time = 0.0;
  double l2 = 0.0;
  double stderr_l2 = 0.0;
};

struct SweepSettings {
  double horizon = 0.05;
  std::vector<double> snapshot_times;
  std::vector<double> eps_list;
  int replicates = 100;
  double bin_width = 0.5;
  double solver_dt = 1e-4;
  int threads = 1;
};

BinnedDensity empirical_density(const EnsembleResult& ensemble, std::size_t snapshot_index,
                                double bin_width);

PairCorrelationEstimate pair_correlation(const EnsembleResult& ensemble,
                                         std::size_t snapshot_index, int bins, double r_max);

// Overlap-weighted average of a piecewise-constant field over uniform bins.
BinnedDensity bin_field(const Field& field, double bin_width);

// sqrt(sum_b width (a_b - b_b)^2); the Field overload bins the field first.
double l2_error(const BinnedDensity& a, const BinnedDensity& b);
double l2_error(const BinnedDensity& a, const Field& b);

// For each eps: ensemble at that eps versus the eps-independent grid solution,
// one row per (eps, snapshot). Standard errors are leave-one-replicate-out.
std::vector<SweepRow> epsilon_sweep(const ModelParams& params, const Field& rho0,
                                    const SweepSettings& settings, std::uint64_t seed);

}  // namespace bdlp
