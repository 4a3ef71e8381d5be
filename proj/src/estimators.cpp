#include "bdlp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bdlp/vlasov.hpp"

namespace bdlp {

namespace {

int bin_count_for(double length, double bin_width) {
  const double ratio = length / bin_width;
  const int bins = static_cast<int>(std::llround(ratio));
  if (bins < 1 || std::abs(ratio - bins) > 1e-9)
    throw std::invalid_argument("estimators: bin width must divide the domain length");
  return bins;
}

}  // namespace

BinnedDensity empirical_density(const EnsembleResult& ensemble, std::size_t snapshot_index,
                                double bin_width) {
  if (snapshot_index >= ensemble.snapshot_times.size())
    throw std::out_of_range("empirical_density: snapshot index out of range");
  const int bins = bin_count_for(ensemble.length, bin_width);
  const int reps = static_cast<int>(ensemble.replicates.size());

  BinnedDensity out;
  out.length = ensemble.length;
  out.bin_width = bin_width;
  out.eps = ensemble.eps;
  out.replicates = reps;
  out.values.assign(bins, 0.0);

  for (const auto& rep : ensemble.replicates) {
    for (double x : rep[snapshot_index].positions) {
      int b = static_cast<int>(x / bin_width);
      if (b >= bins) b = bins - 1;
      out.values[b] += 1.0;
    }
  }
  const double scale = ensemble.eps / (static_cast<double>(reps) * bin_width);
  for (double& v : out.values) v *= scale;
  return out;
}

PairCorrelationEstimate pair_correlation(const EnsembleResult& ensemble,
                                         std::size_t snapshot_index, int bins, double r_max) {
  if (snapshot_index >= ensemble.snapshot_times.size())
    throw std::out_of_range("pair_correlation: snapshot index out of range");
  if (bins < 1 || !(r_max > 0.0) || r_max > 0.5 * ensemble.length)
    throw std::invalid_argument("pair_correlation: need 0 < r_max <= L/2 and bins >= 1");
  const int reps = static_cast<int>(ensemble.replicates.size());
  const double width = r_max / bins;
  const double length = ensemble.length;
  auto distance = [length](double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, length - d);
  };

  // per-replicate ordered-pair counts per separation bin, and counts
  std::vector<std::vector<double>> pair_counts(reps, std::vector<double>(bins, 0.0));
  std::vector<double> n_particles(reps, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto& pos = ensemble.replicates[r][snapshot_index].positions;
    n_particles[r] = static_cast<double>(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
      for (std::size_t j = i + 1; j < pos.size(); ++j) {
        const double d = distance(pos[i], pos[j]);
        if (d >= r_max) continue;
        pair_counts[r][static_cast<int>(d / width)] += 2.0;  // ordered pairs
      }
  }

  // g_b = mean pair count / (mean n)^2 * L / (2 width): the eps factors of
  // the rescaled pair density and the factorized product cancel.
  auto g_of = [&](double pc_mean, double n_mean) {
    const double denom = n_mean * n_mean * 2.0 * width / ensemble.length;
    return denom > 0.0 ? pc_mean / denom : 0.0;
  };

  std::vector<double> pc_sum(bins, 0.0);
  double n_sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    n_sum += n_particles[r];
    for (int b = 0; b < bins; ++b) pc_sum[b] += pair_counts[r][b];
  }

  PairCorrelationEstimate out;
  out.r_max = r_max;
  out.bin_width = width;
  out.replicates = reps;
  out.g.resize(bins);
  out.stderr_g.assign(bins, 0.0);
  for (int b = 0; b < bins; ++b) out.g[b] = g_of(pc_sum[b] / reps, n_sum / reps);

  if (reps > 1) {
    // leave-one-out pseudovalues
    for (int b = 0; b < bins; ++b) {
      double mean = 0.0;
      std::vector<double> loo(reps);
      for (int r = 0; r < reps; ++r) {
        loo[r] = g_of((pc_sum[b] - pair_counts[r][b]) / (reps - 1),
                      (n_sum - n_particles[r]) / (reps - 1));
        mean += loo[r];
      }
      mean /= reps;
      double ss = 0.0;
      for (double v : loo) ss += (v - mean) * (v - mean);
      out.stderr_g[b] = std::sqrt(ss * (reps - 1) / static_cast<double>(reps));
    }
  }
  return out;
}

BinnedDensity bin_field(const Field& field, double bin_width) {
  const double length = field.grid().length;
  const int bins = bin_count_for(length, bin_width);
  const double h = field.grid().spacing();

  BinnedDensity out;
  out.length = length;
  out.bin_width = bin_width;
  out.eps = 1.0;
  out.replicates = 1;
  out.values.assign(bins, 0.0);

  // integrate the piecewise-constant field over each bin; cell i covers
  // [x_i - h/2, x_i + h/2) modulo L
  for (int i = 0; i < field.size(); ++i) {
    double lo = field.grid().site(i) - 0.5 * h;
    for (int piece = 0; piece < 2; ++piece) {
      double a = lo, b = lo + h;
      if (piece == 1) {
        if (lo >= 0.0) break;
        a = lo + length;  // wrapped part of cell 0
        b = length;
      } else {
        a = std::max(a, 0.0);
      }
      int first = static_cast<int>(a / bin_width);
      while (first < bins && a < b - 1e-15) {
        const double edge = (first + 1) * bin_width;
        const double upper = std::min(b, edge);
        out.values[first] += (upper - a) * field[i];
        a = upper;
        ++first;
      }
    }
  }
  for (double& v : out.values) v /= bin_width;
  return out;
}

double l2_error(const BinnedDensity& a, const BinnedDensity& b) {
  if (a.bin_count() != b.bin_count() || std::abs(a.bin_width - b.bin_width) > 1e-12)
    throw std::invalid_argument("l2_error: incompatible bins");
  double s = 0.0;
  for (int i = 0; i < a.bin_count(); ++i) {
    const double d = a.values[i] - b.values[i];
    s += d * d;
  }
  return std::sqrt(s * a.bin_width);
}

double l2_error(const BinnedDensity& a, const Field& b) {
  return l2_error(a, bin_field(b, a.bin_width));
}

std::vector<SweepRow> epsilon_sweep(const ModelParams& params, const Field& rho0,
                                    const SweepSettings& settings, std::uint64_t seed) {
  if (settings.eps_list.empty() || settings.snapshot_times.empty())
    throw std::invalid_argument("epsilon_sweep: need at least one eps and one snapshot");

  // grid reference solution is eps-independent
  VlasovSolver solver(params);
  const Trajectory reference = solver.rk4(rho0, settings.horizon, settings.solver_dt);

  std::vector<SweepRow> rows;
  for (std::size_t ei = 0; ei < settings.eps_list.size(); ++ei) {
    ModelParams p = params;
    p.eps = settings.eps_list[ei];
    IbmSimulator sim(p);
    const auto ensemble =
        sim.run_ensemble(rho0, settings.horizon, settings.snapshot_times, settings.replicates,
                         derive_seed(seed, ei), settings.threads);

    for (std::size_t si = 0; si < ensemble.snapshot_times.size(); ++si) {
      const double t = ensemble.snapshot_times[si];
      const auto target = bin_field(reference.field(reference.index_of(t)), settings.bin_width);
      const auto density = empirical_density(ensemble, si, settings.bin_width);

      SweepRow row;
      row.eps = p.eps;
      row.time = t;
      row.l2 = l2_error(density, target);

      // leave-one-replicate-out error of the l2 statistic
      const int reps = settings.replicates;
      if (reps > 1) {
        const int bins = density.bin_count();
        std::vector<std::vector<double>> counts(reps, std::vector<double>(bins, 0.0));
        for (int r = 0; r < reps; ++r)
          for (double x : ensemble.replicates[r][si].positions) {
            int b = static_cast<int>(x / settings.bin_width);
            if (b >= bins) b = bins - 1;
            counts[r][b] += 1.0;
          }
        std::vector<double> total(bins, 0.0);
        for (int r = 0; r < reps; ++r)
          for (int b = 0; b < bins; ++b) total[b] += counts[r][b];
        std::vector<double> loo(reps);
        double mean = 0.0;
        for (int r = 0; r < reps; ++r) {
          double s = 0.0;
          for (int b = 0; b < bins; ++b) {
            const double dens =
                p.eps * (total[b] - counts[r][b]) / ((reps - 1) * settings.bin_width);
            const double d = dens - target.values[b];
            s += d * d;
          }
          loo[r] = std::sqrt(s * settings.bin_width);
          mean += loo[r];
        }
        mean /= reps;
        double ss = 0.0;
        for (double v : loo) ss += (v - mean) * (v - mean);
        row.stderr_l2 = std::sqrt(ss * (reps - 1) / static_cast<double>(reps));
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace bdlp
