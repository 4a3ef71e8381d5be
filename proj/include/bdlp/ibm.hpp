#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bdlp/grid.hpp"
#include "bdlp/params.hpp"
#include "bdlp/random.hpp"

namespace bdlp {

// Point configuration on the torus [0, L) with cached per-particle
// competition sums s_i = sum_{j != i} a-_per(x_i - x_j) and the neighbor
// lookup grid that keeps their maintenance O(neighbors) per event.
struct ParticleState {
  double length = 0.0;
  std::vector<double> positions;
  std::vector<double> comp;  // s_i, valid only when caches_valid
  double comp_total = 0.0;   // sum_i s_i
  bool caches_valid = false;

  // bucket grid internals, rebuilt with the caches
  int bucket_count = 0;
  std::vector<std::vector<int>> buckets;
  std::vector<int> bucket_of;

  std::size_t size() const { return positions.size(); }
};

struct SimEvent {
  enum class Kind { birth, death };
  double time = 0.0;
  Kind kind = Kind::birth;
  double position = 0.0;
  int parent = -1;  // births only
};

struct Snapshot {
  double time = 0.0;
  std::vector<double> positions;
};

struct EnsembleResult {
  double eps = 1.0;
  double length = 0.0;
  std::uint64_t base_seed = 0;
  std::vector<std::uint64_t> seeds;  // one per replicate, derived from base_seed
  std::vector<double> snapshot_times;
  std::vector<std::vector<Snapshot>> replicates;  // [replicate][snapshot]
};

// Exact event-driven simulation of the rescaled birth-and-death process:
// initial Poisson configuration with intensity rho0/eps, per-particle death
// rate m + eps kappa- s_i, birth rate kappa+ per particle with offspring
// displaced by the dispersal kernel. Offspring positions are continuous;
// only the estimators discretize.
class IbmSimulator {
 public:
  explicit IbmSimulator(const ModelParams& p);

  const ModelParams& params() const { return params_; }
  // Competition kernel periodized on the torus, cut off where the omitted
  // tail mass is below 1e-12.
  double comp_kernel(double dx) const;
  double cutoff() const { return cutoff_; }

  // Poisson(rho0 integral / eps) points placed by the piecewise-constant
  // density, uniform within a cell. Caches are built lazily.
  ParticleState sample_initial(const Field& rho0, Rng& rng) const;

  void ensure_caches(ParticleState& state) const;
  // Largest relative disagreement between the cached sums and a from-scratch
  // recomputation (diagnostic).
  double cache_drift(const ParticleState& state) const;

  // (total birth rate, total death rate) = (kappa+ n, m n + eps kappa- sum s_i)
  std::pair<double, double> event_rates(const ParticleState& state) const;

  // One jump: advances `time` by an exponential waiting time and mutates the
  // state. Returns nothing on the empty (absorbing) configuration.
  std::optional<SimEvent> step(ParticleState& state, double& time, Rng& rng) const;

  std::vector<Snapshot> simulate_from(ParticleState state, double horizon,
                                      std::span<const double> snapshot_times, Rng& rng) const;

  std::vector<Snapshot> run_trajectory(const Field& rho0, double horizon,
                                       std::span<const double> snapshot_times,
                                       std::uint64_t seed) const;

  // Independent replicates with seeds derived from (base_seed, index); the
  // results do not depend on the execution schedule.
  EnsembleResult run_ensemble(const Field& rho0, double horizon,
                              std::span<const double> snapshot_times, int replicates,
                              std::uint64_t base_seed, int threads = 1) const;

  // Events between cache rebuilds (drift safeguard); tests lower or raise it.
  int cache_refresh_interval = 4096;

 private:
  void add_particle(ParticleState& state, double position) const;
  void remove_particle(ParticleState& state, std::size_t index) const;
  SimEvent apply_event(ParticleState& state, double t_event, Rng& rng) const;
  template <typename Fn>
  void for_each_neighbor(const ParticleState& state, double x, Fn&& fn) const;

  ModelParams params_;
  double cutoff_ = 0.0;
  int images_ = 1;
};

}  // namespace bdlp
