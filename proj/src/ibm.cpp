#include "bdlp/ibm.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace bdlp {

IbmSimulator::IbmSimulator(const ModelParams& p) : params_(p) {
  params_.check();
  cutoff_ = params_.a_minus.tail_radius(1e-12);
  images_ = static_cast<int>(std::ceil(cutoff_ / params_.length)) + 1;
}

double IbmSimulator::comp_kernel(double dx) const {
  dx = params_.grid().wrap(dx);
  double s = 0.0;
  for (int n = -images_; n <= images_; ++n) {
    const double r = dx + n * params_.length;
    if (std::abs(r) <= cutoff_) s += params_.a_minus.density(r);
  }
  return s;
}

namespace {

int bucket_index(const ParticleState& state, double x) {
  int b = static_cast<int>(x / (state.length / state.bucket_count));
  if (b >= state.bucket_count) b = state.bucket_count - 1;
  if (b < 0) b = 0;
  return b;
}

}  // namespace

// Buckets are at least one cutoff wide, so scanning a position's own bucket
// and its two neighbors covers every interacting pair. Wide kernels (cutoff
// comparable to L) degenerate to a single bucket, i.e. a full scan.
template <typename Fn>
void IbmSimulator::for_each_neighbor(const ParticleState& state, double x, Fn&& fn) const {
  if (state.bucket_count <= 1) {
    const int n = static_cast<int>(state.size());
    for (int j = 0; j < n; ++j) fn(j);
    return;
  }
  const int b = bucket_index(state, x);
  for (int d = -1; d <= 1; ++d) {
    int bb = (b + d) % state.bucket_count;
    if (bb < 0) bb += state.bucket_count;
    for (int j : state.buckets[bb]) fn(j);
  }
}

void IbmSimulator::ensure_caches(ParticleState& state) const {
  if (state.caches_valid) return;
  const std::size_t n = state.size();

  const int nb = static_cast<int>(std::floor(params_.length / std::max(cutoff_, 1e-300)));
  state.bucket_count = nb >= 4 ? nb : 1;
  state.buckets.assign(state.bucket_count, {});
  state.bucket_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int b = state.bucket_count == 1 ? 0 : bucket_index(state, state.positions[i]);
    state.bucket_of[i] = b;
    state.buckets[b].push_back(static_cast<int>(i));
  }

  state.comp.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for_each_neighbor(state, state.positions[i], [&](int j) {
      if (static_cast<std::size_t>(j) >= i) return;  // each pair once
      const double w = comp_kernel(state.positions[i] - state.positions[j]);
      state.comp[i] += w;
      state.comp[j] += w;
    });
  }
  state.comp_total = 0.0;
  for (double s : state.comp) state.comp_total += s;
  state.caches_valid = true;
}

double IbmSimulator::cache_drift(const ParticleState& state) const {
  if (!state.caches_valid) return 0.0;
  ParticleState fresh;
  fresh.length = state.length;
  fresh.positions = state.positions;
  ensure_caches(fresh);
  double num = std::abs(fresh.comp_total - state.comp_total);
  for (std::size_t i = 0; i < state.size(); ++i)
    num = std::max(num, std::abs(fresh.comp[i] - state.comp[i]));
  const double scale = std::max(1.0, std::abs(fresh.comp_total));
  return num / scale;
}

ParticleState IbmSimulator::sample_initial(const Field& rho0, Rng& rng) const {
  if (rho0.grid() != params_.grid())
    throw std::invalid_argument("sample_initial: field grid does not match params");
  rho0.require_nonnegative("sample_initial");

  const double mean = rho0.integral() / params_.eps;
  const std::uint64_t count = poisson_sample(mean, rng);

  std::vector<double> cum(rho0.size());
  double acc = 0.0;
  for (int i = 0; i < rho0.size(); ++i) {
    acc += rho0[i];
    cum[i] = acc;
  }

  ParticleState state;
  state.length = params_.length;
  if (count > 0 && !(acc > 0.0))
    throw std::logic_error("sample_initial: positive count from zero field");
  state.positions.reserve(count);
  const GridSpec grid = params_.grid();
  const double h = grid.spacing();
  for (std::uint64_t k = 0; k < count; ++k) {
    const double u = uniform01(rng) * acc;
    const int cell = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    const double x = grid.site(std::min(cell, rho0.size() - 1)) + (uniform01(rng) - 0.5) * h;
    state.positions.push_back(grid.fold(x));
  }
  return state;
}

std::pair<double, double> IbmSimulator::event_rates(const ParticleState& state) const {
  if (!state.caches_valid && state.size() > 0)
    throw std::logic_error("event_rates: caches not built");
  const double n = static_cast<double>(state.size());
  const double birth = params_.kappa_plus * n;
  const double death =
      params_.m * n + params_.eps * params_.kappa_minus * std::max(0.0, state.comp_total);
  return {birth, death};
}

void IbmSimulator::add_particle(ParticleState& state, double position) const {
  const int index = static_cast<int>(state.size());
  double s_new = 0.0;
  for_each_neighbor(state, position, [&](int j) {
    const double w = comp_kernel(state.positions[j] - position);
    if (w == 0.0) return;
    state.comp[j] += w;
    s_new += w;
  });
  state.positions.push_back(position);
  state.comp.push_back(s_new);
  state.comp_total += 2.0 * s_new;
  const int b = state.bucket_count == 1 ? 0 : bucket_index(state, position);
  state.bucket_of.push_back(b);
  state.buckets[b].push_back(index);
}

void IbmSimulator::remove_particle(ParticleState& state, std::size_t index) const {
  const double x = state.positions[index];
  const double s = state.comp[index];
  {
    auto& v = state.buckets[state.bucket_of[index]];
    auto it = std::find(v.begin(), v.end(), static_cast<int>(index));
    *it = v.back();
    v.pop_back();
  }
  for_each_neighbor(state, x, [&](int j) {
    if (static_cast<std::size_t>(j) == index) return;
    const double w = comp_kernel(state.positions[j] - x);
    if (w != 0.0) state.comp[j] -= w;
  });
  state.comp_total -= 2.0 * s;
  const std::size_t last = state.size() - 1;
  if (index != last) {
    state.positions[index] = state.positions[last];
    state.comp[index] = state.comp[last];
    auto& v = state.buckets[state.bucket_of[last]];
    auto it = std::find(v.begin(), v.end(), static_cast<int>(last));
    *it = static_cast<int>(index);
    state.bucket_of[index] = state.bucket_of[last];
  }
  state.positions.pop_back();
  state.comp.pop_back();
  state.bucket_of.pop_back();
}

SimEvent IbmSimulator::apply_event(ParticleState& state, double t_event, Rng& rng) const {
  const auto [birth_total, death_total] = event_rates(state);
  SimEvent ev;
  ev.time = t_event;
  const double u = uniform01(rng) * (birth_total + death_total);
  if (u < birth_total) {
    const std::size_t parent = std::min<std::size_t>(
        static_cast<std::size_t>(uniform01(rng) * state.size()), state.size() - 1);
    const double pos = params_.grid().fold(state.positions[parent] + params_.a_plus.sample(rng));
    add_particle(state, pos);
    ev.kind = SimEvent::Kind::birth;
    ev.position = pos;
    ev.parent = static_cast<int>(parent);
  } else {
    // victim proportional to its death rate m + eps kappa- s_i
    double target = u - birth_total;
    std::size_t victim = state.size() - 1;
    for (std::size_t i = 0; i < state.size(); ++i) {
      const double rate =
          params_.m + params_.eps * params_.kappa_minus * std::max(0.0, state.comp[i]);
      if (target < rate) {
        victim = i;
        break;
      }
      target -= rate;
    }
    ev.kind = SimEvent::Kind::death;
    ev.position = state.positions[victim];
    remove_particle(state, victim);
  }
  return ev;
}

std::optional<SimEvent> IbmSimulator::step(ParticleState& state, double& time, Rng& rng) const {
  if (state.size() == 0) return std::nullopt;  // extinction is absorbing
  ensure_caches(state);
  const auto [birth_total, death_total] = event_rates(state);
  time += exponential_sample(birth_total + death_total, rng);
  return apply_event(state, time, rng);
}

std::vector<Snapshot> IbmSimulator::simulate_from(ParticleState state, double horizon,
                                                  std::span<const double> snapshot_times,
                                                  Rng& rng) const {
  std::vector<double> snaps(snapshot_times.begin(), snapshot_times.end());
  std::sort(snaps.begin(), snaps.end());
  if (!snaps.empty() && snaps.back() > horizon + 1e-12 * std::max(1.0, horizon))
    throw std::invalid_argument("simulate_from: snapshot time beyond horizon");

  std::vector<Snapshot> out;
  out.reserve(snaps.size());
  std::size_t si = 0;
  double time = 0.0;
  long events = 0;

  if (horizon <= 0.0) {  // pure sampling, no event machinery needed
    for (double s : snaps) out.push_back({s, state.positions});
    return out;
  }

  ensure_caches(state);
  while (state.size() > 0) {
    const auto [birth_total, death_total] = event_rates(state);
    const double t_next = time + exponential_sample(birth_total + death_total, rng);
    while (si < snaps.size() && snaps[si] < t_next) {
      out.push_back({snaps[si], state.positions});
      ++si;
    }
    if (t_next > horizon) break;
    apply_event(state, t_next, rng);
    time = t_next;
    if (++events % cache_refresh_interval == 0) {
      state.caches_valid = false;
      ensure_caches(state);
    }
  }
  // any remaining snapshots see the final (possibly empty) configuration
  for (; si < snaps.size(); ++si) out.push_back({snaps[si], state.positions});
  return out;
}

std::vector<Snapshot> IbmSimulator::run_trajectory(const Field& rho0, double horizon,
                                                   std::span<const double> snapshot_times,
                                                   std::uint64_t seed) const {
  Rng rng(seed);
  ParticleState state = sample_initial(rho0, rng);
  return simulate_from(std::move(state), horizon, snapshot_times, rng);
}

EnsembleResult IbmSimulator::run_ensemble(const Field& rho0, double horizon,
                                          std::span<const double> snapshot_times, int replicates,
                                          std::uint64_t base_seed, int threads) const {
  if (replicates < 1) throw std::invalid_argument("run_ensemble: replicates must be >= 1");
  EnsembleResult result;
  result.eps = params_.eps;
  result.length = params_.length;
  result.base_seed = base_seed;
  result.snapshot_times.assign(snapshot_times.begin(), snapshot_times.end());
  std::sort(result.snapshot_times.begin(), result.snapshot_times.end());
  result.seeds.resize(replicates);
  for (int r = 0; r < replicates; ++r) result.seeds[r] = derive_seed(base_seed, r);
  result.replicates.resize(replicates);

  auto worker = [&](int first, int stride) {
    for (int r = first; r < replicates; r += stride)
      result.replicates[r] =
          run_trajectory(rho0, horizon, result.snapshot_times, result.seeds[r]);
  };

  const int nthreads = std::max(1, std::min(threads, replicates));
  if (nthreads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker, k, nthreads);
    for (auto& t : pool) t.join();
  }
  return result;
}

}  // namespace bdlp
