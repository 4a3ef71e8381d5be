#include "bdlp/config_space.hpp"

#include <algorithm>
#include <cmath>

namespace bdlp {

ConfigSpace::ConfigSpace(GridSpec grid, int max_points) : grid_(grid), max_points_(max_points) {
  if (max_points < 0 || max_points > grid.size)
    throw std::invalid_argument("ConfigSpace: invalid truncation level");

  const int m = grid.size;
  choose_.assign(m + 1, std::vector<std::uint64_t>(max_points + 2, 0));
  choose_[0][0] = 1;
  for (int n = 1; n <= m; ++n) {
    choose_[n][0] = 1;
    for (int k = 1; k <= max_points + 1; ++k)
      choose_[n][k] = choose_[n - 1][k - 1] + choose_[n - 1][k];
  }

  level_sizes_.resize(max_points + 1);
  flat_.resize(max_points + 1);
  for (int n = 0; n <= max_points; ++n) {
    const std::size_t count = choose(m, n);
    level_sizes_[n] = count;
    total_ += count;
    flat_[n].reserve(count * n);
    if (n == 0) continue;
    // colex enumeration
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) c[i] = i;
    for (std::size_t r = 0; r < count; ++r) {
      flat_[n].insert(flat_[n].end(), c.begin(), c.end());
      int j = 0;
      while (j < n) {
        const int limit = (j + 1 < n) ? c[j + 1] : m;
        if (c[j] + 1 < limit) break;
        ++j;
      }
      if (j == n) break;  // last combination emitted
      ++c[j];
      for (int i = 0; i < j; ++i) c[i] = i;
    }
  }
}

std::size_t ConfigSpace::rank(std::span<const int> sites) const {
  std::size_t r = 0;
  for (std::size_t j = 0; j < sites.size(); ++j) {
    if (sites[j] < 0 || sites[j] >= grid_.size)
      throw std::out_of_range("ConfigSpace::rank: site index out of range");
    if (j > 0 && sites[j] <= sites[j - 1])
      throw std::invalid_argument("ConfigSpace::rank: sites must be strictly increasing");
    r += choose(sites[j], static_cast<int>(j) + 1);
  }
  return r;
}

LevelFunction::LevelFunction(std::shared_ptr<const ConfigSpace> space, double weight)
    : space_(std::move(space)), weight_(weight) {
  if (!space_) throw std::invalid_argument("LevelFunction: null space");
  if (!(weight_ > 0.0)) throw std::invalid_argument("LevelFunction: weight must be positive");
  levels_.resize(space_->max_points() + 1);
  for (int n = 0; n <= space_->max_points(); ++n) levels_[n].assign(space_->level_size(n), 0.0);
}

bool LevelFunction::supported_within(int n_max) const {
  for (int n = n_max + 1; n <= max_points(); ++n)
    for (double v : levels_[n])
      if (v != 0.0) return false;
  return true;
}

namespace {

void require_same_shape(const LevelFunction& a, const LevelFunction& b, const char* what) {
  if (a.space()->grid() != b.space()->grid() || a.max_points() != b.max_points())
    throw std::invalid_argument(std::string(what) + ": mismatched configuration spaces");
}

}  // namespace

LevelFunction& LevelFunction::operator+=(const LevelFunction& other) {
  require_same_shape(*this, other, "LevelFunction::operator+=");
  for (int n = 0; n <= max_points(); ++n)
    for (std::size_t r = 0; r < levels_[n].size(); ++r) levels_[n][r] += other.value(n, r);
  return *this;
}

LevelFunction& LevelFunction::operator-=(const LevelFunction& other) {
  require_same_shape(*this, other, "LevelFunction::operator-=");
  for (int n = 0; n <= max_points(); ++n)
    for (std::size_t r = 0; r < levels_[n].size(); ++r) levels_[n][r] -= other.value(n, r);
  return *this;
}

LevelFunction& LevelFunction::operator*=(double factor) {
  for (auto& lvl : levels_)
    for (double& v : lvl) v *= factor;
  return *this;
}

double energy(std::span<const double> kernel_row, std::span<const int> eta) {
  const int m = static_cast<int>(kernel_row.size());
  double e = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i)
    for (std::size_t j = 0; j < eta.size(); ++j) {
      if (i == j) continue;
      int d = (eta[i] - eta[j]) % m;
      if (d < 0) d += m;
      e += kernel_row[d];
    }
  return e;
}

double lp_exponent(const Field& rho, std::span<const int> eta) {
  double p = 1.0;
  for (int site : eta) p *= rho[site];
  return p;
}

CorrelationFunction lp_exponent_function(std::shared_ptr<const ConfigSpace> space,
                                         const Field& rho, double weight) {
  if (rho.grid() != space->grid())
    throw std::invalid_argument("lp_exponent_function: field grid does not match space");
  CorrelationFunction k(space, weight);
  for (int n = 0; n <= space->max_points(); ++n)
    for (std::size_t r = 0; r < space->level_size(n); ++r)
      k.value(n, r) = lp_exponent(rho, space->config(n, r));
  return k;
}

namespace {

void require_level(const LevelFunction& f, std::span<const int> sites, const char* what) {
  if (static_cast<int>(sites.size()) > f.max_points())
    throw std::invalid_argument(std::string(what) + ": configuration exceeds truncation level");
}

}  // namespace

double k_transform(const QuasiObservable& g, std::span<const int> gamma) {
  require_level(g, gamma, "k_transform");
  const int n = static_cast<int>(gamma.size());
  double sum = 0.0;
  std::vector<int> subset;
  subset.reserve(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    subset.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) subset.push_back(gamma[i]);
    sum += g(subset);
  }
  return sum;
}

double k_inverse(const QuasiObservable& f, std::span<const int> eta) {
  require_level(f, eta, "k_inverse");
  const int n = static_cast<int>(eta.size());
  double sum = 0.0;
  std::vector<int> subset;
  subset.reserve(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    subset.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) subset.push_back(eta[i]);
    const int removed = n - static_cast<int>(subset.size());
    sum += (removed % 2 == 0 ? 1.0 : -1.0) * f(subset);
  }
  return sum;
}

double lc_norm(const QuasiObservable& g) {
  const double h = g.space()->spacing();
  const double c = g.weight();
  double total = 0.0;
  double factor = 1.0;  // (C h)^n
  for (int n = 0; n <= g.max_points(); ++n) {
    double lvl = 0.0;
    for (double v : g.level(n)) lvl += std::abs(v);
    total += factor * lvl;
    factor *= c * h;
  }
  return total;
}

double kc_norm(const CorrelationFunction& k) {
  const double c = k.weight();
  double best = 0.0;
  double factor = 1.0;  // C^-n
  for (int n = 0; n <= k.max_points(); ++n) {
    for (double v : k.level(n)) best = std::max(best, std::abs(v) * factor);
    factor /= c;
  }
  return best;
}

double pairing(const QuasiObservable& g, const CorrelationFunction& k) {
  require_same_shape(g, k, "pairing");
  const double h = g.space()->spacing();
  double total = 0.0;
  double factor = 1.0;  // h^n
  for (int n = 0; n <= g.max_points(); ++n) {
    double lvl = 0.0;
    const auto gl = g.level(n);
    const auto kl = k.level(n);
    for (std::size_t r = 0; r < gl.size(); ++r) lvl += gl[r] * kl[r];
    total += factor * lvl;
    factor *= h;
  }
  return total;
}

LevelFunction scale_reps(const LevelFunction& f, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("scale_reps: eps must be positive");
  LevelFunction out = f;
  for (int n = 0; n <= f.max_points(); ++n) {
    const double factor = std::pow(eps, n);
    for (double& v : out.level(n)) v *= factor;
  }
  return out;
}

LevelFunction random_level_function(std::shared_ptr<const ConfigSpace> space, double weight,
                                    int top_level, Rng& rng, bool zero_empty) {
  LevelFunction f(std::move(space), weight);
  const int top = std::min(top_level, f.max_points());
  for (int n = 0; n <= top; ++n)
    for (double& v : f.level(n)) v = 2.0 * uniform01(rng) - 1.0;
  if (zero_empty) f.value(0, 0) = 0.0;
  return f;
}

}  // namespace bdlp
