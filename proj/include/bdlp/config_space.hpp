#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "bdlp/grid.hpp"
#include "bdlp/random.hpp"

namespace bdlp {

// A finite point configuration on the grid: strictly increasing site indices
// (no repeated points).
using GridConfiguration = std::vector<int>;

// Enumeration of all site subsets with at most N points, level by level, in
// colexicographic order. rank{c_0 < ... < c_{n-1}} = sum_j C(c_j, j+1), which
// matches the enumeration order.
class ConfigSpace {
 public:
  ConfigSpace(GridSpec grid, int max_points);

  const GridSpec& grid() const { return grid_; }
  int site_count() const { return grid_.size; }
  int max_points() const { return max_points_; }
  double spacing() const { return grid_.spacing(); }

  std::size_t level_size(int n) const { return level_sizes_[n]; }
  std::size_t total_size() const { return total_; }

  std::span<const int> config(int n, std::size_t rank) const {
    if (n == 0) return {};
    return {flat_[n].data() + rank * n, static_cast<std::size_t>(n)};
  }

  std::size_t rank(std::span<const int> sites) const;

  std::uint64_t choose(int n, int k) const {
    if (k < 0 || k > n) return 0;
    if (k > max_points_ + 1) throw std::out_of_range("ConfigSpace::choose: k beyond table");
    return choose_[n][k];
  }

 private:
  GridSpec grid_;
  int max_points_;
  std::size_t total_ = 0;
  std::vector<std::size_t> level_sizes_;
  std::vector<std::vector<int>> flat_;  // level n: level_size(n) * n site indices
  std::vector<std::vector<std::uint64_t>> choose_;
};

// Symmetric function on the truncated configuration space, stored level by
// level in the space's enumeration order. Serves as both a quasi-observable
// (L_C side) and a correlation function (K_C side); the weight C is carried
// along for the norms.
class LevelFunction {
 public:
  LevelFunction(std::shared_ptr<const ConfigSpace> space, double weight);

  const std::shared_ptr<const ConfigSpace>& space() const { return space_; }
  double weight() const { return weight_; }
  int max_points() const { return space_->max_points(); }

  std::span<double> level(int n) { return levels_[n]; }
  std::span<const double> level(int n) const { return levels_[n]; }

  double value(int n, std::size_t rank) const { return levels_[n][rank]; }
  double& value(int n, std::size_t rank) { return levels_[n][rank]; }

  double operator()(std::span<const int> sites) const {
    const int n = static_cast<int>(sites.size());
    return levels_[n][space_->rank(sites)];
  }
  double& at(std::span<const int> sites) {
    const int n = static_cast<int>(sites.size());
    return levels_[n][space_->rank(sites)];
  }

  // True when every stored value at levels > n_max vanishes.
  bool supported_within(int n_max) const;

  LevelFunction& operator+=(const LevelFunction& other);
  LevelFunction& operator-=(const LevelFunction& other);
  LevelFunction& operator*=(double factor);

 private:
  std::shared_ptr<const ConfigSpace> space_;
  double weight_;
  std::vector<std::vector<double>> levels_;
};

using QuasiObservable = LevelFunction;
using CorrelationFunction = LevelFunction;

// Ordered-pair interaction energy sum_{x in eta} sum_{y in eta \ x} a(x - y),
// with a given as a circular kernel row indexed by site difference.
double energy(std::span<const double> kernel_row, std::span<const int> eta);

// Product of rho over the points of eta; 1 on the empty configuration.
double lp_exponent(const Field& rho, std::span<const int> eta);

// The exponent as a stored correlation function on all levels of the space.
CorrelationFunction lp_exponent_function(std::shared_ptr<const ConfigSpace> space,
                                         const Field& rho, double weight);

// Sum of g over all subsets of gamma. Requires |gamma| <= N.
double k_transform(const QuasiObservable& g, std::span<const int> gamma);

// Inverse transform: alternating-sign subset sum. Requires |eta| <= N.
double k_inverse(const QuasiObservable& f, std::span<const int> eta);

// sum_n C^n h^n sum_{sorted configs} |g|: the truncated L^1(C^|.| d lambda)
// norm in the sorted-set bookkeeping (the tuple multiplicity n! cancels).
double lc_norm(const QuasiObservable& g);

// max over stored eta of |k(eta)| C^{-|eta|}.
double kc_norm(const CorrelationFunction& k);

// Truncated duality pairing sum_n h^n sum_{sorted configs} g * k.
double pairing(const QuasiObservable& g, const CorrelationFunction& k);

// Scaling map: multiplies level n by eps^n.
LevelFunction scale_reps(const LevelFunction& f, double eps);

// Uniform values in [-1, 1] on levels <= top_level, zero above.
LevelFunction random_level_function(std::shared_ptr<const ConfigSpace> space, double weight,
                                    int top_level, Rng& rng, bool zero_empty = false);

}  // namespace bdlp
