#pragma once

#include <string>
#include <vector>

#include "bdlp/grid.hpp"
#include "bdlp/random.hpp"

namespace bdlp {

enum class KernelFamily { gaussian, tophat, laplace };

KernelFamily kernel_family_from_string(const std::string& name);
const char* to_string(KernelFamily family);

// Even probability density on the line with unit mass:
//   gaussian: exp(-x^2 / (2 s^2)) / (s sqrt(2 pi))
//   tophat:   1 / (2 s) on [-s, s]
//   laplace:  exp(-|x| / s) / (2 s)
struct Kernel {
  KernelFamily family = KernelFamily::gaussian;
  double scale = 1.0;

  Kernel() = default;
  Kernel(KernelFamily f, double s);

  double density(double x) const;
  double cdf(double x) const;

  // Smallest radius r with P(|X| > r) <= tail_mass.
  double tail_radius(double tail_mass) const;

  // Draw from the continuous density, not the gridded one: exact normal for
  // gaussian, inverse CDF for tophat, symmetrized exponential for laplace.
  // Symmetric in distribution; deterministic in the rng stream.
  double sample(Rng& rng) const;
};

// Periodized density: sum over images a(dx + n L), truncated once the omitted
// image mass is below 1e-12.
double periodized_density(const Kernel& k, double dx, double length);

// Grid weights w[i] ~ a_per(x_i), rescaled so that h * sum(w) = 1 exactly.
// Tophat weights are exact cell averages, so cells straddling the support
// edge carry the partial-overlap value; smooth families are point samples.
// The row is even under index negation mod M and nonnegative.
std::vector<double> discretize_kernel(const Kernel& k, const GridSpec& grid);

// Recommended resolution check for discretization: the domain should be at
// least six kernel scale lengths wide.
inline bool domain_resolves_kernel(const Kernel& k, double length) {
  return length > 6.0 * k.scale;
}

}  // namespace bdlp
