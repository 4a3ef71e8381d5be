#include "bdlp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bdlp {

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "tophat") return KernelFamily::tophat;
  if (name == "laplace") return KernelFamily::laplace;
  throw std::invalid_argument("unknown kernel family: " + name);
}

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::tophat: return "tophat";
    case KernelFamily::laplace: return "laplace";
  }
  return "?";
}

Kernel::Kernel(KernelFamily f, double s) : family(f), scale(s) {
  if (!(s > 0.0)) throw std::invalid_argument("Kernel: scale must be positive");
}

double Kernel::density(double x) const {
  switch (family) {
    case KernelFamily::gaussian: {
      const double z = x / scale;
      return std::exp(-0.5 * z * z) / (scale * std::sqrt(2.0 * M_PI));
    }
    case KernelFamily::tophat:
      return std::abs(x) <= scale ? 0.5 / scale : 0.0;
    case KernelFamily::laplace:
      return std::exp(-std::abs(x) / scale) / (2.0 * scale);
  }
  return 0.0;
}

double Kernel::cdf(double x) const {
  switch (family) {
    case KernelFamily::gaussian:
      return 0.5 * std::erfc(-x / (scale * std::sqrt(2.0)));
    case KernelFamily::tophat: {
      const double t = (x + scale) / (2.0 * scale);
      return std::clamp(t, 0.0, 1.0);
    }
    case KernelFamily::laplace:
      return x < 0.0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
  }
  return 0.0;
}

double Kernel::tail_radius(double tail_mass) const {
  if (!(tail_mass > 0.0 && tail_mass < 1.0))
    throw std::invalid_argument("Kernel::tail_radius: tail mass must be in (0,1)");
  if (family == KernelFamily::tophat) return scale;
  if (family == KernelFamily::laplace) return -scale * std::log(tail_mass);
  // gaussian: bisect 2(1 - cdf(r)) = tail_mass
  double lo = 0.0, hi = scale;
  while (2.0 * (1.0 - cdf(hi)) > tail_mass) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (2.0 * (1.0 - cdf(mid)) > tail_mass)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double Kernel::sample(Rng& rng) const {
  switch (family) {
    case KernelFamily::gaussian:
      return scale * normal_sample(rng);
    case KernelFamily::tophat:
      return scale * (2.0 * uniform01(rng) - 1.0);
    case KernelFamily::laplace: {
      // symmetrized exponential
      const double mag = -scale * std::log(uniform01_pos(rng));
      return (rng() & 1u) ? mag : -mag;
    }
  }
  return 0.0;
}

namespace {

int image_count(const Kernel& k, double length) {
  const double r = k.tail_radius(1e-12);
  return static_cast<int>(std::ceil(r / length)) + 1;
}

}  // namespace

double periodized_density(const Kernel& k, double dx, double length) {
  const int n_max = image_count(k, length);
  double s = 0.0;
  for (int n = -n_max; n <= n_max; ++n) s += k.density(dx + n * length);
  return s;
}

std::vector<double> discretize_kernel(const Kernel& k, const GridSpec& grid) {
  const int m = grid.size;
  const double h = grid.spacing();
  const int n_max = image_count(k, grid.length);
  std::vector<double> w(m, 0.0);

  if (k.family == KernelFamily::tophat) {
    // Exact cell averages over [x_i - h/2, x_i + h/2): a support edge falling
    // inside a cell yields the partial-overlap average, which keeps both the
    // normalization and the evenness of the row.
    for (int i = 0; i < m; ++i) {
      const double a = grid.site(i) - 0.5 * h;
      const double b = grid.site(i) + 0.5 * h;
      double mass = 0.0;
      for (int n = -n_max; n <= n_max; ++n)
        mass += k.cdf(b - n * grid.length) - k.cdf(a - n * grid.length);
      w[i] = mass / h;
    }
  } else {
    for (int i = 0; i < m; ++i) {
      // sample at the site nearest to the origin image
      const double dx = grid.wrap(grid.site(i));
      for (int n = -n_max; n <= n_max; ++n) w[i] += k.density(dx + n * grid.length);
    }
  }

  double total = 0.0;
  for (double v : w) total += v;
  total *= h;
  if (!(total > 0.0)) throw std::runtime_error("discretize_kernel: zero total mass");
  for (double& v : w) v /= total;
  return w;
}

}  // namespace bdlp
