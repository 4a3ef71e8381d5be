#include <doctest.h>

#include <cmath>

#include "bdlp/kernels.hpp"
#include "bdlp/params.hpp"

using namespace bdlp;

namespace {

ModelParams canonical_params() {
  ModelParams p;
  p.a_minus = Kernel(KernelFamily::gaussian, 1.0);
  p.a_plus = Kernel(KernelFamily::gaussian, 1.0);
  p.m = 40.0;
  p.kappa_minus = 1.0;
  p.kappa_plus = 1.0;
  p.weight_c = 8.0;
  p.eps = 0.1;
  p.length = 16.0;
  p.grid_size = 64;
  return p;
}

}  // namespace

TEST_CASE("kernel point evaluations") {
  CHECK(Kernel(KernelFamily::laplace, 1.0).density(1.0) ==
        doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-14));
  CHECK(Kernel(KernelFamily::tophat, 2.0).density(3.0) == 0.0);
  const double sigma = 0.7;
  CHECK(Kernel(KernelFamily::gaussian, sigma).density(0.0) ==
        doctest::Approx(1.0 / (sigma * std::sqrt(2.0 * M_PI))).epsilon(1e-14));
  // evenness
  for (auto family : {KernelFamily::gaussian, KernelFamily::tophat, KernelFamily::laplace}) {
    const Kernel k(family, 1.3);
    for (double x : {0.1, 0.9, 2.4}) CHECK(k.density(x) == k.density(-x));
  }
}

TEST_CASE("kernel cdf and tail radius") {
  for (auto family : {KernelFamily::gaussian, KernelFamily::tophat, KernelFamily::laplace}) {
    const Kernel k(family, 0.8);
    CHECK(k.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    const double r = k.tail_radius(1e-10);
    CHECK(2.0 * (1.0 - k.cdf(r)) <= 1e-10 * 1.01);
  }
  CHECK(Kernel(KernelFamily::tophat, 2.5).tail_radius(1e-12) == doctest::Approx(2.5));
}

TEST_CASE("discretized tophat cell averages") {
  // tophat(R=1) on L=16, M=32 (h=0.5): cells centered at 0, +-0.5 sit fully
  // inside the support (value 1/2); the cells centered at +-1 straddle the
  // edge and carry the half-cell average 1/4. h * sum = 1 exactly.
  const GridSpec grid(16.0, 32);
  const auto w = discretize_kernel(Kernel(KernelFamily::tophat, 1.0), grid);
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w[31] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(w[30] == doctest::Approx(0.25).epsilon(1e-12));
  for (int i = 3; i <= 29; ++i) CHECK(w[i] == 0.0);
  double total = 0.0;
  for (double v : w) total += v;
  CHECK(total * grid.spacing() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("discretized rows are nonnegative, even, normalized") {
  for (auto family : {KernelFamily::gaussian, KernelFamily::tophat, KernelFamily::laplace}) {
    for (auto [length, size] : {std::pair{16.0, 32}, {16.0, 64}, {20.0, 40}, {7.0, 14}}) {
      const GridSpec grid(length, size);
      const auto w = discretize_kernel(Kernel(family, 1.0), grid);
      double total = 0.0;
      for (int i = 0; i < size; ++i) {
        CHECK(w[i] >= 0.0);
        CHECK(w[i] == doctest::Approx(w[(size - i) % size]).epsilon(1e-13));
        total += w[i];
      }
      CHECK(total * grid.spacing() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("discretization rejects bad grids") {
  CHECK_THROWS(GridSpec(16.0, 31));
  CHECK_THROWS(GridSpec(16.0, 2));
  CHECK(domain_resolves_kernel(Kernel(KernelFamily::gaussian, 1.0), 16.0));
  CHECK_FALSE(domain_resolves_kernel(Kernel(KernelFamily::gaussian, 3.0), 16.0));
}

TEST_CASE("kernel sampling moments") {
  const int n = 100000;

  SUBCASE("tophat mean") {
    const double radius = 1.5;
    Rng rng(1234);
    const Kernel k(KernelFamily::tophat, radius);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = k.sample(rng);
      CHECK(std::abs(x) <= radius);
      mean += x;
    }
    mean /= n;
    const double sd = radius / std::sqrt(3.0);
    CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
  }

  SUBCASE("laplace variance") {
    const double b = 0.7;
    Rng rng(99);
    const Kernel k(KernelFamily::laplace, b);
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = k.sample(rng);
      var += x * x;
    }
    var /= n;
    CHECK(var == doctest::Approx(2.0 * b * b).epsilon(0.05));
  }

  SUBCASE("gaussian variance") {
    Rng rng(7);
    const Kernel k(KernelFamily::gaussian, 2.0);
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = k.sample(rng);
      var += x * x;
    }
    var /= n;
    CHECK(var == doctest::Approx(4.0).epsilon(0.05));
  }

  SUBCASE("determinism under equal rng state") {
    for (auto family : {KernelFamily::gaussian, KernelFamily::tophat, KernelFamily::laplace}) {
      const Kernel k(family, 1.0);
      Rng a(42), b(42);
      for (int i = 0; i < 100; ++i) CHECK(k.sample(a) == k.sample(b));
    }
  }
}

TEST_CASE("validation of the canonical parameter set") {
  const auto rep = validate_params(canonical_params());
  CHECK(rep.bigmort_ok);
  CHECK(rep.bigmort_margin == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(rep.bigcomp_ok);  // 8 a >= 4 a everywhere
  CHECK(rep.c_lower_ok);
  CHECK(rep.contraction_q == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("validation rejects the marginal set") {
  ModelParams p = canonical_params();
  p.m = 8.0;
  p.weight_c = 1.0;
  const auto rep = validate_params(p);
  CHECK_FALSE(rep.bigmort_ok);  // margin is exactly 0, inequality is strict
  CHECK(rep.bigmort_margin == doctest::Approx(0.0));
  CHECK_FALSE(rep.bigcomp_ok);  // needs a- >= 4 a+ pointwise, equal densities fail
  CHECK(rep.bigcomp_margin < 0.0);
}

TEST_CASE("C lower bound is non-strict") {
  ModelParams p = canonical_params();
  p.weight_c = 4.0 / (16.0 * M_E - 1.0);
  CHECK(validate_params(p).c_lower_ok);
  p.weight_c *= 0.999;
  CHECK_FALSE(validate_params(p).c_lower_ok);
}

TEST_CASE("validation is monotone in m and reports q exactly") {
  ModelParams p = canonical_params();
  bool was_ok = false;
  for (double m : {10.0, 20.0, 36.0, 36.001, 40.0, 100.0}) {
    p.m = m;
    const auto rep = validate_params(p);
    if (was_ok) CHECK(rep.bigmort_ok);  // increasing m never turns true to false
    was_ok = rep.bigmort_ok;
    CHECK(rep.contraction_q == 4.0 * (p.kappa_plus + p.weight_c * p.kappa_minus) / p.m);
  }
}

TEST_CASE("periodized density sums images") {
  const Kernel k(KernelFamily::gaussian, 1.0);
  const double L = 6.0;
  double direct = 0.0;
  for (int n = -10; n <= 10; ++n) direct += k.density(1.0 + n * L);
  CHECK(periodized_density(k, 1.0, L) == doctest::Approx(direct).epsilon(1e-12));
}
