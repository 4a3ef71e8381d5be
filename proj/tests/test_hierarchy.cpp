#include <doctest.h>

#include <cmath>

#include "bdlp/hierarchy.hpp"

using namespace bdlp;

namespace {

ModelParams ops_params() {
  ModelParams p;
  p.a_minus = Kernel(KernelFamily::gaussian, 1.0);
  p.a_plus = Kernel(KernelFamily::gaussian, 1.0);
  p.m = 40.0;
  p.kappa_minus = 1.0;
  p.kappa_plus = 1.0;
  p.weight_c = 8.0;
  p.eps = 0.1;
  p.length = 16.0;
  p.grid_size = 16;
  return p;
}

std::shared_ptr<const ConfigSpace> ops_space() {
  return std::make_shared<const ConfigSpace>(GridSpec(16.0, 16), 3);
}

// (A1(eps) - lambda) applied forward
QuasiObservable a1eps_minus_lambda(const HierarchyOps& ops, double lambda,
                                   const QuasiObservable& g) {
  QuasiObservable out = ops.apply(OperatorId::a1, g);
  QuasiObservable b1 = ops.apply(OperatorId::b1, g);
  b1 *= ops.params().eps;
  out += b1;
  QuasiObservable shift = g;
  shift *= -lambda;
  out += shift;
  return out;
}

}  // namespace

TEST_CASE("a1 is diagonal multiplication by -m|eta|") {
  auto space = ops_space();
  const HierarchyOps ops(space, ops_params());
  QuasiObservable g(space, 8.0);
  const std::vector<int> pair{3, 11};
  g.at(pair) = 1.0;
  const auto out = ops.apply(OperatorId::a1, g);
  for (int n = 0; n <= 3; ++n)
    for (std::size_t r = 0; r < space->level_size(n); ++r) {
      const double expect = (n == 2 && space->rank(pair) == r) ? -2.0 * 40.0 : 0.0;
      CHECK(out.value(n, r) == expect);
    }
}

TEST_CASE("b1 vanishes on singletons") {
  auto space = ops_space();
  const HierarchyOps ops(space, ops_params());
  QuasiObservable g(space, 8.0);
  for (auto& v : g.level(1)) v = 1.0;
  const auto out = ops.apply(OperatorId::b1, g);
  for (std::size_t r = 0; r < space->level_size(1); ++r) CHECK(out.value(1, r) == 0.0);
}

TEST_CASE("l_ren approaches v linearly in eps") {
  auto space = ops_space();
  Rng rng(91);
  const auto g = random_level_function(space, 8.0, 2, rng);

  auto gap_norm = [&](double eps) {
    ModelParams p = ops_params();
    p.eps = eps;
    const HierarchyOps ops(space, p);
    QuasiObservable diff = ops.apply(OperatorId::l_ren, g);
    diff -= ops.apply(OperatorId::v, g);
    return lc_norm(diff);
  };

  const HierarchyOps ops(space, ops_params());
  QuasiObservable pert = ops.apply(OperatorId::b1, g);
  pert += ops.apply(OperatorId::b2, g);

  const double at01 = gap_norm(0.1);
  const double at001 = gap_norm(0.01);
  CHECK(at01 == doctest::Approx(0.1 * lc_norm(pert)).epsilon(1e-10));
  CHECK(at01 / at001 == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("level-raising operators demand interior support") {
  auto space = ops_space();
  const HierarchyOps ops(space, ops_params());
  QuasiObservable full(space, 8.0);
  full.level(3)[7] = 1.0;
  CHECK_THROWS_AS(ops.apply(OperatorId::a2, full), TruncationError);
  CHECK_THROWS_AS(ops.apply(OperatorId::b2, full), TruncationError);
  CHECK_THROWS_AS(ops.apply(OperatorId::v, full), TruncationError);
  CHECK_THROWS_AS(ops.apply(OperatorId::l_ren, full), TruncationError);
  CHECK_THROWS_AS(ops.apply_dual(OperatorId::v_star, full), TruncationError);
  // diagonal operators are fine
  CHECK_NOTHROW(ops.apply(OperatorId::a1, full));
  CHECK_NOTHROW(ops.apply(OperatorId::b1, full));
  CHECK_NOTHROW(ops.resolvent_a1(1.0, full));
}

TEST_CASE("v_star annihilates the indicator of the empty configuration") {
  auto space = ops_space();
  const HierarchyOps ops(space, ops_params());
  CorrelationFunction k(space, 8.0);
  k.value(0, 0) = 1.0;
  const auto out = ops.apply_dual(OperatorId::v_star, k);
  for (int n = 0; n <= 3; ++n)
    for (std::size_t r = 0; r < space->level_size(n); ++r) CHECK(out.value(n, r) == 0.0);
}

TEST_CASE("l_star singleton level matches the hand expansion") {
  auto space = ops_space();
  ModelParams p = ops_params();
  p.eps = 1.0;  // eps-free parameters
  const HierarchyOps ops(space, p);
  Rng rng(4);
  const auto k = random_level_function(space, 8.0, 2, rng);
  const auto out = ops.apply_dual(OperatorId::l_star, k);

  const int m = space->site_count();
  const double h = space->spacing();
  for (int x = 0; x < m; ++x) {
    double expect = -p.m * k(std::vector<int>{x});
    for (int y = 0; y < m; ++y) {
      const int d = ((x - y) % m + m) % m;
      if (y != x) {
        std::vector<int> pair{std::min(x, y), std::max(x, y)};
        expect -= p.kappa_minus * h * ops.row_minus()[d] * k(pair);
      }
      expect += p.kappa_plus * h * ops.row_plus()[d] * k(std::vector<int>{y});
    }
    CHECK(out(std::vector<int>{x}) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("duality: forward and dual operators agree through the pairing") {
  auto space = ops_space();
  const HierarchyOps ops(space, ops_params());
  Rng rng(1001);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_level_function(space, 8.0, 2, rng);
    const auto k = random_level_function(space, 8.0, 2, rng);
    const double bound = 1e-10 * lc_norm(g) * kc_norm(k);

    const double lhs_v = pairing(ops.apply(OperatorId::v, g), k);
    const double rhs_v = pairing(g, ops.apply_dual(OperatorId::v_star, k));
    CHECK(std::abs(lhs_v - rhs_v) <= bound);

    const double eps = ops.params().eps;
    const double lhs_l = pairing(ops.apply(OperatorId::l_ren, g), k);
    const auto dual =
        scale_reps(ops.apply_dual(OperatorId::l_star, scale_reps(k, 1.0 / eps)), eps);
    const double rhs_l = pairing(g, dual);
    CHECK(std::abs(lhs_l - rhs_l) <= bound);
  }
}

TEST_CASE("resolvent of the diagonal part") {
  auto space = ops_space();
  const HierarchyOps ops(space, ops_params());
  Rng rng(66);
  const auto g = random_level_function(space, 8.0, 3, rng);

  SUBCASE("empty configuration divides by lambda") {
    const double lambda = 2.5;
    const auto out = ops.resolvent_a1(lambda, g);
    CHECK(out.value(0, 0) == doctest::Approx(-g.value(0, 0) / lambda).epsilon(1e-15));
  }

  SUBCASE("round trip is exact") {
    const double lambda = 1.0;
    const auto res = ops.resolvent_a1(lambda, g);
    const auto back = a1eps_minus_lambda(ops, lambda, res);
    for (int n = 0; n <= 3; ++n)
      for (std::size_t r = 0; r < space->level_size(n); ++r)
        CHECK(back.value(n, r) == doctest::Approx(g.value(n, r)).epsilon(1e-12));
  }

  SUBCASE("eps enters wherever the pair energy is positive") {
    const auto at0 = ops.resolvent_a1_at(0.0, 1.0, g);
    const auto at01 = ops.resolvent_a1_at(0.1, 1.0, g);
    int differing = 0;
    for (std::size_t r = 0; r < space->level_size(2); ++r) {
      const double e = ops.energy_minus(space->config(2, r));
      if (e > 1e-12 && g.value(2, r) != 0.0) {
        CHECK(at0.value(2, r) != at01.value(2, r));
        ++differing;
      }
    }
    CHECK(differing > 0);
  }
}

TEST_CASE("f_eps formula and bounds") {
  auto space = ops_space();

  SUBCASE("vanishes below two points") {
    const HierarchyOps ops(space, ops_params());
    CHECK(ops.f_eps(1.0, std::vector<int>{}) == 0.0);
    CHECK(ops.f_eps(1.0, std::vector<int>{5}) == 0.0);
  }

  SUBCASE("direct formula value on an injected kernel row") {
    // pair at unit separation with interaction energy exactly e^-1
    std::vector<double> row_minus(16, 0.0), row_plus(16, 0.0);
    row_minus[1] = row_minus[15] = std::exp(-1.0) / 2.0;
    row_plus[0] = 1.0;
    const HierarchyOps ops(space, ops_params(), row_minus, row_plus);
    const std::vector<int> pair{0, 1};
    CHECK(ops.energy_minus(pair) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    const double e = std::exp(-1.0);
    const double expect = 0.1 * e / ((80.0 + 0.1 * e + 1.0) * 81.0);
    CHECK(ops.f_eps(1.0, pair) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ops.f_eps(1.0, pair) == doctest::Approx(5.605e-6).epsilon(1e-3));
  }

  SUBCASE("exhaustive maximum stays below 1/lambda") {
    const HierarchyOps ops(space, ops_params());
    for (double lambda : {0.5, 1.0, 10.0}) {
      const double observed = ops.f_eps_max(lambda);
      CHECK(observed >= 0.0);
      CHECK(observed < 1.0 / lambda);
    }
  }
}

TEST_CASE("relative bound of A2 against A1") {
  auto space = ops_space();

  SUBCASE("sampled ratios stay under the ceiling") {
    const HierarchyOps ops(space, ops_params());
    const auto rep = ops.relative_bound_report(100, 2024);
    CHECK(rep.ceiling == doctest::Approx(0.225));
    CHECK(rep.pass);
    CHECK(rep.max_ratio <= 0.225 * (1.0 + 1e-9));
    CHECK(static_cast<int>(rep.ratios.size()) == 100);
  }

  SUBCASE("singleton indicator has a closed-form ratio for tophat kernels") {
    ModelParams p = ops_params();
    p.a_minus = Kernel(KernelFamily::tophat, 1.0);
    p.a_plus = Kernel(KernelFamily::tophat, 1.0);
    const HierarchyOps ops(space, p);
    QuasiObservable g(space, p.weight_c);
    g.at(std::vector<int>{6}) = 1.0;
    const double h = space->spacing();
    const double a0 = ops.row_minus()[0];
    const double expect =
        (p.kappa_plus + p.weight_c * p.kappa_minus * (1.0 - h * a0)) / p.m;
    const double ratio =
        lc_norm(ops.apply(OperatorId::a2, g)) / lc_norm(ops.apply(OperatorId::a1, g));
    CHECK(ratio == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ratio == doctest::Approx(0.125).epsilon(1e-12));  // a0 = 1/2 at h = 1
  }

  SUBCASE("ratios are invariant under scaling the input") {
    const HierarchyOps ops(space, ops_params());
    Rng rng(31);
    const auto g = random_level_function(space, 8.0, 2, rng, true);
    QuasiObservable scaled = g;
    scaled *= 17.5;
    const double r1 =
        lc_norm(ops.apply(OperatorId::a2, g)) / lc_norm(ops.apply(OperatorId::a1, g));
    const double r2 = lc_norm(ops.apply(OperatorId::a2, scaled)) /
                      lc_norm(ops.apply(OperatorId::a1, scaled));
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
  }
}

TEST_CASE("resolvent convergence table") {
  auto space = ops_space();
  const HierarchyOps ops(space, ops_params());

  SUBCASE("inputs without pair energy give exact zeros") {
    QuasiObservable g(space, 8.0);
    g.value(0, 0) = 0.7;
    for (auto& v : g.level(1)) v = -0.3;
    const std::vector<double> eps_list{1.0, 0.1};
    const auto table = ops.resolvent_convergence(eps_list, 1.0, g);
    for (const auto& row : table.rows) {
      CHECK(row.delta1 == 0.0);
      CHECK(row.delta2 == 0.0);
      CHECK(row.delta3 == 0.0);
    }
  }

  SUBCASE("deltas shrink linearly and the sup bound holds") {
    Rng rng(12);
    const auto g = random_level_function(space, 8.0, 2, rng);
    const std::vector<double> eps_list{1.0, 0.1, 0.05, 0.01};
    const auto table = ops.resolvent_convergence(eps_list, 1.0, g);
    REQUIRE(table.rows.size() == 4);
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      CHECK(table.rows[i + 1].delta1 <= table.rows[i].delta1);
      CHECK(table.rows[i + 1].delta2 <= table.rows[i].delta2);
      CHECK(table.rows[i + 1].delta3 <= table.rows[i].delta3);
    }
    // halving eps from 0.1 to 0.05 halves each delta within 5%
    const auto& a = table.rows[1];
    const auto& b = table.rows[2];
    CHECK(b.delta1 / a.delta1 == doctest::Approx(0.5).epsilon(0.05));
    CHECK(b.delta2 / a.delta2 == doctest::Approx(0.5).epsilon(0.05));
    CHECK(b.delta3 / a.delta3 == doctest::Approx(0.5).epsilon(0.05));
    for (const auto& row : table.rows) {
      CHECK(row.delta1 > 0.0);
      CHECK(row.resolvent_norm <= table.base_norm * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("one-point closure residual vanishes") {
  auto space = ops_space();
  const HierarchyOps ops(space, ops_params());
  const GridSpec grid = space->grid();

  CHECK(ops.chaos_residual(Field::constant(grid, 0.0)) == 0.0);

  Rng rng(88);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(grid.size);
    for (double& x : v) x = 8.0 * uniform01(rng);
    CHECK(ops.chaos_residual(Field(grid, std::move(v))) <= 1e-12);
  }
}

TEST_CASE("factorized resolvent through the truncated series") {
  auto space = ops_space();
  const HierarchyOps ops(space, ops_params());
  Rng rng(17);
  const auto g = random_level_function(space, 8.0, 2, rng);
  const double lambda = 1.0;

  double tail = 0.0;
  const auto res = ops.resolvent_l_ren(lambda, g, 40, &tail);
  QuasiObservable defect = ops.apply_l_ren_truncated(res);
  QuasiObservable lam = res;
  lam *= -lambda;
  defect += lam;
  defect -= g;
  const double residual = lc_norm(defect);
  CHECK(tail < 1e-8 * lc_norm(g));
  CHECK(residual <= std::max(1e-7 * lc_norm(g), 4.0 * tail));
}
