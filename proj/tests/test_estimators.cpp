#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bdlp/estimators.hpp"
#include "bdlp/vlasov.hpp"

using namespace bdlp;

namespace {

ModelParams particle_params(double eps = 0.1) {
  ModelParams p;
  p.a_minus = Kernel(KernelFamily::gaussian, 1.0);
  p.a_plus = Kernel(KernelFamily::gaussian, 1.0);
  p.m = 40.0;
  p.kappa_minus = 1.0;
  p.kappa_plus = 1.0;
  p.weight_c = 8.0;
  p.eps = eps;
  p.length = 20.0;
  p.grid_size = 64;
  return p;
}

}  // namespace

TEST_CASE("binned density calibration on a fresh poisson sample") {
  const ModelParams p = particle_params();
  IbmSimulator sim(p);
  const Field rho0 = Field::constant(p.grid(), 4.0);
  const std::vector<double> snaps{0.0};
  const auto ens = sim.run_ensemble(rho0, 0.0, snaps, 500, 20240801);

  const double w = 0.5;
  const auto dens = empirical_density(ens, 0, w);
  REQUIRE(dens.bin_count() == 40);

  // per-bin 3 sigma band of the averaged Poisson counts
  const double sigma = std::sqrt(4.0 * p.eps / (w * 500.0));
  for (double v : dens.values) CHECK(std::abs(v - 4.0) <= 3.0 * sigma);

  // bookkeeping identity: integral equals eps times the mean count
  double mean_count = 0.0;
  for (const auto& rep : ens.replicates)
    mean_count += static_cast<double>(rep[0].positions.size());
  mean_count /= static_cast<double>(ens.replicates.size());
  CHECK(dens.integral() == doctest::Approx(p.eps * mean_count).epsilon(1e-12));
}

TEST_CASE("empty ensembles give all-zero bins") {
  const ModelParams p = particle_params();
  IbmSimulator sim(p);
  const auto ens =
      sim.run_ensemble(Field::constant(p.grid(), 0.0), 0.0, std::vector<double>{0.0}, 10, 3);
  const auto dens = empirical_density(ens, 0, 0.5);
  for (double v : dens.values) CHECK(v == 0.0);
  CHECK(dens.integral() == 0.0);
}

TEST_CASE("pair correlation of a poisson field is flat") {
  const ModelParams p = particle_params();
  IbmSimulator sim(p);
  const Field rho0 = Field::constant(p.grid(), 4.0);
  const auto ens = sim.run_ensemble(rho0, 0.0, std::vector<double>{0.0}, 500, 424242);
  const auto pc = pair_correlation(ens, 0, 12, 3.0);
  REQUIRE(pc.g.size() == 12);
  for (int b = 0; b < 12; ++b) {
    CHECK(pc.g[b] >= 0.0);
    CHECK(std::abs(pc.g[b] - 1.0) < 0.05);
    CHECK(pc.stderr_g[b] > 0.0);
    CHECK(pc.stderr_g[b] < 0.05);
  }
}

TEST_CASE("pair correlation bookkeeping on a two-particle replicate") {
  const ModelParams p = particle_params();
  EnsembleResult ens;
  ens.eps = p.eps;
  ens.length = p.length;
  ens.snapshot_times = {0.0};
  ens.replicates = {{Snapshot{0.0, {1.0, 2.2}}}};
  const auto pc = pair_correlation(ens, 0, 10, 3.0);
  int nonzero = 0;
  for (double v : pc.g) nonzero += v > 0.0 ? 1 : 0;
  CHECK(nonzero == 1);  // the single separation lands in exactly one bin
  CHECK_THROWS(pair_correlation(ens, 0, 10, 11.0));  // r_max beyond L/2
}

TEST_CASE("l2 distance between binned densities") {
  const ModelParams p = particle_params();
  const GridSpec grid = p.grid();

  SUBCASE("field binned against itself vanishes") {
    const Field f = Field::sinusoid(grid, 4.0, 0.5, 1);
    const auto binned = bin_field(f, 0.5);
    CHECK(l2_error(binned, f) == 0.0);
    // binning preserves the integral
    CHECK(binned.integral() == doctest::Approx(f.integral()).epsilon(1e-12));
  }

  SUBCASE("constant offset has error delta sqrt(L)") {
    const double delta = 0.37;
    const auto a = bin_field(Field::constant(grid, 2.0), 0.5);
    const Field b = Field::constant(grid, 2.0 + delta);
    CHECK(l2_error(a, b) == doctest::Approx(delta * std::sqrt(p.length)).epsilon(1e-12));
  }

  SUBCASE("symmetric in its arguments") {
    const Field f = Field::sinusoid(grid, 4.0, 0.3, 2);
    const Field g = Field::constant(grid, 3.0);
    CHECK(l2_error(bin_field(f, 0.5), g) ==
          doctest::Approx(l2_error(bin_field(g, 0.5), f)).epsilon(1e-12));
  }

  SUBCASE("incompatible bins are rejected") {
    const auto a = bin_field(Field::constant(grid, 1.0), 0.5);
    const auto b = bin_field(Field::constant(grid, 1.0), 1.0);
    CHECK_THROWS(l2_error(a, b));
  }
}

TEST_CASE("epsilon sweep produces sane rows") {
  const ModelParams p = particle_params();
  const Field rho0 = Field::sinusoid(p.grid(), 4.0, 0.5, 1);
  SweepSettings st;
  st.horizon = 0.02;
  st.snapshot_times = {0.01, 0.02};
  st.eps_list = {0.4, 0.2};
  st.replicates = 40;
  st.bin_width = 0.5;
  st.solver_dt = 2e-4;
  const auto rows = epsilon_sweep(p, rho0, st, 5150);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.l2));
    CHECK(row.l2 > 0.0);
    CHECK(row.stderr_l2 > 0.0);
    CHECK(row.stderr_l2 < row.l2);
  }
  // same (eps, snapshot) grid as requested, ordered eps-major
  CHECK(rows[0].eps == 0.4);
  CHECK(rows[1].eps == 0.4);
  CHECK(rows[2].eps == 0.2);
  CHECK(rows[3].eps == 0.2);
  CHECK(rows[0].time == doctest::Approx(0.01));
  CHECK(rows[1].time == doctest::Approx(0.02));
}

TEST_CASE("estimates are invariant under replicate permutation") {
  const ModelParams p = particle_params(0.4);
  IbmSimulator sim(p);
  const Field rho0 = Field::constant(p.grid(), 2.0);
  auto ens = sim.run_ensemble(rho0, 0.01, std::vector<double>{0.01}, 8, 31415);
  CHECK(ens.seeds.size() == ens.replicates.size());

  const auto dens = empirical_density(ens, 0, 0.5);
  const auto pc = pair_correlation(ens, 0, 6, 3.0);
  std::reverse(ens.replicates.begin(), ens.replicates.end());
  const auto dens_r = empirical_density(ens, 0, 0.5);
  const auto pc_r = pair_correlation(ens, 0, 6, 3.0);
  for (int b = 0; b < dens.bin_count(); ++b)
    CHECK(dens.values[b] == doctest::Approx(dens_r.values[b]).epsilon(1e-14));
  for (std::size_t b = 0; b < pc.g.size(); ++b) {
    CHECK(pc.g[b] == doctest::Approx(pc_r.g[b]).epsilon(1e-12));
    CHECK(pc.stderr_g[b] == doctest::Approx(pc_r.stderr_g[b]).epsilon(1e-10));
  }
}
