#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bdlp/convolve.hpp"
#include "bdlp/grid.hpp"
#include "bdlp/params.hpp"

namespace bdlp {

// Density trajectory on a uniform time grid t_k = k dt, one grid row per node.
struct Trajectory {
  GridSpec grid;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> nodes;

  std::size_t node_count() const { return nodes.size(); }
  std::span<const double> node(std::size_t k) const { return nodes[k]; }
  Field field(std::size_t k) const { return Field(grid, nodes[k]); }

  // Index of the node at time t (must hit a node up to rounding).
  std::size_t index_of(double t) const;

  double min_value() const;
  double max_value() const;
  // sup over nodes and sites of |a - b|
  double sup_distance(const Trajectory& other) const;
};

struct PicardDiagnostics {
  std::vector<double> differences;  // d_n = sup |v^{n+1} - v^n|
  std::vector<double> ratios;       // d_{n+1} / d_n over nonzero d_n
  double contraction_q = 0.0;       // 4 (kappa+ + C kappa-) / m
  double tol = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct PicardOptions {
  double horizon = 0.1;
  double dt = 1e-3;
  double tol = 1e-8;
  int max_iter = 200;
  bool allow_out_of_regime = false;
  // When positive, the fixed-point problem is restarted on consecutive
  // sub-horizons of this length to limit quadrature drift on long runs.
  double restart_every = 0.0;
};

// Thrown when an explicit step produces values below -1e-10 (step too large).
struct StabilityError : std::runtime_error {
  StabilityError(const std::string& msg, double when) : std::runtime_error(msg), time(when) {}
  double time;
};

// Thrown when the fixed-point iteration hits max_iter before reaching tol.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& msg, PicardDiagnostics diag)
      : std::runtime_error(msg), diagnostics(std::move(diag)) {}
  PicardDiagnostics diagnostics;
};

// Thrown when picard() is asked to run outside the guaranteed contraction
// regime without the explicit override.
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver for d rho/dt = kappa+ (a+ * rho) - kappa- rho (a- * rho) - m rho on
// the periodic grid, by fixed-point iteration of the mild-solution map and by
// an independent explicit stepper.
class VlasovSolver {
 public:
  explicit VlasovSolver(const ModelParams& p);

  const ModelParams& params() const { return params_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& row_minus() const { return row_minus_; }
  const std::vector<double>& row_plus() const { return row_plus_; }

  std::vector<double> convolve_minus(std::span<const double> f);
  std::vector<double> convolve_plus(std::span<const double> f);

  // kappa+ (a+ * rho) - kappa- rho (a- * rho) - m rho
  std::vector<double> rhs(std::span<const double> rho);

  // Classical explicit 4th-order integration; requires dt <= 0.5/m, does not
  // clamp negatives (values below -1e-10 raise StabilityError).
  Trajectory rk4(const Field& rho0, double horizon, double dt);

  // Integrates the linear comparison problem dr/dt = kappa+ (a+ * r) - m r,
  // whose solution dominates the nonlinear one pointwise.
  Trajectory linear_upper(const Field& rho0, double horizon, double dt);

  // One application of the mild-solution map: solves the linear problem with
  // frozen environment v, via trapezoidal quadrature of
  //   u_t = exp(-int_0^t (m + kappa- (a- * v_s)) ds) rho0
  //       + int_0^t exp(-int_s^t ...) kappa+ (a+ * v_s) ds.
  // Requires v >= 0; output is nonnegative with u_0 = rho0 exactly.
  Trajectory phi_map(const Field& rho0, const Trajectory& v);

  // Fixed-point iteration v <- phi(v) from the time-constant extension of
  // rho0, until sup |v^{n+1} - v^n| <= tol.
  std::pair<Trajectory, PicardDiagnostics> picard(const Field& rho0, const PicardOptions& opt);

 private:
  Trajectory integrate(const Field& rho0, double horizon, double dt, bool linear);
  std::pair<Trajectory, PicardDiagnostics> picard_single(const Field& rho0,
                                                         const PicardOptions& opt);

  ModelParams params_;
  GridSpec grid_;
  std::vector<double> row_minus_, row_plus_;
  SpectralConvolver conv_;
  std::vector<std::complex<double>> symbol_minus_, symbol_plus_;
};

// Spatially constant solution: rho(t) = a rho0 e^{a t} / (a + kappa- rho0 (e^{a t} - 1))
// with a = kappa+ - m, continued by rho0 / (1 + kappa- rho0 t) at a = 0.
double riccati_reference(const ModelParams& p, double rho0, double t);

}  // namespace bdlp
