#include "bdlp/vlasov.hpp"

#include <algorithm>
#include <cmath>

namespace bdlp {

std::size_t Trajectory::index_of(double t) const {
  const double k = t / dt;
  const auto idx = static_cast<std::size_t>(std::llround(k));
  if (idx >= times.size() || std::abs(times[idx] - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw std::invalid_argument("Trajectory::index_of: time does not hit a node");
  return idx;
}

double Trajectory::min_value() const {
  double r = nodes.empty() ? 0.0 : nodes[0][0];
  for (const auto& row : nodes)
    for (double v : row) r = std::min(r, v);
  return r;
}

double Trajectory::max_value() const {
  double r = nodes.empty() ? 0.0 : nodes[0][0];
  for (const auto& row : nodes)
    for (double v : row) r = std::max(r, v);
  return r;
}

double Trajectory::sup_distance(const Trajectory& other) const {
  if (node_count() != other.node_count() || grid != other.grid)
    throw std::invalid_argument("Trajectory::sup_distance: shape mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (int i = 0; i < grid.size; ++i) d = std::max(d, std::abs(nodes[k][i] - other.nodes[k][i]));
  return d;
}

VlasovSolver::VlasovSolver(const ModelParams& p)
    : params_(p),
      grid_(p.grid()),
      row_minus_(discretize_kernel(p.a_minus, grid_)),
      row_plus_(discretize_kernel(p.a_plus, grid_)),
      conv_(grid_) {
  params_.check();
  symbol_minus_ = conv_.symbol(row_minus_);
  symbol_plus_ = conv_.symbol(row_plus_);
}

std::vector<double> VlasovSolver::convolve_minus(std::span<const double> f) {
  return conv_.convolve(symbol_minus_, f);
}

std::vector<double> VlasovSolver::convolve_plus(std::span<const double> f) {
  return conv_.convolve(symbol_plus_, f);
}

std::vector<double> VlasovSolver::rhs(std::span<const double> rho) {
  const auto cp = convolve_plus(rho);
  const auto cm = convolve_minus(rho);
  std::vector<double> out(grid_.size);
  for (int i = 0; i < grid_.size; ++i)
    out[i] = params_.kappa_plus * cp[i] - params_.kappa_minus * rho[i] * cm[i] -
             params_.m * rho[i];
  return out;
}

namespace {

int step_count(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("solver: horizon and dt must be positive");
  return std::max(1, static_cast<int>(std::llround(horizon / dt)));
}

}  // namespace

Trajectory VlasovSolver::integrate(const Field& rho0, double horizon, double dt, bool linear) {
  if (rho0.grid() != grid_) throw std::invalid_argument("solver: field grid mismatch");
  rho0.require_nonnegative("solver initial condition");
  if (dt > 0.5 / params_.m)
    throw std::invalid_argument("rk4: dt must be at most 0.5/m for the explicit stepper");

  const int steps = step_count(horizon, dt);
  const double dt_eff = horizon / steps;

  auto f = [&](const std::vector<double>& y) {
    if (linear) {
      const auto cp = convolve_plus(y);
      std::vector<double> out(grid_.size);
      for (int i = 0; i < grid_.size; ++i)
        out[i] = params_.kappa_plus * cp[i] - params_.m * y[i];
      return out;
    }
    return rhs(y);
  };

  Trajectory traj;
  traj.grid = grid_;
  traj.dt = dt_eff;
  traj.times.resize(steps + 1);
  traj.nodes.reserve(steps + 1);
  traj.nodes.push_back({rho0.values().begin(), rho0.values().end()});

  std::vector<double> y = traj.nodes.back(), tmp(grid_.size);
  for (int s = 1; s <= steps; ++s) {
    const auto k1 = f(y);
    for (int i = 0; i < grid_.size; ++i) tmp[i] = y[i] + 0.5 * dt_eff * k1[i];
    const auto k2 = f(tmp);
    for (int i = 0; i < grid_.size; ++i) tmp[i] = y[i] + 0.5 * dt_eff * k2[i];
    const auto k3 = f(tmp);
    for (int i = 0; i < grid_.size; ++i) tmp[i] = y[i] + dt_eff * k3[i];
    const auto k4 = f(tmp);
    for (int i = 0; i < grid_.size; ++i)
      y[i] += dt_eff / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (double v : y)
      if (v < -1e-10)
        throw StabilityError("rk4: negative density beyond tolerance, reduce dt", s * dt_eff);
    traj.nodes.push_back(y);
  }
  for (int s = 0; s <= steps; ++s) traj.times[s] = s * dt_eff;
  return traj;
}

Trajectory VlasovSolver::rk4(const Field& rho0, double horizon, double dt) {
  return integrate(rho0, horizon, dt, /*linear=*/false);
}

Trajectory VlasovSolver::linear_upper(const Field& rho0, double horizon, double dt) {
  return integrate(rho0, horizon, dt, /*linear=*/true);
}

Trajectory VlasovSolver::phi_map(const Field& rho0, const Trajectory& v) {
  if (rho0.grid() != grid_ || v.grid != grid_)
    throw std::invalid_argument("phi_map: grid mismatch");
  if (v.min_value() < 0.0)
    throw std::invalid_argument("phi_map: input trajectory must be nonnegative");

  const std::size_t nodes = v.node_count();
  const double dt = v.dt;

  // Per-node convolutions of the frozen environment.
  std::vector<std::vector<double>> cm(nodes), cp(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    cm[k] = convolve_minus(v.nodes[k]);
    cp[k] = convolve_plus(v.nodes[k]);
  }

  Trajectory out;
  out.grid = grid_;
  out.dt = dt;
  out.times = v.times;
  out.nodes.assign(nodes, std::vector<double>(grid_.size));

  // For each site: cumulative trapezoid of B(s) = m + kappa- (a- * v_s) gives
  // the decay exponent; the source integral uses the recurrence
  //   I_{k+1} = e^{P_k - P_{k+1}} (I_k + dt/2 g_k) + dt/2 g_{k+1},
  // which is the composite trapezoid of e^{P(s) - P(t)} g(s) without ever
  // forming a growing exponential.
  for (int i = 0; i < grid_.size; ++i) {
    double p_prev = 0.0;
    double integral = 0.0;
    out.nodes[0][i] = rho0[i];
    for (std::size_t k = 1; k < nodes; ++k) {
      const double b_prev = params_.m + params_.kappa_minus * cm[k - 1][i];
      const double b_cur = params_.m + params_.kappa_minus * cm[k][i];
      const double p_cur = p_prev + 0.5 * dt * (b_prev + b_cur);
      const double g_prev = params_.kappa_plus * cp[k - 1][i];
      const double g_cur = params_.kappa_plus * cp[k][i];
      const double decay = std::exp(p_prev - p_cur);
      integral = decay * (integral + 0.5 * dt * g_prev) + 0.5 * dt * g_cur;
      out.nodes[k][i] = std::exp(-p_cur) * rho0[i] + integral;
      p_prev = p_cur;
    }
  }
  return out;
}

std::pair<Trajectory, PicardDiagnostics> VlasovSolver::picard_single(const Field& rho0,
                                                                     const PicardOptions& opt) {
  const int steps = step_count(opt.horizon, opt.dt);
  const double dt_eff = opt.horizon / steps;

  Trajectory v;
  v.grid = grid_;
  v.dt = dt_eff;
  v.times.resize(steps + 1);
  for (int s = 0; s <= steps; ++s) v.times[s] = s * dt_eff;
  v.nodes.assign(steps + 1, {rho0.values().begin(), rho0.values().end()});

  PicardDiagnostics diag;
  diag.tol = opt.tol;
  diag.contraction_q = validate_params(params_).contraction_q;

  for (int it = 0; it < opt.max_iter; ++it) {
    Trajectory next = phi_map(rho0, v);
    const double d = next.sup_distance(v);
    diag.differences.push_back(d);
    diag.iterations = it + 1;
    v = std::move(next);
    if (d <= opt.tol) {
      diag.converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < diag.differences.size(); ++i)
    if (diag.differences[i] > 0.0)
      diag.ratios.push_back(diag.differences[i + 1] / diag.differences[i]);

  if (!diag.converged)
    throw ConvergenceError("picard: no convergence within max_iter", diag);
  return {std::move(v), std::move(diag)};
}

std::pair<Trajectory, PicardDiagnostics> VlasovSolver::picard(const Field& rho0,
                                                              const PicardOptions& opt) {
  if (rho0.grid() != grid_) throw std::invalid_argument("picard: field grid mismatch");
  rho0.require_nonnegative("picard initial condition");
  const auto report = validate_params(params_);
  if (!report.bigmort_ok && !opt.allow_out_of_regime)
    throw RegimeError("picard: contraction not guaranteed (mortality condition fails); "
                      "pass the override to run anyway");

  if (!(opt.restart_every > 0.0) || opt.restart_every >= opt.horizon)
    return picard_single(rho0, opt);

  // Restart mode: solve consecutive sub-horizons, chaining final states.
  Trajectory total;
  PicardDiagnostics diag;
  diag.tol = opt.tol;
  diag.contraction_q = report.contraction_q;
  Field ic = rho0;
  double remaining = opt.horizon;
  double t_offset = 0.0;
  while (remaining > 1e-12 * opt.horizon) {
    PicardOptions chunk = opt;
    chunk.horizon = std::min(opt.restart_every, remaining);
    chunk.restart_every = 0.0;
    auto [traj, d] = picard_single(ic, chunk);
    diag.differences.insert(diag.differences.end(), d.differences.begin(), d.differences.end());
    diag.ratios.insert(diag.ratios.end(), d.ratios.begin(), d.ratios.end());
    diag.iterations += d.iterations;
    diag.converged = d.converged;
    const std::size_t skip = total.nodes.empty() ? 0 : 1;  // shared node
    for (std::size_t k = skip; k < traj.node_count(); ++k) {
      total.nodes.push_back(traj.nodes[k]);
      total.times.push_back(t_offset + traj.times[k]);
    }
    total.grid = traj.grid;
    total.dt = traj.dt;
    t_offset += chunk.horizon;
    remaining -= chunk.horizon;
    ic = Field(grid_, traj.nodes.back());
  }
  return {std::move(total), std::move(diag)};
}

double riccati_reference(const ModelParams& p, double rho0, double t) {
  if (rho0 < 0.0) throw std::invalid_argument("riccati_reference: rho0 must be nonnegative");
  const double alpha = p.kappa_plus - p.m;
  if (std::abs(alpha) < 1e-12) return rho0 / (1.0 + p.kappa_minus * rho0 * t);
  const double e = std::exp(alpha * t);
  const double denom = alpha + p.kappa_minus * rho0 * (e - 1.0);
  if (denom == 0.0 || (denom > 0.0) != (alpha > 0.0))
    throw std::domain_error("riccati_reference: solution pole crossed");
  return alpha * rho0 * e / denom;
}

}  // namespace bdlp
