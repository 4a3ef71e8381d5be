#include "bdlp/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "bdlp/convolve.hpp"

namespace bdlp {

namespace {

// sorted copy of eta with the element at position pos removed
inline void remove_at(std::span<const int> eta, std::size_t pos, std::vector<int>& buf) {
  buf.clear();
  for (std::size_t i = 0; i < eta.size(); ++i)
    if (i != pos) buf.push_back(eta[i]);
}

// sorted copy of eta with `site` inserted (site must not be present)
inline void insert_site(std::span<const int> eta, int site, std::vector<int>& buf) {
  buf.clear();
  std::size_t i = 0;
  for (; i < eta.size() && eta[i] < site; ++i) buf.push_back(eta[i]);
  buf.push_back(site);
  for (; i < eta.size(); ++i) buf.push_back(eta[i]);
}

inline bool contains(std::span<const int> eta, int site) {
  return std::binary_search(eta.begin(), eta.end(), site);
}

inline int fold_index(int d, int m) {
  d %= m;
  return d < 0 ? d + m : d;
}

}  // namespace

HierarchyOps::HierarchyOps(std::shared_ptr<const ConfigSpace> space, const ModelParams& params)
    : HierarchyOps(space, params, discretize_kernel(params.a_minus, space->grid()),
                   discretize_kernel(params.a_plus, space->grid())) {}

HierarchyOps::HierarchyOps(std::shared_ptr<const ConfigSpace> space, const ModelParams& params,
                           std::vector<double> row_minus, std::vector<double> row_plus)
    : space_(std::move(space)),
      params_(params),
      row_minus_(std::move(row_minus)),
      row_plus_(std::move(row_plus)) {
  params_.check();
  if (static_cast<int>(row_minus_.size()) != space_->site_count() ||
      static_cast<int>(row_plus_.size()) != space_->site_count())
    throw std::invalid_argument("HierarchyOps: kernel row size does not match grid");
  energy_minus_.resize(space_->max_points() + 1);
  for (int n = 0; n <= space_->max_points(); ++n) {
    energy_minus_[n].resize(space_->level_size(n));
    for (std::size_t r = 0; r < space_->level_size(n); ++r)
      energy_minus_[n][r] = energy(row_minus_, space_->config(n, r));
  }
}

void HierarchyOps::require_interior(const LevelFunction& f, const char* what) const {
  if (!f.supported_within(space_->max_points() - 1))
    throw TruncationError(std::string(what) +
                          ": input must vanish at the top truncation level");
}

QuasiObservable HierarchyOps::apply_a2(const QuasiObservable& g) const {
  const int top = space_->max_points();
  const int m = space_->site_count();
  const double h = space_->spacing();
  QuasiObservable out(space_, g.weight());
  std::vector<int> buf;
  buf.reserve(top);
  for (int n = 1; n <= top; ++n) {
    for (std::size_t r = 0; r < space_->level_size(n); ++r) {
      const auto eta = space_->config(n, r);
      double val = 0.0;
      // removal: -kappa- sum_x [sum_{y in eta\x} a-(x-y)] G(eta \ x)
      for (std::size_t ix = 0; ix < eta.size(); ++ix) {
        double inner = 0.0;
        for (std::size_t iy = 0; iy < eta.size(); ++iy)
          if (iy != ix) inner += row_minus_[fold_index(eta[ix] - eta[iy], m)];
        remove_at(eta, ix, buf);
        val -= params_.kappa_minus * inner * g(buf);
      }
      // replacement: +kappa+ sum_{y in eta} h sum_x a+(x-y) G(eta\y cup x),
      // skipping x already in eta\y (diagonal convention)
      for (std::size_t iy = 0; iy < eta.size(); ++iy) {
        remove_at(eta, iy, buf);
        const std::vector<int> base = buf;
        for (int x = 0; x < m; ++x) {
          if (contains(base, x)) continue;
          insert_site(base, x, buf);
          val += params_.kappa_plus * h * row_plus_[fold_index(x - eta[iy], m)] * g(buf);
        }
      }
      out.value(n, r) = val;
    }
  }
  return out;
}

QuasiObservable HierarchyOps::apply_b2(const QuasiObservable& g) const {
  const int top = space_->max_points();
  const int m = space_->site_count();
  const double h = space_->spacing();
  QuasiObservable out(space_, g.weight());
  std::vector<int> buf;
  buf.reserve(top + 1);
  for (int n = 1; n <= top - 1; ++n) {  // extension reads level n+1
    for (std::size_t r = 0; r < space_->level_size(n); ++r) {
      const auto eta = space_->config(n, r);
      double val = 0.0;
      for (std::size_t iy = 0; iy < eta.size(); ++iy) {
        for (int x = 0; x < m; ++x) {
          if (contains(eta, x)) continue;
          insert_site(eta, x, buf);
          val += row_plus_[fold_index(x - eta[iy], m)] * g(buf);
        }
      }
      out.value(n, r) = params_.kappa_plus * h * val;
    }
  }
  return out;
}

QuasiObservable HierarchyOps::apply(OperatorId id, const QuasiObservable& g) const {
  const int top = space_->max_points();
  switch (id) {
    case OperatorId::a1: {
      QuasiObservable out = g;
      for (int n = 0; n <= top; ++n)
        for (double& v : out.level(n)) v *= -params_.m * n;
      return out;
    }
    case OperatorId::b1: {
      QuasiObservable out = g;
      for (int n = 0; n <= top; ++n)
        for (std::size_t r = 0; r < space_->level_size(n); ++r)
          out.value(n, r) *= -params_.kappa_minus * energy_minus_[n][r];
      return out;
    }
    case OperatorId::a2:
      require_interior(g, "A2");
      return apply_a2(g);
    case OperatorId::b2:
      require_interior(g, "B2");
      return apply_b2(g);
    case OperatorId::v: {
      require_interior(g, "V");
      QuasiObservable out = apply_a2(g);
      auto a1 = apply(OperatorId::a1, g);
      out += a1;
      return out;
    }
    case OperatorId::l_ren: {
      require_interior(g, "L_ren");
      QuasiObservable out = apply_a2(g);
      out += apply(OperatorId::a1, g);
      QuasiObservable pert = apply_b2(g);
      pert += apply(OperatorId::b1, g);
      pert *= params_.eps;
      out += pert;
      return out;
    }
    case OperatorId::v_star:
    case OperatorId::l_star:
      throw std::invalid_argument("apply: dual operators go through apply_dual");
  }
  throw std::invalid_argument("apply: unknown operator");
}

QuasiObservable HierarchyOps::apply_l_ren_truncated(const QuasiObservable& g) const {
  QuasiObservable out = apply_a2(g);
  out += apply(OperatorId::a1, g);
  QuasiObservable pert = apply_b2(g);
  pert += apply(OperatorId::b1, g);
  pert *= params_.eps;
  out += pert;
  return out;
}

CorrelationFunction HierarchyOps::apply_dual(OperatorId id, const CorrelationFunction& k) const {
  if (id != OperatorId::v_star && id != OperatorId::l_star)
    throw std::invalid_argument("apply_dual: expected v_star or l_star");
  require_interior(k, id == OperatorId::v_star ? "V_star" : "L_star");

  const int top = space_->max_points();
  const int m = space_->site_count();
  const double h = space_->spacing();
  CorrelationFunction out(space_, k.weight());
  std::vector<int> buf;
  buf.reserve(top + 1);

  for (int n = 0; n <= top; ++n) {
    for (std::size_t r = 0; r < space_->level_size(n); ++r) {
      const auto eta = space_->config(n, r);
      double val = 0.0;

      if (id == OperatorId::v_star) {
        val = -params_.m * n * k.value(n, r);
        // -kappa- int dy sum_{x in eta} a-(x-y) k(eta cup y)
        if (n + 1 <= top) {
          double gain = 0.0;
          for (int y = 0; y < m; ++y) {
            if (contains(eta, y)) continue;
            double inner = 0.0;
            for (int x : eta) inner += row_minus_[fold_index(x - y, m)];
            if (inner == 0.0) continue;
            insert_site(eta, y, buf);
            gain += inner * k(buf);
          }
          val -= params_.kappa_minus * h * gain;
        }
        // +kappa+ sum_{x in eta} int dy a+(x-y) k(eta\x cup y)
        for (std::size_t ix = 0; ix < eta.size(); ++ix) {
          remove_at(eta, ix, buf);
          const std::vector<int> base = buf;
          double gain = 0.0;
          for (int y = 0; y < m; ++y) {
            if (contains(base, y)) continue;
            insert_site(base, y, buf);
            gain += row_plus_[fold_index(eta[ix] - y, m)] * k(buf);
          }
          val += params_.kappa_plus * h * gain;
        }
      } else {
        // L_star with the competition terms carrying the params eps
        const double ekm = params_.eps * params_.kappa_minus;
        val = -(params_.m * n + ekm * energy_minus_[n][r]) * k.value(n, r);
        // +kappa+ sum_x [sum_{y in eta\x} a+(x-y)] k(eta \ x)
        for (std::size_t ix = 0; ix < eta.size(); ++ix) {
          double inner = 0.0;
          for (std::size_t iy = 0; iy < eta.size(); ++iy)
            if (iy != ix) inner += row_plus_[fold_index(eta[ix] - eta[iy], m)];
          remove_at(eta, ix, buf);
          val += params_.kappa_plus * inner * k(buf);
        }
        // +kappa+ sum_{y in eta} h sum_x a+(x-y) k(eta\y cup x)
        for (std::size_t iy = 0; iy < eta.size(); ++iy) {
          remove_at(eta, iy, buf);
          const std::vector<int> base = buf;
          double gain = 0.0;
          for (int x = 0; x < m; ++x) {
            if (contains(base, x)) continue;
            insert_site(base, x, buf);
            gain += row_plus_[fold_index(x - eta[iy], m)] * k(buf);
          }
          val += params_.kappa_plus * h * gain;
        }
        // -eps kappa- sum_{y in eta} h sum_x a-(x-y) k(eta cup x)
        if (n + 1 <= top) {
          double gain = 0.0;
          for (int x = 0; x < m; ++x) {
            if (contains(eta, x)) continue;
            double inner = 0.0;
            for (int y : eta) inner += row_minus_[fold_index(x - y, m)];
            if (inner == 0.0) continue;
            insert_site(eta, x, buf);
            gain += inner * k(buf);
          }
          val -= ekm * h * gain;
        }
      }
      out.value(n, r) = val;
    }
  }
  return out;
}

QuasiObservable HierarchyOps::resolvent_a1_at(double eps, double lambda,
                                              const QuasiObservable& g) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_a1: lambda must be positive");
  if (eps < 0.0) throw std::invalid_argument("resolvent_a1: eps must be nonnegative");
  QuasiObservable out = g;
  for (int n = 0; n <= space_->max_points(); ++n)
    for (std::size_t r = 0; r < space_->level_size(n); ++r) {
      const double denom =
          params_.m * n + eps * params_.kappa_minus * energy_minus_[n][r] + lambda;
      out.value(n, r) = -g.value(n, r) / denom;
    }
  return out;
}

QuasiObservable HierarchyOps::resolvent_a1(double lambda, const QuasiObservable& g) const {
  return resolvent_a1_at(params_.eps, lambda, g);
}

double HierarchyOps::f_eps(double lambda, std::span<const int> eta) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("f_eps: lambda must be positive");
  const double e = energy_minus(eta);
  const double n = static_cast<double>(eta.size());
  const double num = params_.eps * params_.kappa_minus * e;
  return num / ((params_.m * n + num + lambda) * (params_.m * n + lambda));
}

double HierarchyOps::f_eps_max(double lambda) const {
  double best = 0.0;
  for (int n = 0; n <= space_->max_points(); ++n)
    for (std::size_t r = 0; r < space_->level_size(n); ++r) {
      const double num = params_.eps * params_.kappa_minus * energy_minus_[n][r];
      const double val = num / ((params_.m * n + num + lambda) * (params_.m * n + lambda));
      best = std::max(best, val);
    }
  return best;
}

BoundReport HierarchyOps::relative_bound_report(int samples, std::uint64_t seed) const {
  if (samples < 1) throw std::invalid_argument("relative_bound_report: samples must be >= 1");
  BoundReport rep;
  rep.samples = samples;
  rep.ceiling = (params_.kappa_minus * params_.weight_c + params_.kappa_plus) / params_.m;
  for (int s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, s));
    const auto g = random_level_function(space_, params_.weight_c, space_->max_points() - 1,
                                         rng, /*zero_empty=*/true);
    const double denom = lc_norm(apply(OperatorId::a1, g));
    if (denom == 0.0) continue;
    const double ratio = lc_norm(apply(OperatorId::a2, g)) / denom;
    rep.ratios.push_back(ratio);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst_sample = s;
    }
  }
  rep.pass = rep.max_ratio <= rep.ceiling * (1.0 + 1e-9);
  return rep;
}

ResolventTable HierarchyOps::resolvent_convergence(std::span<const double> eps_list,
                                                   double lambda,
                                                   const QuasiObservable& g) const {
  require_interior(g, "resolvent_convergence");
  ResolventTable table;
  table.lambda = lambda;
  const auto base = resolvent_a1_at(0.0, lambda, g);
  table.base_norm = lc_norm(base);
  for (double eps : eps_list) {
    ResolventRow row;
    row.eps = eps;
    const auto res = resolvent_a1_at(eps, lambda, g);
    row.resolvent_norm = lc_norm(res);
    QuasiObservable diff = res;
    diff -= base;
    row.delta1 = lc_norm(diff);
    QuasiObservable b1 = apply(OperatorId::b1, res);
    b1 *= eps;
    row.delta2 = lc_norm(b1);
    QuasiObservable b2 = apply_b2(res);
    b2 *= eps;
    row.delta3 = lc_norm(b2);
    table.rows.push_back(row);
  }
  return table;
}

double HierarchyOps::chaos_residual(const Field& rho) const {
  if (rho.grid() != space_->grid())
    throw std::invalid_argument("chaos_residual: field grid does not match space");

  SpectralConvolver conv(space_->grid());
  const auto cm = conv.convolve(conv.symbol(row_minus_), rho.values());
  const auto cp = conv.convolve(conv.symbol(row_plus_), rho.values());

  // Both sides in extended precision from the shared convolution outputs.
  const int top = space_->max_points();
  std::vector<std::vector<long double>> exponent(top + 1);
  exponent[0] = {1.0L};
  for (int n = 1; n <= top; ++n) {
    exponent[n].resize(space_->level_size(n));
    for (std::size_t r = 0; r < space_->level_size(n); ++r) {
      long double p = 1.0L;
      for (int site : space_->config(n, r)) p *= static_cast<long double>(rho[site]);
      exponent[n][r] = p;
    }
  }

  std::vector<long double> v(space_->site_count());
  for (int i = 0; i < space_->site_count(); ++i)
    v[i] = static_cast<long double>(params_.kappa_plus) * cp[i] -
           static_cast<long double>(params_.kappa_minus) * rho[i] * cm[i] -
           static_cast<long double>(params_.m) * rho[i];

  long double worst = 0.0L;
  std::vector<int> buf;
  for (int n = 0; n <= top - 1; ++n) {
    for (std::size_t r = 0; r < space_->level_size(n); ++r) {
      const auto eta = space_->config(n, r);
      const long double e_eta = exponent[n][r];
      long double drop_sum = 0.0L;  // kappa+ sum_x cp(x) e(eta \ x)
      long double comp_sum = 0.0L;  // sum_x cm(x)
      long double rhs = 0.0L;
      for (std::size_t ix = 0; ix < eta.size(); ++ix) {
        remove_at(eta, ix, buf);
        const long double e_rest = exponent[n - 1][space_->rank(buf)];
        drop_sum += static_cast<long double>(cp[eta[ix]]) * e_rest;
        comp_sum += static_cast<long double>(cm[eta[ix]]);
        rhs += v[eta[ix]] * e_rest;
      }
      const long double lhs = -static_cast<long double>(params_.m) * n * e_eta -
                              static_cast<long double>(params_.kappa_minus) * comp_sum * e_eta +
                              static_cast<long double>(params_.kappa_plus) * drop_sum;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return static_cast<double>(worst);
}

QuasiObservable HierarchyOps::resolvent_l_ren(double lambda, const QuasiObservable& g,
                                              int terms, double* tail_bound) const {
  if (terms < 1) throw std::invalid_argument("resolvent_l_ren: terms must be >= 1");
  QuasiObservable term = g;
  QuasiObservable acc = g;
  double prev_norm = lc_norm(g);
  double ratio = 0.0;
  for (int j = 0; j < terms; ++j) {
    // term <- -C_eps term, C_eps = (A2 + eps B2)(A1(eps) - lambda)^{-1}
    const auto res = resolvent_a1(lambda, term);
    QuasiObservable next = apply_a2(res);
    QuasiObservable b2 = apply_b2(res);
    b2 *= params_.eps;
    next += b2;
    next *= -1.0;
    acc += next;
    const double norm = lc_norm(next);
    if (prev_norm > 0.0) ratio = std::max(ratio, norm / prev_norm);
    prev_norm = norm;
    term = std::move(next);
    if (norm == 0.0) break;
  }
  if (tail_bound) {
    // geometric tail of the series, pushed through the outer resolvent
    *tail_bound = (ratio < 1.0 && ratio > 0.0)
                      ? prev_norm * ratio / (1.0 - ratio) / lambda
                      : prev_norm / lambda;
  }
  return resolvent_a1(lambda, acc);
}

}  // namespace bdlp
