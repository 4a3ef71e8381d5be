#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bdlp/config_space.hpp"
#include "bdlp/params.hpp"

namespace bdlp {

// Components of the renormalized generator on quasi-observables and the two
// dual operators on correlation functions:
//   A1 G = -m |eta| G                      B1 G = -kappa- E^{a-}(eta) G
//   A2 G = removal + replacement terms     B2 G = extension term
//   V = A1 + A2                            L_ren = A1 + A2 + eps (B1 + B2)
// V_star and L_star are their duals under the truncated pairing.
enum class OperatorId { a1, a2, b1, b2, v, l_ren, v_star, l_star };

// Thrown when an operator that shifts levels upward is applied to a function
// with mass at the top truncation level (the image would not fit).
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoundReport {
  std::vector<double> ratios;
  double max_ratio = 0.0;
  double ceiling = 0.0;
  int samples = 0;
  int worst_sample = -1;
  bool pass = false;
};

struct ResolventRow {
  double eps = 0.0;
  double delta1 = 0.0;  // resolvent difference norm
  double delta2 = 0.0;  // norm of eps B1 applied to the eps-resolvent
  double delta3 = 0.0;  // norm of eps B2 applied to the eps-resolvent
  double resolvent_norm = 0.0;
};

struct ResolventTable {
  double lambda = 1.0;
  double base_norm = 0.0;  // norm of the eps = 0 resolvent of the same input
  std::vector<ResolventRow> rows;  // in the order requested
};

// Exact discrete realization of the hierarchy operators on a truncated
// configuration space. Kernel rows default to the discretized model kernels;
// an explicit-row constructor is provided for controlled inputs.
class HierarchyOps {
 public:
  HierarchyOps(std::shared_ptr<const ConfigSpace> space, const ModelParams& params);
  HierarchyOps(std::shared_ptr<const ConfigSpace> space, const ModelParams& params,
               std::vector<double> row_minus, std::vector<double> row_plus);

  const std::shared_ptr<const ConfigSpace>& space() const { return space_; }
  const ModelParams& params() const { return params_; }
  const std::vector<double>& row_minus() const { return row_minus_; }
  const std::vector<double>& row_plus() const { return row_plus_; }

  double energy_minus(std::span<const int> eta) const { return energy(row_minus_, eta); }

  // Forward operators. A2/B2 (and V, L_ren, which contain them) require the
  // input to vanish at the top level so the image is exact in the truncation.
  QuasiObservable apply(OperatorId id, const QuasiObservable& g) const;

  // Dual operators (v_star, l_star); input must vanish at the top level.
  // l_star carries the eps-scaling of the competition terms from params.
  CorrelationFunction apply_dual(OperatorId id, const CorrelationFunction& k) const;

  // (A1(eps) - lambda)^{-1} g: exact diagonal division by
  // -(m|eta| + eps kappa- E^{a-}(eta) + lambda). Uses the params eps.
  QuasiObservable resolvent_a1(double lambda, const QuasiObservable& g) const;
  // Same with an explicit eps (eps = 0 gives the limiting resolvent).
  QuasiObservable resolvent_a1_at(double eps, double lambda, const QuasiObservable& g) const;

  // F_eps(eta) = eps kappa- E / ((m|eta| + eps kappa- E + lambda)(m|eta| + lambda)).
  double f_eps(double lambda, std::span<const int> eta) const;
  // Exhaustive maximum over the whole truncation; always < 1/lambda.
  double f_eps_max(double lambda) const;

  // Sampled check of ||A2 G|| <= ((kappa- C + kappa+)/m) ||A1 G|| on random
  // interior-supported G with G(empty) = 0.
  BoundReport relative_bound_report(int samples, std::uint64_t seed) const;

  // For each eps: resolvent difference against eps = 0 and the two scaled
  // perturbation norms; all three vanish linearly as eps -> 0.
  ResolventTable resolvent_convergence(std::span<const double> eps_list, double lambda,
                                       const QuasiObservable& g) const;

  // max over |eta| <= N-1 of the defect of the one-point closure:
  //   (V_star e_lambda(rho))(eta) - sum_{x in eta} v(x) e_lambda(rho, eta\x)
  // with v the discrete density equation right-hand side built from the same
  // grid convolutions. Zero in exact arithmetic; evaluated in extended
  // precision on both sides.
  double chaos_residual(const Field& rho) const;

  // Resolvent of L_ren through the factorization
  //   (L_ren - lambda)^{-1} = (A1(eps) - lambda)^{-1} (C_eps + 1)^{-1},
  // with the Neumann series for (C_eps + 1)^{-1} truncated after `terms`
  // steps. Level overflow inside the iteration is cut at the truncation
  // (documented approximation); the result is the resolvent of the compressed
  // operator up to the reported series tail.
  QuasiObservable resolvent_l_ren(double lambda, const QuasiObservable& g, int terms,
                                  double* tail_bound = nullptr) const;

  // L_ren with level overflow cut at the truncation, for round-trip checks of
  // the compressed resolvent. No interior-support requirement.
  QuasiObservable apply_l_ren_truncated(const QuasiObservable& g) const;

 private:
  QuasiObservable apply_a2(const QuasiObservable& g) const;
  QuasiObservable apply_b2(const QuasiObservable& g) const;
  void require_interior(const LevelFunction& f, const char* what) const;

  std::shared_ptr<const ConfigSpace> space_;
  ModelParams params_;
  std::vector<double> row_minus_, row_plus_;
  std::vector<std::vector<double>> energy_minus_;  // per level, per rank
};

}  // namespace bdlp
