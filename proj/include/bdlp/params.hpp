#pragma once

#include "bdlp/grid.hpp"
#include "bdlp/kernels.hpp"

namespace bdlp {

// Full description of one experiment: dispersal kernels, rates, the Banach
// weight / density cap C, the scaling parameter eps and the periodic grid.
struct ModelParams {
  Kernel a_minus;        // competition kernel
  Kernel a_plus;         // dispersal kernel
  double m = 1.0;        // mortality rate
  double kappa_minus = 1.0;  // competition strength
  double kappa_plus = 1.0;   // fecundity
  double weight_c = 1.0;     // Banach weight, also the density cap
  double eps = 1.0;          // scaling parameter, in (0, 1]
  double length = 16.0;      // domain length L
  int grid_size = 64;        // grid cells M

  GridSpec grid() const { return {length, grid_size}; }

  // kappa- and kappa+ may be zero so degenerate regimes (pure death) stay
  // expressible; mortality and the weight stay strictly positive.
  void check() const {
    if (!(m > 0.0 && weight_c > 0.0))
      throw std::invalid_argument("ModelParams: m and C must be strictly positive");
    if (kappa_minus < 0.0 || kappa_plus < 0.0)
      throw std::invalid_argument("ModelParams: kappa rates must be nonnegative");
    if (!(eps > 0.0 && eps <= 1.0))
      throw std::invalid_argument("ModelParams: eps must lie in (0, 1]");
    (void)grid();  // validates L and M
  }
};

// Outcome of checking the generator conditions. Report-only: solvers outside
// the guaranteed regime still run (the CLI downgrades failures to warnings).
struct ValidationReport {
  bool bigmort_ok = false;       // m > 4 (kappa- C + kappa+), strict
  double bigmort_margin = 0.0;   // m - 4 (kappa- C + kappa+)
  bool bigcomp_ok = false;       // C kappa- a-(x) >= 4 kappa+ a+(x) for all x
  double bigcomp_margin = 0.0;   // worst-x margin
  double bigcomp_argmin = 0.0;   // x attaining the worst margin
  bool c_lower_ok = false;       // C >= 4 / (16 e - 1), non-strict
  double c_lower_threshold = 0.0;
  double contraction_q = 0.0;    // 4 (kappa+ + C kappa-) / m

  bool all_ok() const { return bigmort_ok && bigcomp_ok && c_lower_ok; }
};

// Evaluates every condition; bigcomp is scanned on the continuous kernels
// over a symmetric window holding 99.9999% of both kernels' mass.
ValidationReport validate_params(const ModelParams& p);

}  // namespace bdlp
