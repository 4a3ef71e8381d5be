#include "bdlp/params.hpp"

#include <cmath>

namespace bdlp {

ValidationReport validate_params(const ModelParams& p) {
  p.check();
  ValidationReport rep;

  rep.bigmort_margin = p.m - 4.0 * (p.kappa_minus * p.weight_c + p.kappa_plus);
  rep.bigmort_ok = rep.bigmort_margin > 0.0;

  rep.contraction_q = 4.0 * (p.kappa_plus + p.weight_c * p.kappa_minus) / p.m;

  rep.c_lower_threshold = 4.0 / (16.0 * M_E - 1.0);
  rep.c_lower_ok = p.weight_c >= rep.c_lower_threshold;

  // Pointwise comparison on a window covering all but 1e-6 of either kernel's
  // mass; evenness lets us scan x >= 0 only.
  const double window =
      std::max(p.a_minus.tail_radius(1e-6), p.a_plus.tail_radius(1e-6));
  const int samples = 200001;
  double worst = std::numeric_limits<double>::infinity();
  double argmin = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = window * i / (samples - 1);
    const double margin = p.weight_c * p.kappa_minus * p.a_minus.density(x) -
                          4.0 * p.kappa_plus * p.a_plus.density(x);
    if (margin < worst) {
      worst = margin;
      argmin = x;
    }
  }
  rep.bigcomp_margin = worst;
  rep.bigcomp_argmin = argmin;
  rep.bigcomp_ok = worst >= 0.0;

  return rep;
}

}  // namespace bdlp
