#include "bdlp/convolve.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace bdlp {

namespace {
// The FFTW planner is not thread-safe; plan creation and destruction are
// serialized globally.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralConvolver::SpectralConvolver(GridSpec grid) : grid_(grid), half_(grid.size / 2 + 1) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = fftw_alloc_real(grid_.size);
  spec_ = fftw_alloc_complex(half_);
  plan_forward_ = fftw_plan_dft_r2c_1d(grid_.size, real_, static_cast<fftw_complex*>(spec_),
                                       FFTW_ESTIMATE);
  plan_backward_ = fftw_plan_dft_c2r_1d(grid_.size, static_cast<fftw_complex*>(spec_), real_,
                                        FFTW_ESTIMATE);
  if (!plan_forward_ || !plan_backward_) throw std::runtime_error("SpectralConvolver: fftw planning failed");
}

SpectralConvolver::~SpectralConvolver() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_forward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  if (plan_backward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  fftw_free(real_);
  fftw_free(spec_);
}

std::vector<std::complex<double>> SpectralConvolver::symbol(std::span<const double> row) {
  if (static_cast<int>(row.size()) != grid_.size)
    throw std::invalid_argument("SpectralConvolver::symbol: row size does not match grid");
  std::memcpy(real_, row.data(), sizeof(double) * grid_.size);
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  auto* s = static_cast<fftw_complex*>(spec_);
  std::vector<std::complex<double>> out(half_);
  for (int k = 0; k < half_; ++k) out[k] = {s[k][0], s[k][1]};
  return out;
}

void SpectralConvolver::convolve_into(const std::vector<std::complex<double>>& kernel_symbol,
                                      std::span<const double> f, std::span<double> out) {
  if (static_cast<int>(f.size()) != grid_.size || static_cast<int>(out.size()) != grid_.size)
    throw std::invalid_argument("SpectralConvolver::convolve: size does not match grid");
  if (static_cast<int>(kernel_symbol.size()) != half_)
    throw std::invalid_argument("SpectralConvolver::convolve: bad kernel symbol");
  std::memcpy(real_, f.data(), sizeof(double) * grid_.size);
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  auto* s = static_cast<fftw_complex*>(spec_);
  const double scale = grid_.spacing() / grid_.size;  // h times the c2r 1/M
  for (int k = 0; k < half_; ++k) {
    const std::complex<double> v = std::complex<double>(s[k][0], s[k][1]) * kernel_symbol[k] * scale;
    s[k][0] = v.real();
    s[k][1] = v.imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_backward_));
  std::memcpy(out.data(), real_, sizeof(double) * grid_.size);
}

std::vector<double> SpectralConvolver::convolve(
    const std::vector<std::complex<double>>& kernel_symbol, std::span<const double> f) {
  std::vector<double> out(grid_.size);
  convolve_into(kernel_symbol, f, out);
  return out;
}

std::vector<double> convolve_direct(std::span<const double> row, std::span<const double> f,
                                    double h) {
  const int m = static_cast<int>(row.size());
  if (static_cast<int>(f.size()) != m)
    throw std::invalid_argument("convolve_direct: size mismatch");
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      int d = (i - j) % m;
      if (d < 0) d += m;
      s += row[d] * f[j];
    }
    out[i] = h * s;
  }
  return out;
}

}  // namespace bdlp
