#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bdlp/grid.hpp"

namespace bdlp {

// Circular convolution (a * f)(x_i) = h sum_j a_per(x_i - x_j) f(x_j) on the
// periodic grid, computed through the real-to-complex DFT. One instance owns
// its transform plans and scratch buffers and is not safe to share across
// threads; constructing instances is.
class SpectralConvolver {
 public:
  explicit SpectralConvolver(GridSpec grid);
  ~SpectralConvolver();

  SpectralConvolver(const SpectralConvolver&) = delete;
  SpectralConvolver& operator=(const SpectralConvolver&) = delete;

  const GridSpec& grid() const { return grid_; }

  // Forward transform of a kernel row, reusable across many convolutions.
  std::vector<std::complex<double>> symbol(std::span<const double> row);

  void convolve_into(const std::vector<std::complex<double>>& kernel_symbol,
                     std::span<const double> f, std::span<double> out);
  std::vector<double> convolve(const std::vector<std::complex<double>>& kernel_symbol,
                               std::span<const double> f);

 private:
  GridSpec grid_;
  int half_ = 0;
  double* real_ = nullptr;       // fftw buffer, length M
  void* spec_ = nullptr;         // fftw_complex buffer, length M/2 + 1
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;
};

// O(M^2) reference implementation of the same convolution.
std::vector<double> convolve_direct(std::span<const double> row, std::span<const double> f,
                                    double h);

}  // namespace bdlp
