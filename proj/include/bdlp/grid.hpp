#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bdlp {

// Uniform periodic grid on [0, L): M cells of width h = L/M, cell i centered
// at x_i = i*h and covering [x_i - h/2, x_i + h/2) modulo L.
struct GridSpec {
  double length = 1.0;
  int size = 4;

  GridSpec() = default;
  GridSpec(double L, int M) : length(L), size(M) {
    if (!(L > 0.0)) throw std::invalid_argument("GridSpec: domain length must be positive");
    if (M < 4 || M % 2 != 0)
      throw std::invalid_argument("GridSpec: grid size must be even and at least 4");
  }

  double spacing() const { return length / size; }
  double site(int i) const { return i * spacing(); }

  // Signed displacement folded into [-L/2, L/2).
  double wrap(double dx) const {
    dx = std::fmod(dx, length);
    if (dx < -0.5 * length) dx += length;
    if (dx >= 0.5 * length) dx -= length;
    return dx;
  }

  // Position folded into [0, L).
  double fold(double x) const {
    x = std::fmod(x, length);
    if (x < 0.0) x += length;
    if (x >= length) x -= length;  // fmod can round up to length
    return x;
  }

  bool operator==(const GridSpec&) const = default;
};

// Density sampled at grid sites. Values are interpreted as piecewise constant
// over the cells when the field is integrated or sampled from.
class Field {
 public:
  Field() = default;
  Field(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.size)
      throw std::invalid_argument("Field: value count does not match grid size");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("Field: values must be finite");
  }

  static Field constant(GridSpec grid, double value) {
    return Field(grid, std::vector<double>(grid.size, value));
  }

  // mean * (1 + amplitude * sin(2 pi mode x / L)); requires |amplitude| <= 1
  // so the field stays nonnegative for mean >= 0.
  static Field sinusoid(GridSpec grid, double mean, double amplitude, int mode) {
    if (std::abs(amplitude) > 1.0)
      throw std::invalid_argument("Field::sinusoid: |amplitude| must be <= 1");
    std::vector<double> v(grid.size);
    for (int i = 0; i < grid.size; ++i)
      v[i] = mean * (1.0 + amplitude * std::sin(2.0 * M_PI * mode * grid.site(i) / grid.length));
    return Field(grid, std::move(v));
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  double operator[](int i) const { return values_[i]; }
  int size() const { return grid_.size; }

  double min() const {
    double r = values_.empty() ? 0.0 : values_[0];
    for (double v : values_) r = std::min(r, v);
    return r;
  }
  double max() const {
    double r = values_.empty() ? 0.0 : values_[0];
    for (double v : values_) r = std::max(r, v);
    return r;
  }

  void require_nonnegative(const char* what) const {
    if (min() < 0.0) throw std::invalid_argument(std::string(what) + ": field must be nonnegative");
  }

  // h * sum of values: the total mass of the piecewise-constant density.
  double integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.spacing();
  }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

}  // namespace bdlp
