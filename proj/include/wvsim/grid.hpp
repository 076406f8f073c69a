#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wvsim/errors.hpp"

namespace wvsim {

// Uniform periodic grid x_i = x_min + i*dx, i = 0..n-1 (x_max excluded).
// n must be a power of two >= 16 so the spectral transforms stay exact.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n_points)
      : x_min_(x_min), x_max_(x_max), n_(n_points) {
    if (!(x_max > x_min))
      throw ConfigError("Grid1D: x_max must exceed x_min");
    if (n_ < 16 || (n_ & (n_ - 1)) != 0)
      throw ConfigError("Grid1D: n_points must be a power of two >= 16, got " +
                        std::to_string(n_));
    dx_ = (x_max_ - x_min_) / static_cast<double>(n_);
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double length() const { return x_max_ - x_min_; }

  double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }

  // Nearest grid index to a physical position (position post-selection rule).
  std::size_t index_near(double x_query) const {
    if (x_query < x_min_ - 0.5 * dx_ || x_query > x_max_ + 0.5 * dx_)
      throw ConfigError("Grid1D: position " + std::to_string(x_query) +
                        " outside grid [" + std::to_string(x_min_) + ", " +
                        std::to_string(x_max_) + ")");
    auto i = static_cast<long>(std::llround((x_query - x_min_) / dx_));
    if (i < 0) i = 0;
    if (i >= static_cast<long>(n_)) i = static_cast<long>(n_) - 1;
    return static_cast<std::size_t>(i);
  }

  // Angular wavenumber of spectral bin i (FFT ordering: 0..n/2-1, -n/2..-1).
  double k(std::size_t i) const {
    const double dk = 2.0 * M_PI / length();
    const auto half = n_ / 2;
    const double m = (i < half) ? static_cast<double>(i)
                                : static_cast<double>(i) - static_cast<double>(n_);
    return m * dk;
  }

  std::vector<double> wavenumbers() const {
    std::vector<double> ks(n_);
    for (std::size_t i = 0; i < n_; ++i) ks[i] = k(i);
    return ks;
  }

  double k_nyquist() const { return M_PI / dx_; }

  bool operator==(const Grid1D& o) const {
    return x_min_ == o.x_min_ && x_max_ == o.x_max_ && n_ == o.n_;
  }
  bool operator!=(const Grid1D& o) const { return !(*this == o); }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

}  // namespace wvsim
