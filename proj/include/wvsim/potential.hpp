#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wvsim/errors.hpp"
#include "wvsim/grid.hpp"

namespace wvsim {

enum class PotentialKind { free_space, gaussian_barrier, eckart, custom_table };

inline const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::free_space: return "free";
    case PotentialKind::gaussian_barrier: return "gaussian_barrier";
    case PotentialKind::eckart: return "eckart";
    case PotentialKind::custom_table: return "custom_table";
  }
  return "?";
}

// V(q) sampled on the grid, with its gradient (analytic for the named kinds,
// 4th-order finite differences for tables). The named scattering kinds must be
// asymptotically flat at both edges on the given grid; custom tables may be
// anything, and the time-of-flight protocol re-checks flatness where it
// matters.
class Potential {
 public:
  static Potential free_space(const Grid1D& grid) {
    Potential p(grid, PotentialKind::free_space, 0.0);
    p.values_.assign(grid.size(), 0.0);
    p.gradient_.assign(grid.size(), 0.0);
    return p;
  }

  static Potential gaussian_barrier(const Grid1D& grid, double height,
                                    double width, double center) {
    if (!(width > 0.0)) throw ConfigError("gaussian_barrier: width must be > 0");
    Potential p(grid, PotentialKind::gaussian_barrier, height);
    p.values_.resize(grid.size());
    p.gradient_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = grid.x(i) - center;
      const double v = height * std::exp(-0.5 * d * d / (width * width));
      p.values_[i] = v;
      p.gradient_[i] = -d / (width * width) * v;
    }
    p.require_asymptotically_flat();
    return p;
  }

  static Potential eckart(const Grid1D& grid, double height, double width) {
    if (!(width > 0.0)) throw ConfigError("eckart: width must be > 0");
    Potential p(grid, PotentialKind::eckart, height);
    p.values_.resize(grid.size());
    p.gradient_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double u = grid.x(i) / width;
      const double sech = 1.0 / std::cosh(u);
      p.values_[i] = height * sech * sech;
      p.gradient_[i] = -2.0 * height * sech * sech * std::tanh(u) / width;
    }
    p.require_asymptotically_flat();
    return p;
  }

  static Potential from_function(const Grid1D& grid,
                                 const std::function<double(double)>& v,
                                 const std::function<double(double)>& dv = {}) {
    Potential p(grid, PotentialKind::custom_table, 0.0);
    p.values_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) p.values_[i] = v(grid.x(i));
    p.finish_custom(dv);
    return p;
  }

  static Potential from_samples(const Grid1D& grid, std::vector<double> samples) {
    if (samples.size() != grid.size())
      throw ConfigError("Potential::from_samples: sample count != grid size");
    Potential p(grid, PotentialKind::custom_table, 0.0);
    p.values_ = std::move(samples);
    p.finish_custom({});
    return p;
  }

  const Grid1D& grid() const { return grid_; }
  PotentialKind kind() const { return kind_; }
  double height() const { return height_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& gradient() const { return gradient_; }
  double value_at(std::size_t i) const { return values_[i]; }
  double gradient_at(std::size_t i) const { return gradient_[i]; }

  // Scattering setups need V to flatten before both edges so that detector
  // statistics see free flight.
  bool asymptotically_flat() const {
    const double tol = 1e-9 * std::max(1.0, std::abs(height_));
    const std::size_t n = grid_.size();
    return std::abs(values_[0] - values_[10]) < tol &&
           std::abs(values_[n - 1] - values_[n - 11]) < tol;
  }

  void require_asymptotically_flat() const {
    if (!asymptotically_flat())
      throw PotentialShapeError(
          std::string("potential '") + to_string(kind_) +
          "' does not reach constant values at the grid edges");
  }

 private:
  Potential(const Grid1D& grid, PotentialKind kind, double height)
      : grid_(grid), kind_(kind), height_(height) {}

  void finish_custom(const std::function<double(double)>& dv) {
    for (double v : values_)
      if (!std::isfinite(v))
        throw PotentialShapeError("custom potential has non-finite samples");
    height_ = 0.0;
    for (double v : values_) height_ = std::max(height_, std::abs(v));
    gradient_.resize(grid_.size());
    if (dv) {
      for (std::size_t i = 0; i < grid_.size(); ++i) gradient_[i] = dv(grid_.x(i));
      return;
    }
    // 4th-order centered stencil, one-sided at the edges.
    const double dx = grid_.dx();
    const std::size_t n = grid_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= 2 && i + 2 < n) {
        gradient_[i] = (-values_[i + 2] + 8.0 * values_[i + 1] -
                        8.0 * values_[i - 1] + values_[i - 2]) /
                       (12.0 * dx);
      } else if (i == 0) {
        gradient_[i] = (values_[1] - values_[0]) / dx;
      } else if (i == n - 1) {
        gradient_[i] = (values_[n - 1] - values_[n - 2]) / dx;
      } else {
        const std::size_t lo = i - 1, hi = i + 1;
        gradient_[i] = (values_[hi] - values_[lo]) / (2.0 * dx);
      }
    }
  }

  Grid1D grid_;
  PotentialKind kind_;
  double height_;
  std::vector<double> values_;
  std::vector<double> gradient_;
};

}  // namespace wvsim
