#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wvsim/evolution.hpp"
#include "wvsim/momentum_weak.hpp"

namespace wvsim {

// Relative tail level below which a time distribution counts as closed.
inline constexpr double kTailEpsRel = 1e-10;

enum class DistributionKind { density, flux };

// rho(t|x) or f(t|x) sampled on the propagation time mesh, normalized so that
// sum(values) * dt = 1. `normalization` keeps the raw integral: N(x) for
// densities, N_f for fluxes. Flux distributions may carry negative lobes
// (quantum backflow); they are flagged, never clipped.
struct TimeDistribution {
  double detector_x = 0.0;
  std::size_t detector_index = 0;
  std::vector<double> times;
  std::vector<double> values;
  double normalization = 0.0;
  DistributionKind kind = DistributionKind::density;
  bool has_negative_lobes = false;

  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }

  // Piecewise-linear CDF over the rectangle cells [t_k, t_k + dt).
  double cdf(double t) const {
    const double w = dt();
    if (times.empty() || t <= times.front()) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (t < times[k] + w)
        return std::clamp(acc + values[k] * (t - times[k]), 0.0, 1.0);
      acc += values[k] * w;
    }
    return 1.0;
  }
};

// |psi(x_i, t_k)|^2 over the record mesh.
inline std::vector<double> density_series(const EvolutionRecord& record,
                                          std::size_t index) {
  std::vector<double> u(record.size());
  for (std::size_t k = 0; k < record.size(); ++k)
    u[k] = std::norm(record.snapshots[k].amplitudes[index]);
  return u;
}

// Probability flux Re[conj(psi) (-i hbar dpsi/dx)]/M at x_i over the mesh.
inline std::vector<double> flux_series(const EvolutionRecord& record,
                                       std::size_t index,
                                       const PhysicalParams& params) {
  std::vector<double> f(record.size());
  for (std::size_t k = 0; k < record.size(); ++k) {
    const auto& snap = record.snapshots[k];
    const CVector d = spectral_derivative(snap.grid, snap.amplitudes);
    f[k] = params.hbar *
           std::imag(std::conj(snap.amplitudes[index]) * d[index]) / params.mass;
  }
  return f;
}

// Exact Im weak-momentum channel -(hbar/2) d_x ln|psi|^2 at x_i over the mesh.
// Entries where the density falls below eps_node * (peak over the series) are
// set to NaN.
inline std::vector<double> im_weak_series(const EvolutionRecord& record,
                                          std::size_t index,
                                          const PhysicalParams& params,
                                          double eps_node = kNodeEpsRel) {
  std::vector<double> im(record.size());
  std::vector<double> u = density_series(record, index);
  const double peak = *std::max_element(u.begin(), u.end());
  for (std::size_t k = 0; k < record.size(); ++k) {
    if (u[k] <= eps_node * peak) {
      im[k] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const auto& snap = record.snapshots[k];
    const RVector rho = snap.density();
    const RVector drho = spectral_derivative(snap.grid, rho);
    im[k] = -0.5 * params.hbar * drho[index] / rho[index];
  }
  return im;
}

namespace detail {

inline void require_closed_tail(const std::vector<double>& series,
                                const std::string& what, double x) {
  double peak = 0.0;
  for (double v : series) peak = std::max(peak, std::abs(v));
  if (peak <= 0.0)
    throw OpenTail(what + ": series identically zero at x = " + std::to_string(x));
  if (std::abs(series.back()) > kTailEpsRel * peak)
    throw OpenTail(what + ": tail still " +
                   std::to_string(std::abs(series.back()) / peak) +
                   " of peak at t_max (x = " + std::to_string(x) +
                   "); extend t_max or move the detector");
}

}  // namespace detail

// Transition path time distribution rho(t|x): normalized |<x|Psi_t>|^2.
inline TimeDistribution density_in_time(const EvolutionRecord& record,
                                        double x) {
  if (record.size() < 2)
    throw OpenTail("density_in_time: record holds fewer than two snapshots");
  const Grid1D& grid = record.snapshots.front().grid;
  const std::size_t index = grid.index_near(x);
  std::vector<double> u = density_series(record, index);
  detail::require_closed_tail(u, "density_in_time", grid.x(index));

  const double dt = record.dt_mesh();
  double n_of_x = 0.0;
  for (double v : u) n_of_x += v;
  n_of_x *= dt;

  TimeDistribution dist;
  dist.detector_x = grid.x(index);
  dist.detector_index = index;
  dist.times = record.times;
  dist.values = std::move(u);
  for (double& v : dist.values) v /= n_of_x;
  dist.normalization = n_of_x;
  dist.kind = DistributionKind::density;
  return dist;
}

// Normalized flux time distribution f(t|x) = <F(x)>_t / N_f.
inline TimeDistribution flux_in_time(const EvolutionRecord& record, double x,
                                     const PhysicalParams& params) {
  if (record.size() < 2)
    throw OpenTail("flux_in_time: record holds fewer than two snapshots");
  const Grid1D& grid = record.snapshots.front().grid;
  const std::size_t index = grid.index_near(x);
  std::vector<double> f = flux_series(record, index, params);
  detail::require_closed_tail(f, "flux_in_time", grid.x(index));

  const double dt = record.dt_mesh();
  double n_f = 0.0;
  for (double v : f) n_f += v;
  n_f *= dt;

  TimeDistribution dist;
  dist.detector_x = grid.x(index);
  dist.detector_index = index;
  dist.times = record.times;
  dist.values = std::move(f);
  double peak = 0.0;
  for (double v : dist.values) peak = std::max(peak, std::abs(v));
  for (double& v : dist.values) {
    v /= n_f;
    if (v < -1e-12 * peak / std::abs(n_f)) dist.has_negative_lobes = true;
  }
  dist.normalization = n_f;
  dist.kind = DistributionKind::flux;
  return dist;
}

// <t(x)> under a density-kind distribution.
inline double mean_arrival_time(const TimeDistribution& dist) {
  if (dist.kind != DistributionKind::density)
    throw ConfigError("mean_arrival_time expects a density-kind distribution");
  const double dt = dist.dt();
  double mean = 0.0;
  for (std::size_t k = 0; k < dist.values.size(); ++k)
    mean += dist.times[k] * dist.values[k];
  return mean * dt;
}

}  // namespace wvsim
