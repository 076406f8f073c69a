#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wvsim/potential.hpp"
#include "wvsim/time_distribution.hpp"

namespace wvsim {

// Detector layout for the flux/transmission protocol. fd_step = 0 defaults to
// the grid spacing (which snaps to an effective step of 2 dx, the smallest
// centered stencil realizable on grid points).
struct FluxProtocolConfig {
  double shutter_time = 0.0;  // cap on the source integration window; 0 = auto
  double source_x = 0.0;
  std::vector<double> detector_xs;
  double fd_step = 0.0;

  // The shutter idealization wants Dt well below the first arrival time.
  // Finite-width packets cannot honor it literally, so this is a diagnostic,
  // not a hard error.
  bool shutter_much_shorter_than_arrival(double mean_arrival) const {
    return shutter_time > 0.0 && shutter_time < 0.1 * mean_arrival;
  }
};

// Centered log-density finite difference at x (+/- m dx on each side):
// -(hbar/2) [ln rho(t|x + mdx) - ln rho(t|x - mdx)] / (2 m dx).
// valid[k] = 0 where either side sits below the node floor.
struct ImFdSeries {
  double x = 0.0;
  double fd_step_effective = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
};

namespace detail {

inline std::size_t fd_half_steps(const Grid1D& grid, double fd_step) {
  if (fd_step <= 0.0) fd_step = grid.dx();
  const auto m = static_cast<long>(std::llround(fd_step / (2.0 * grid.dx())));
  return static_cast<std::size_t>(std::max(1L, m));
}

}  // namespace detail

inline ImFdSeries infer_im_weak_momentum_fd(const EvolutionRecord& record,
                                            double x, double fd_step,
                                            const PhysicalParams& params,
                                            double eps_node = kNodeEpsRel) {
  const Grid1D& grid = record.snapshots.front().grid;
  const std::size_t i = grid.index_near(x);
  const std::size_t m = detail::fd_half_steps(grid, fd_step);
  if (i < m || i + m >= grid.size())
    throw ConfigError("infer_im_weak_momentum_fd: stencil leaves the grid");

  const auto u_minus = density_series(record, i - m);
  const auto u_plus = density_series(record, i + m);
  const double peak_minus = *std::max_element(u_minus.begin(), u_minus.end());
  const double peak_plus = *std::max_element(u_plus.begin(), u_plus.end());
  const double dx_eff = 2.0 * static_cast<double>(m) * grid.dx();

  ImFdSeries series;
  series.x = grid.x(i);
  series.fd_step_effective = dx_eff;
  series.times = record.times;
  series.values.assign(record.size(), 0.0);
  series.valid.assign(record.size(), 0);
  std::size_t n_valid = 0;
  for (std::size_t k = 0; k < record.size(); ++k) {
    if (u_minus[k] <= eps_node * peak_minus || u_plus[k] <= eps_node * peak_plus)
      continue;
    series.values[k] =
        -0.5 * params.hbar * (std::log(u_plus[k]) - std::log(u_minus[k])) / dx_eff;
    series.valid[k] = 1;
    ++n_valid;
  }
  if (n_valid == 0)
    throw NodeError(
        "infer_im_weak_momentum_fd: density below the node floor at every "
        "recorded time");
  return series;
}

// Both sides of the mean-arrival-time relation: the spatial derivative of
// <t(x)> via the same centered stencil, against the time-averaged Im
// weak-momentum combination (2/hbar)[<Im>_avg <t> - int t rho Im dt].
struct MeanTimeRelation {
  double x = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double scale = 0.0;
};

inline MeanTimeRelation verify_mean_time_relation(const EvolutionRecord& record,
                                                  double x, double fd_step,
                                                  const PhysicalParams& params) {
  const Grid1D& grid = record.snapshots.front().grid;
  const std::size_t i = grid.index_near(x);
  const std::size_t m = detail::fd_half_steps(grid, fd_step);
  if (i < m || i + m >= grid.size())
    throw ConfigError("verify_mean_time_relation: stencil leaves the grid");

  const auto dist_minus = density_in_time(record, grid.x(i - m));
  const auto dist_plus = density_in_time(record, grid.x(i + m));
  const auto dist_center = density_in_time(record, grid.x(i));
  const double dx_eff = 2.0 * static_cast<double>(m) * grid.dx();

  MeanTimeRelation rel;
  rel.x = grid.x(i);
  rel.lhs =
      (mean_arrival_time(dist_plus) - mean_arrival_time(dist_minus)) / dx_eff;

  const auto im = im_weak_series(record, i, params);
  const double dt = dist_center.dt();
  double im_avg = 0.0, t_im = 0.0;
  for (std::size_t k = 0; k < im.size(); ++k) {
    if (!std::isfinite(im[k])) continue;
    im_avg += dist_center.values[k] * im[k];
    t_im += dist_center.times[k] * dist_center.values[k] * im[k];
  }
  im_avg *= dt;
  t_im *= dt;
  const double t_mean = mean_arrival_time(dist_center);
  rel.rhs = (2.0 / params.hbar) * (im_avg * t_mean - t_im);
  rel.residual = std::abs(rel.lhs - rel.rhs);
  rel.scale = std::abs(rel.lhs);
  return rel;
}

// Transmission probability: detector flux integral over the full record,
// divided by the source flux integral over the shutter window [0, t_close].
// t_close is auto-detected at the end of the outgoing lobe (first time after
// the lobe peak with |flux| < 1e-8 * peak), optionally capped by
// cfg.shutter_time.
inline double transmission(const EvolutionRecord& record,
                           const Potential& potential, double source_x,
                           double detector_x, const FluxProtocolConfig& cfg,
                           const PhysicalParams& params) {
  const Grid1D& grid = record.snapshots.front().grid;
  const std::size_t i_src = grid.index_near(source_x);
  const std::size_t i_det = grid.index_near(detector_x);

  // The detector must sit where the potential has flattened out.
  const double v_edge = potential.values().back();
  const double tol = 1e-9 * std::max(1.0, std::abs(potential.height()));
  if (std::abs(potential.value_at(i_det) - v_edge) >= tol)
    throw PotentialShapeError(
        "transmission: detector not in the asymptotic region");

  const auto f_det = flux_series(record, i_det, params);
  detail::require_closed_tail(f_det, "transmission(detector)", grid.x(i_det));
  const auto f_src = flux_series(record, i_src, params);

  const double dt = record.dt_mesh();
  double numerator = 0.0;
  for (double v : f_det) numerator += v;
  numerator *= dt;

  double peak = 0.0;
  std::size_t k_peak = 0;
  for (std::size_t k = 0; k < f_src.size(); ++k)
    if (std::abs(f_src[k]) > peak) {
      peak = std::abs(f_src[k]);
      k_peak = k;
    }
  std::size_t k_close = f_src.size();
  for (std::size_t k = k_peak; k < f_src.size(); ++k)
    if (std::abs(f_src[k]) < 1e-8 * peak) {
      k_close = k;
      break;
    }
  if (cfg.shutter_time > 0.0) {
    const auto cap = static_cast<std::size_t>(cfg.shutter_time / dt);
    k_close = std::min(k_close, cap);
  }
  double denominator = 0.0;
  for (std::size_t k = 0; k < k_close; ++k) denominator += f_src[k];
  denominator *= dt;
  if (denominator <= 0.0)
    throw OpenTail("transmission: source window captured no outgoing flux");
  return numerator / denominator;
}

}  // namespace wvsim
