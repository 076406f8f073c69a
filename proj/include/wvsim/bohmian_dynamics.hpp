#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wvsim/bohmian.hpp"
#include "wvsim/evolution.hpp"

namespace wvsim {

namespace detail {

// 4th-order centered first derivative over five equally spaced samples.
inline double fd5(double m2, double m1, double p1, double p2, double h) {
  return (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
}

// Per-snapshot Bohmian fields used by the dynamics checks.
struct FieldFrame {
  PolarField polar;
  std::vector<double> p_b;
  std::vector<double> p_o;
  QuantumPotentialField qpot;
};

inline FieldFrame make_frame(const Wavefunction& snap, const Potential& pot,
                             const PhysicalParams& params, double eps_node) {
  PolarField polar = polar_decompose(snap, params, eps_node);
  std::vector<double> p_b = bohmian_momentum_field(polar, params);
  std::vector<double> p_o = osmotic_momentum_field(polar, params);
  QuantumPotentialField qpot = quantum_potential(polar, pot, params);
  return FieldFrame{std::move(polar), std::move(p_b), std::move(p_o),
                    std::move(qpot)};
}

}  // namespace detail

// lhs/rhs time series of a local momentum balance at fixed post-selected x:
//   fixed point:  d/dt p_B(x,t)          vs  -d/dx (V_eff + p_B^2/2M)
//   material:     (d/dt + p_B/M d/dx) p_B vs  -d/dx V_eff
struct MomentumRateSeries {
  double x = 0.0;
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<std::uint8_t> valid;

  double max_residual() const {
    double r = 0.0;
    for (std::size_t k = 0; k < lhs.size(); ++k)
      if (valid[k]) r = std::max(r, std::abs(lhs[k] - rhs[k]));
    return r;
  }
  double scale() const {
    double s = 0.0;
    for (std::size_t k = 0; k < lhs.size(); ++k)
      if (valid[k]) s = std::max(s, std::abs(lhs[k]));
    return s;
  }
};

namespace detail {

enum class RateKind { fixed_point, material };

inline MomentumRateSeries momentum_rate(const EvolutionRecord& record,
                                        const Potential& potential, double x,
                                        const PhysicalParams& params,
                                        RateKind kind, double eps_node) {
  if (record.size() < 5)
    throw ConfigError("momentum rate checks need >= 5 snapshots");
  const Grid1D& grid = record.snapshots.front().grid;
  const std::size_t i = grid.index_near(x);
  if (i < 2 || i + 2 >= grid.size())
    throw ConfigError("momentum rate: probe too close to the grid edge");

  const std::size_t n_t = record.size();
  std::vector<detail::FieldFrame> frames;
  frames.reserve(n_t);
  for (std::size_t k = 0; k < n_t; ++k)
    frames.push_back(
        detail::make_frame(record.snapshots[k], potential, params, eps_node));

  MomentumRateSeries series;
  series.x = grid.x(i);
  series.times = record.times;
  series.lhs.assign(n_t, 0.0);
  series.rhs.assign(n_t, 0.0);
  series.valid.assign(n_t, 0);
  const double dt = record.dt_mesh();
  const double dx = grid.dx();

  for (std::size_t k = 2; k + 2 < n_t; ++k) {
    bool ok = true;
    for (std::size_t kk = k - 2; kk <= k + 2 && ok; ++kk)
      for (std::size_t ii = i - 2; ii <= i + 2 && ok; ++ii)
        ok = frames[kk].polar.valid[ii] && frames[kk].qpot.valid[ii];
    if (!ok) continue;

    const double dpdt =
        detail::fd5(frames[k - 2].p_b[i], frames[k - 1].p_b[i],
                    frames[k + 1].p_b[i], frames[k + 2].p_b[i], dt);
    const auto& fr = frames[k];
    const double dveff_dx = detail::fd5(fr.qpot.v_eff[i - 2], fr.qpot.v_eff[i - 1],
                                        fr.qpot.v_eff[i + 1], fr.qpot.v_eff[i + 2], dx);
    if (kind == detail::RateKind::fixed_point) {
      auto half_p2 = [&](std::size_t ii) {
        return fr.p_b[ii] * fr.p_b[ii] / (2.0 * params.mass);
      };
      const double dk_dx = detail::fd5(half_p2(i - 2), half_p2(i - 1),
                                       half_p2(i + 1), half_p2(i + 2), dx);
      series.lhs[k] = dpdt;
      series.rhs[k] = -(dveff_dx + dk_dx);
    } else {
      const double dpb_dx = detail::fd5(fr.p_b[i - 2], fr.p_b[i - 1],
                                        fr.p_b[i + 1], fr.p_b[i + 2], dx);
      series.lhs[k] = dpdt + fr.p_b[i] / params.mass * dpb_dx;
      series.rhs[k] = -dveff_dx;
    }
    series.valid[k] = 1;
  }
  return series;
}

}  // namespace detail

inline MomentumRateSeries fixed_point_momentum_rate(
    const EvolutionRecord& record, const Potential& potential, double x,
    const PhysicalParams& params, double eps_node = kNodeEpsRel) {
  return detail::momentum_rate(record, potential, x, params,
                               detail::RateKind::fixed_point, eps_node);
}

inline MomentumRateSeries material_momentum_rate(
    const EvolutionRecord& record, const Potential& potential, double x,
    const PhysicalParams& params, double eps_node = kNodeEpsRel) {
  return detail::momentum_rate(record, potential, x, params,
                               detail::RateKind::material, eps_node);
}

// Density-weighted Ehrenfest balance d<p>/dt = -<dV/dx>.
struct EhrenfestSeries {
  std::vector<double> times;
  std::vector<double> dpdt;
  std::vector<double> force;
  std::vector<std::uint8_t> valid;

  double max_residual() const {
    double r = 0.0;
    for (std::size_t k = 0; k < dpdt.size(); ++k)
      if (valid[k]) r = std::max(r, std::abs(dpdt[k] - force[k]));
    return r;
  }
  double scale() const {
    double s = 0.0;
    for (std::size_t k = 0; k < dpdt.size(); ++k)
      if (valid[k])
        s = std::max({s, std::abs(dpdt[k]), std::abs(force[k])});
    return s;
  }
};

inline EhrenfestSeries ehrenfest_check(const EvolutionRecord& record,
                                       const Potential& potential,
                                       const PhysicalParams& params) {
  if (record.size() < 5)
    throw ConfigError("ehrenfest_check needs >= 5 snapshots");
  const std::size_t n_t = record.size();
  std::vector<double> p_mean(n_t), grad_v(n_t);
  for (std::size_t k = 0; k < n_t; ++k) {
    const auto& snap = record.snapshots[k];
    p_mean[k] = expectation_momentum(snap, params);
    double f = 0.0;
    for (std::size_t i = 0; i < snap.grid.size(); ++i)
      f += potential.gradient_at(i) * std::norm(snap.amplitudes[i]);
    grad_v[k] = f * snap.grid.dx();
  }

  EhrenfestSeries series;
  series.times = record.times;
  series.dpdt.assign(n_t, 0.0);
  series.force.assign(n_t, 0.0);
  series.valid.assign(n_t, 0);
  const double dt = record.dt_mesh();
  for (std::size_t k = 2; k + 2 < n_t; ++k) {
    series.dpdt[k] =
        detail::fd5(p_mean[k - 2], p_mean[k - 1], p_mean[k + 1], p_mean[k + 2], dt);
    series.force[k] = -grad_v[k];
    series.valid[k] = 1;
  }
  return series;
}

// <T_B>, <I_O>, <V> and their sum per snapshot. The sum reproduces <H> and is
// conserved by the unitary evolution.
struct EnergyPartitionSeries {
  std::vector<double> times;
  std::vector<double> kinetic;
  std::vector<double> internal;
  std::vector<double> potential;
  std::vector<double> total;

  double max_total_drift() const {
    double d = 0.0;
    for (double e : total) d = std::max(d, std::abs(e - total.front()));
    return d;
  }
};

inline EnergyPartitionSeries energy_partition(const EvolutionRecord& record,
                                              const Potential& potential,
                                              const PhysicalParams& params,
                                              double eps_node = kNodeEpsRel) {
  EnergyPartitionSeries series;
  series.times = record.times;
  const std::size_t n_t = record.size();
  series.kinetic.resize(n_t);
  series.internal.resize(n_t);
  series.potential.resize(n_t);
  series.total.resize(n_t);
  for (std::size_t k = 0; k < n_t; ++k) {
    const auto& snap = record.snapshots[k];
    auto field = polar_decompose(snap, params, eps_node);
    const auto p_b = bohmian_momentum_field(field, params);
    const auto p_o = osmotic_momentum_field(field, params);
    double t_b = 0.0, i_o = 0.0, v = 0.0;
    for (std::size_t i = 0; i < field.r.size(); ++i) {
      if (field.valid[i]) {
        t_b += field.r[i] * p_b[i] * p_b[i];
        i_o += field.r[i] * p_o[i] * p_o[i];
      }
      v += field.r[i] * potential.value_at(i);
    }
    const double dx = snap.grid.dx();
    series.kinetic[k] = t_b * dx / (2.0 * params.mass);
    series.internal[k] = i_o * dx / (2.0 * params.mass);
    series.potential[k] = v * dx;
    series.total[k] =
        series.kinetic[k] + series.internal[k] + series.potential[k];
  }
  return series;
}

struct ResidualSummary {
  double max_residual = 0.0;
  double scale = 0.0;
  std::size_t points_checked = 0;
};

// Continuity: d_t r + (1/M) d_x (r p_B) = 0. The flux r p_B = hbar Im[psi* psi']
// is smooth and contained, so its x-derivative is spectral; d_t r uses the
// 4th-order stencil on the snapshot mesh.
inline ResidualSummary continuity_residual(const EvolutionRecord& record,
                                           const PhysicalParams& params,
                                           double density_floor_rel = 1e-8) {
  if (record.size() < 5)
    throw ConfigError("continuity_residual needs >= 5 snapshots");
  const Grid1D& grid = record.snapshots.front().grid;
  const std::size_t n = grid.size();
  const std::size_t n_t = record.size();
  const double dt = record.dt_mesh();

  std::vector<std::vector<double>> rho(n_t), div_flux(n_t);
  for (std::size_t k = 0; k < n_t; ++k) {
    const auto& snap = record.snapshots[k];
    rho[k] = snap.density();
    const CVector dpsi = spectral_derivative(grid, snap.amplitudes);
    RVector flux(n);
    for (std::size_t i = 0; i < n; ++i)
      flux[i] = params.hbar *
                std::imag(std::conj(snap.amplitudes[i]) * dpsi[i]) / params.mass;
    div_flux[k] = spectral_derivative(grid, flux);
  }

  double rho_peak = 0.0;
  for (const auto& r : rho)
    for (double v : r) rho_peak = std::max(rho_peak, v);

  ResidualSummary out;
  for (std::size_t k = 2; k + 2 < n_t; ++k) {
    for (std::size_t i = 5; i + 5 < n; ++i) {
      if (rho[k][i] < density_floor_rel * rho_peak) continue;
      const double drho_dt =
          detail::fd5(rho[k - 2][i], rho[k - 1][i], rho[k + 1][i], rho[k + 2][i], dt);
      const double res = drho_dt + div_flux[k][i];
      out.max_residual = std::max(out.max_residual, std::abs(res));
      out.scale = std::max(out.scale, std::abs(drho_dt));
      ++out.points_checked;
    }
  }
  return out;
}

// Quantum Hamilton-Jacobi: d_t S + p_B^2/2M + V_eff = 0, with S aligned in
// time by matching each snapshot's branch to the previous one at the running
// density maximum. Only the span containing that maximum is checked (other
// spans carry independent branches).
inline ResidualSummary qhj_residual(const EvolutionRecord& record,
                                    const Potential& potential,
                                    const PhysicalParams& params,
                                    double density_floor_rel = 1e-8,
                                    double eps_node = kNodeEpsRel) {
  if (record.size() < 5)
    throw ConfigError("qhj_residual needs >= 5 snapshots");
  const Grid1D& grid = record.snapshots.front().grid;
  const std::size_t n = grid.size();
  const std::size_t n_t = record.size();
  const double dt = record.dt_mesh();
  const double two_pi_hbar = 2.0 * M_PI * params.hbar;

  std::vector<detail::FieldFrame> frames;
  frames.reserve(n_t);
  std::vector<double> offset(n_t, 0.0);
  std::size_t ref = 0;
  for (std::size_t k = 0; k < n_t; ++k) {
    frames.push_back(
        detail::make_frame(record.snapshots[k], potential, params, eps_node));
    const auto& r = frames[k].polar.r;
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(r.begin(), r.end()) - r.begin());
    if (k == 0) {
      ref = peak;
      continue;
    }
    // Carry the previous snapshot's branch over at the old reference point
    // (the true S changes by E dt << pi hbar per mesh step), then move the
    // reference to this snapshot's density peak.
    const double prev = frames[k - 1].polar.s[ref] + offset[k - 1];
    const double raw = frames[k].polar.s[ref];
    offset[k] = two_pi_hbar * std::round((prev - raw) / two_pi_hbar);
    ref = peak;
  }

  double rho_peak = 0.0;
  for (const auto& fr : frames)
    for (double v : fr.polar.r) rho_peak = std::max(rho_peak, v);

  // Span of contiguous valid points around a snapshot's density peak; only
  // that span has a time-aligned branch.
  auto peak_span = [&](std::size_t k) {
    const auto& fr = frames[k].polar;
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(fr.r.begin(), fr.r.end()) - fr.r.begin());
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && fr.valid[lo - 1]) --lo;
    while (hi + 1 < n && fr.valid[hi + 1]) ++hi;
    return std::pair<std::size_t, std::size_t>{lo, hi};
  };

  ResidualSummary out;
  for (std::size_t k = 2; k + 2 < n_t; ++k) {
    auto [span_lo, span_hi] = peak_span(k);
    for (std::size_t i = std::max<std::size_t>(span_lo, 5);
         i + 5 < n && i <= span_hi; ++i) {
      bool ok = true;
      for (std::size_t kk = k - 2; kk <= k + 2 && ok; ++kk)
        ok = frames[kk].polar.valid[i] && frames[kk].qpot.valid[i];
      if (!ok || frames[k].polar.r[i] < density_floor_rel * rho_peak) continue;
      auto s_at = [&](std::size_t kk) {
        return frames[kk].polar.s[i] + offset[kk];
      };
      const double ds_dt = detail::fd5(s_at(k - 2), s_at(k - 1), s_at(k + 1),
                                       s_at(k + 2), dt);
      const double p_b = frames[k].p_b[i];
      const double res = ds_dt + p_b * p_b / (2.0 * params.mass) +
                         frames[k].qpot.v_eff[i];
      out.max_residual = std::max(out.max_residual, std::abs(res));
      out.scale = std::max(out.scale, std::abs(ds_dt));
      ++out.points_checked;
    }
  }
  return out;
}

}  // namespace wvsim
