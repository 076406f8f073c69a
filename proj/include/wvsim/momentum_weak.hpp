#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "wvsim/wavefunction.hpp"
#include "wvsim/weak_value.hpp"

namespace wvsim {

// Re/Im momentum weak-value fields over the whole grid at one instant.
//   re[i] = M * (flux density / probability density)   (flux/density ratio)
//   im[i] = -(hbar/2) d/dx ln|psi|^2                    (log-density slope)
// Both are evaluated spectrally. valid[i] = 0 marks node-masked points where
// the density sits below eps_node * max density; field values there are 0.
struct MomentumWeakFields {
  Grid1D grid;
  double time;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<std::uint8_t> valid;

  std::size_t count_valid() const {
    return static_cast<std::size_t>(
        std::count(valid.begin(), valid.end(), std::uint8_t{1}));
  }
};

inline MomentumWeakFields momentum_weak_fields(const Wavefunction& state,
                                               const PhysicalParams& params,
                                               double eps_node = kNodeEpsRel) {
  const std::size_t n = state.grid.size();
  const Wavefunction p_state = apply_momentum(state, params);
  const RVector rho = state.density();
  const RVector drho = spectral_derivative(state.grid, rho);
  const double rho_max = *std::max_element(rho.begin(), rho.end());
  const double floor = eps_node * rho_max;

  MomentumWeakFields f{state.grid, state.time,
                       std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                       std::vector<std::uint8_t>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (rho[i] <= floor) continue;
    const Complex cross = std::conj(state.amplitudes[i]) * p_state.amplitudes[i];
    f.re[i] = cross.real() / rho[i];
    f.im[i] = -0.5 * params.hbar * drho[i] / rho[i];
    f.valid[i] = 1;
  }
  return f;
}

// Weak value of the momentum at a post-selected position (Eq. value channel =
// (p psi)(x)/psi(x); the re/im channels carry the strong-measurement routes).
inline WeakValue momentum_weak_value_grid(const Wavefunction& state, double x,
                                          const PhysicalParams& params,
                                          double eps_node = kNodeEpsRel) {
  const std::size_t i = state.grid.index_near(x);
  const RVector rho = state.density();
  const double rho_max = *std::max_element(rho.begin(), rho.end());
  if (rho[i] <= eps_node * rho_max)
    throw NodeError("momentum_weak_value_grid: density at x = " +
                    std::to_string(state.grid.x(i)) +
                    " below node threshold; weak value diverges");

  const Wavefunction p_state = apply_momentum(state, params);
  const RVector drho = spectral_derivative(state.grid, rho);

  WeakValue w;
  w.value = p_state.amplitudes[i] / state.amplitudes[i];
  w.re_channel =
      (std::conj(state.amplitudes[i]) * p_state.amplitudes[i]).real() / rho[i];
  w.im_channel = -0.5 * params.hbar * drho[i] / rho[i];
  w.denominator = rho[i];
  return w;
}

// Rebuilds sqrt(rho) exp(iS/hbar) from the two weak-value channels:
// S by cumulative trapezoid of the re field from the anchor, ln rho by
// -(2/hbar) times the cumulative trapezoid of the im field. The result is
// normalized over [window_lo, window_hi] (whole grid by default) and zero
// outside, so it matches the source state up to global phase and, for
// windowed use, overall normalization on that interval.
inline Wavefunction reconstruct_wavefunction(
    const Grid1D& grid, const std::vector<double>& re_field,
    const std::vector<double>& im_field, std::size_t anchor,
    const PhysicalParams& params, std::size_t window_lo = 0,
    std::size_t window_hi = static_cast<std::size_t>(-1)) {
  const std::size_t n = grid.size();
  if (re_field.size() != n || im_field.size() != n)
    throw DimensionMismatch("reconstruct_wavefunction: field size != grid size");
  if (window_hi == static_cast<std::size_t>(-1)) window_hi = n - 1;
  if (window_lo > window_hi || window_hi >= n || anchor < window_lo ||
      anchor > window_hi)
    throw ConfigError("reconstruct_wavefunction: bad window/anchor");
  for (std::size_t i = window_lo; i <= window_hi; ++i)
    if (!std::isfinite(re_field[i]) || !std::isfinite(im_field[i]))
      throw NodeInInterval(
          "reconstruct_wavefunction: field not finite at index " +
          std::to_string(i) + "; interval contains a node");

  const double dx = grid.dx();
  std::vector<double> phase(n, 0.0), logrho(n, 0.0);
  for (std::size_t i = anchor; i < window_hi; ++i) {
    phase[i + 1] = phase[i] + 0.5 * dx * (re_field[i] + re_field[i + 1]);
    logrho[i + 1] =
        logrho[i] - (2.0 / params.hbar) * 0.5 * dx * (im_field[i] + im_field[i + 1]);
  }
  for (std::size_t i = anchor; i > window_lo; --i) {
    phase[i - 1] = phase[i] - 0.5 * dx * (re_field[i] + re_field[i - 1]);
    logrho[i - 1] =
        logrho[i] + (2.0 / params.hbar) * 0.5 * dx * (im_field[i] + im_field[i - 1]);
  }

  // Normalize within the window; shift log densities first for stability.
  double logmax = logrho[window_lo];
  for (std::size_t i = window_lo; i <= window_hi; ++i)
    logmax = std::max(logmax, logrho[i]);
  double mass = 0.0;
  std::vector<double> rho(n, 0.0);
  for (std::size_t i = window_lo; i <= window_hi; ++i) {
    rho[i] = std::exp(logrho[i] - logmax);
    mass += rho[i];
  }
  mass *= dx;

  CVector psi(n, Complex{0.0, 0.0});
  for (std::size_t i = window_lo; i <= window_hi; ++i)
    psi[i] = std::sqrt(rho[i] / mass) *
             std::polar(1.0, phase[i] / params.hbar);
  return Wavefunction(grid, std::move(psi), 0.0);
}

}  // namespace wvsim
