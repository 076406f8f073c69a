#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wvsim/potential.hpp"
#include "wvsim/wavefunction.hpp"
#include "wvsim/weak_value.hpp"

namespace wvsim {

// Polar form psi = sqrt(r) exp(iS/hbar): density r = |psi|^2 and phase S,
// unwrapped along x within each node-free span. Points with r below
// eps_node * max(r) are masked; S is meaningful only off-mask, and carries an
// independent 2 pi hbar branch per span.
struct PolarField {
  Grid1D grid;
  double time = 0.0;
  std::vector<double> r;
  std::vector<double> s;
  std::vector<std::uint8_t> valid;
  CVector amplitudes;  // source state; the momentum fields derive from it

  std::size_t first_valid() const {
    std::size_t i = 0;
    while (i < valid.size() && !valid[i]) ++i;
    return i;
  }
  std::size_t last_valid() const {
    std::size_t i = valid.size();
    while (i > 0 && !valid[i - 1]) --i;
    return i == 0 ? 0 : i - 1;
  }
  // True when the only masked points are the far tails.
  bool single_span() const {
    for (std::size_t i = first_valid(); i <= last_valid(); ++i)
      if (!valid[i]) return false;
    return true;
  }
};

inline PolarField polar_decompose(const Wavefunction& state,
                                  const PhysicalParams& params,
                                  double eps_node = kNodeEpsRel) {
  const std::size_t n = state.grid.size();
  PolarField field{state.grid, state.time, state.density(),
                   std::vector<double>(n, 0.0), std::vector<std::uint8_t>(n, 0),
                   state.amplitudes};
  const double floor =
      eps_node * *std::max_element(field.r.begin(), field.r.end());

  bool in_span = false;
  double prev_theta = 0.0;
  double winding = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (field.r[i] <= floor) {
      in_span = false;
      continue;
    }
    const double theta = std::arg(state.amplitudes[i]);
    if (!in_span) {
      winding = 0.0;  // new span: restart from the principal branch
    } else {
      double d = theta - prev_theta;
      if (d > M_PI) winding -= 2.0 * M_PI;
      if (d < -M_PI) winding += 2.0 * M_PI;
    }
    field.s[i] = params.hbar * (theta + winding);
    field.valid[i] = 1;
    prev_theta = theta;
    in_span = true;
  }
  return field;
}

// Bohmian momentum p_B = dS/dx = hbar Im[conj(psi) psi'] / r, the Re channel
// of the momentum weak value. Spectral derivative; zero at masked points.
inline std::vector<double> bohmian_momentum_field(const PolarField& field,
                                                  const PhysicalParams& params) {
  const CVector dpsi = spectral_derivative(field.grid, field.amplitudes);
  std::vector<double> p_b(field.r.size(), 0.0);
  for (std::size_t i = 0; i < p_b.size(); ++i)
    if (field.valid[i])
      p_b[i] = params.hbar *
               std::imag(std::conj(field.amplitudes[i]) * dpsi[i]) / field.r[i];
  return p_b;
}

// Osmotic momentum p_O = -(hbar/2) r'/r, the Im channel of the momentum weak
// value. r is smooth even through nodes, so the spectral derivative is safe.
inline std::vector<double> osmotic_momentum_field(const PolarField& field,
                                                  const PhysicalParams& params) {
  const RVector dr = spectral_derivative(field.grid, field.r);
  std::vector<double> p_o(field.r.size(), 0.0);
  for (std::size_t i = 0; i < p_o.size(); ++i)
    if (field.valid[i]) p_o[i] = -0.5 * params.hbar * dr[i] / field.r[i];
  return p_o;
}

struct QuantumPotentialField {
  Grid1D grid;
  double time = 0.0;
  std::vector<double> q;
  std::vector<double> v_eff;
  std::vector<std::uint8_t> valid;
};

// Q = -(hbar^2 / 2M) (sqrt r)'' / sqrt r and V_eff = V + Q. For single-span
// states sqrt(r) is globally smooth and the second derivative is spectral;
// interior nodes put a kink into sqrt(r), so multi-span states fall back to a
// 4th-order stencil inside each span (two guard cells at the span edges).
inline QuantumPotentialField quantum_potential(const PolarField& field,
                                               const Potential& potential,
                                               const PhysicalParams& params) {
  if (field.grid != potential.grid())
    throw GridMismatch("quantum_potential: potential on a different grid");
  const std::size_t n = field.r.size();
  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(field.r[i]);

  QuantumPotentialField out{field.grid, field.time,
                            std::vector<double>(n, 0.0),
                            std::vector<double>(n, 0.0), field.valid};
  const double pref = -params.hbar * params.hbar / (2.0 * params.mass);

  if (field.single_span()) {
    const RVector d2 = spectral_second_derivative(field.grid, root);
    for (std::size_t i = 0; i < n; ++i)
      if (field.valid[i]) out.q[i] = pref * d2[i] / root[i];
  } else {
    const double dx2 = field.grid.dx() * field.grid.dx();
    for (std::size_t i = 0; i < n; ++i) {
      if (!field.valid[i]) continue;
      const bool interior = i >= 2 && i + 2 < n && field.valid[i - 2] &&
                            field.valid[i - 1] && field.valid[i + 1] &&
                            field.valid[i + 2];
      if (!interior) {
        out.valid[i] = 0;  // guard cell at a span edge
        continue;
      }
      const double d2 = (-root[i + 2] + 16.0 * root[i + 1] - 30.0 * root[i] +
                         16.0 * root[i - 1] - root[i - 2]) /
                        (12.0 * dx2);
      out.q[i] = pref * d2 / root[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (out.valid[i]) out.v_eff[i] = potential.value_at(i) + out.q[i];
  return out;
}

}  // namespace wvsim
