#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "wvsim/errors.hpp"
#include "wvsim/grid.hpp"
#include "wvsim/params.hpp"
#include "wvsim/spectral.hpp"

namespace wvsim {

// Grid-sampled pre-selected state <x|Psi_t>. Immutable by convention: every
// operation returns a new value.
struct Wavefunction {
  Grid1D grid;
  CVector amplitudes;
  double time = 0.0;

  Wavefunction(Grid1D g, CVector amps, double t = 0.0)
      : grid(std::move(g)), amplitudes(std::move(amps)), time(t) {
    if (amplitudes.size() != grid.size())
      throw GridMismatch("Wavefunction: amplitude count != grid size");
  }

  // Quadrature norm^2 = sum |psi_i|^2 dx.
  double norm2() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s * grid.dx();
  }

  RVector density() const {
    RVector rho(amplitudes.size());
    for (std::size_t i = 0; i < amplitudes.size(); ++i)
      rho[i] = std::norm(amplitudes[i]);
    return rho;
  }
};

// Gaussian coherent state (Gamma/pi)^{1/4} exp[-Gamma(x-y)^2/2 + i p_y (x-y)/hbar].
struct CoherentStateSpec {
  double gamma;     // inverse length^2 width Gamma
  double center;    // y
  double momentum;  // p_y

  void validate() const {
    if (!(gamma > 0.0)) throw ConfigError("CoherentStateSpec: gamma must be > 0");
  }

  double sigma_x() const { return 1.0 / std::sqrt(2.0 * gamma); }
};

// Samples the coherent state onto the grid. No renormalization: for a
// contained Gaussian the rectangle-rule norm is already 1 to well below 1e-10.
// Throws ContainmentError unless 6 standard deviations fit inside the grid in
// position space, and the 6-sigma momentum tail stays below the Nyquist
// wavenumber (both tails contaminate time-of-flight statistics).
inline Wavefunction prepare_coherent_state(const CoherentStateSpec& spec,
                                           const Grid1D& grid,
                                           const PhysicalParams& params) {
  spec.validate();
  params.validate();
  const double sigma = spec.sigma_x();
  if (spec.center - 6.0 * sigma < grid.x_min() ||
      spec.center + 6.0 * sigma > grid.x_max())
    throw ContainmentError(
        "prepare_coherent_state: 6 sigma = " + std::to_string(6.0 * sigma) +
        " around y = " + std::to_string(spec.center) + " exceeds the grid");
  const double sigma_k = std::sqrt(spec.gamma / 2.0);  // momentum spread / hbar
  if (std::abs(spec.momentum) / params.hbar + 6.0 * sigma_k > grid.k_nyquist())
    throw ContainmentError(
        "prepare_coherent_state: momentum content approaches the Nyquist "
        "wavenumber; refine the grid");

  const double amp = std::pow(spec.gamma / M_PI, 0.25);
  CVector psi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid.x(i) - spec.center;
    psi[i] = amp * std::exp(-0.5 * spec.gamma * d * d) *
             std::polar(1.0, spec.momentum * d / params.hbar);
  }
  return Wavefunction(grid, std::move(psi), 0.0);
}

// <bra|ket> = sum conj(bra_i) ket_i dx.
inline Complex inner_product(const Wavefunction& bra, const Wavefunction& ket) {
  if (bra.grid != ket.grid)
    throw GridMismatch("inner_product: states live on different grids");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < bra.amplitudes.size(); ++i)
    s += std::conj(bra.amplitudes[i]) * ket.amplitudes[i];
  return s * bra.grid.dx();
}

// p psi = -i hbar d/dx psi, evaluated spectrally.
inline Wavefunction apply_momentum(const Wavefunction& state,
                                   const PhysicalParams& params) {
  CVector hat = fft_forward(state.amplitudes);
  for (std::size_t i = 0; i < hat.size(); ++i)
    hat[i] *= params.hbar * state.grid.k(i);
  return Wavefunction(state.grid, fft_inverse(hat), state.time);
}

inline double expectation_momentum(const Wavefunction& state,
                                   const PhysicalParams& params) {
  return inner_product(state, apply_momentum(state, params)).real();
}

inline double expectation_position(const Wavefunction& state) {
  double s = 0.0;
  for (std::size_t i = 0; i < state.amplitudes.size(); ++i)
    s += state.grid.x(i) * std::norm(state.amplitudes[i]);
  return s * state.grid.dx();
}

}  // namespace wvsim
