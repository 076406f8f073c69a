#pragma once

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "wvsim/grid.hpp"

namespace wvsim {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;
using RVector = std::vector<double>;

namespace detail {

// One cached FFT engine per thread; Eigen::FFT memoizes twiddle plans by size.
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

}  // namespace detail

// Unnormalized forward transform: F_k = sum_j f_j exp(-2*pi*i*j*k/n).
inline CVector fft_forward(const CVector& field) {
  CVector out(field.size());
  detail::fft_engine().fwd(out, field);
  return out;
}

// Inverse transform including the 1/n factor.
inline CVector fft_inverse(const CVector& spectrum) {
  CVector out(spectrum.size());
  detail::fft_engine().inv(out, spectrum);
  return out;
}

// Spectral d/dx. Exact for grid-band-limited periodic fields.
inline CVector spectral_derivative(const Grid1D& grid, const CVector& field) {
  CVector hat = fft_forward(field);
  for (std::size_t i = 0; i < hat.size(); ++i)
    hat[i] *= Complex(0.0, grid.k(i));
  return fft_inverse(hat);
}

inline RVector spectral_derivative(const Grid1D& grid, const RVector& field) {
  CVector cfield(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) cfield[i] = field[i];
  const CVector d = spectral_derivative(grid, cfield);
  RVector out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = d[i].real();
  return out;
}

inline RVector spectral_second_derivative(const Grid1D& grid, const RVector& field) {
  CVector cfield(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) cfield[i] = field[i];
  CVector hat = fft_forward(cfield);
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double k = grid.k(i);
    hat[i] *= -k * k;
  }
  const CVector d2 = fft_inverse(hat);
  RVector out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = d2[i].real();
  return out;
}

}  // namespace wvsim
