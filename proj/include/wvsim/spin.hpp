#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "wvsim/weak_value.hpp"

namespace wvsim {

// Path (x) spin tensor space, basis {|1 up>, |1 dn>, |2 up>, |2 dn>}:
// index = 2 * path + spin with path 0 = "path 1", spin 0 = "up along z".
struct PathSpinState {
  Eigen::Vector4cd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

enum class SpinAxis { x, y, z };

// |S_x;+-> = (|up> +- |dn>)/sqrt2, |S_y;+-> = (|up> +- i|dn>)/sqrt2,
// |S_z;+> = |up>, |S_z;-> = |dn>.
inline Eigen::Vector2cd spin_basis(SpinAxis axis, int sign) {
  using C = std::complex<double>;
  const double s = sign >= 0 ? 1.0 : -1.0;
  Eigen::Vector2cd v;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (axis) {
    case SpinAxis::x: v << C(inv_sqrt2, 0), C(s * inv_sqrt2, 0); break;
    case SpinAxis::y: v << C(inv_sqrt2, 0), C(0, s * inv_sqrt2); break;
    case SpinAxis::z:
      if (sign >= 0) v << 1, 0;
      else v << 0, 1;
      break;
  }
  return v;
}

// Path spin operator in z: |path 1> -> +1, |path 2> -> -1, identity on spin.
inline OperatorMatrix sigma_z_path() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1.0;
  m(2, 2) = m(3, 3) = -1.0;
  return OperatorMatrix(m);
}

struct InterferometerConfig {
  double alpha = M_PI / 2.0;  // magnetic field strength angle
  Eigen::Vector2cd path_pre;
  Eigen::Vector2cd path_post;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= M_PI))
      throw ConfigError("InterferometerConfig: alpha must lie in [0, pi]");
    if (std::abs(path_pre.norm() - 1.0) > 1e-12 ||
        std::abs(path_post.norm() - 1.0) > 1e-12)
      throw ConfigError("InterferometerConfig: path states must be normalized");
  }
};

// Pre-selected state after the spin-path coupling:
// cos(a/2) |P_i>|S_x;+> - i sigma_z^P sin(a/2) |P_i>|S_x;->.
inline PathSpinState evolve_preselected(const InterferometerConfig& cfg) {
  cfg.validate();
  const auto sx_plus = spin_basis(SpinAxis::x, +1);
  const auto sx_minus = spin_basis(SpinAxis::x, -1);
  Eigen::Vector2cd flipped = cfg.path_pre;
  flipped(1) *= -1.0;  // sigma_z on the path factor
  PathSpinState state;
  const std::complex<double> minus_i{0.0, -1.0};
  for (int p = 0; p < 2; ++p)
    for (int s = 0; s < 2; ++s)
      state.amplitudes(2 * p + s) =
          std::cos(cfg.alpha / 2.0) * cfg.path_pre(p) * sx_plus(s) +
          minus_i * std::sin(cfg.alpha / 2.0) * flipped(p) * sx_minus(s);
  return state;
}

// Post-selected probe state |P_f>|S_j;+->.
inline Vector post_selection_state(const InterferometerConfig& cfg,
                                   SpinAxis axis, int sign) {
  const auto spin = spin_basis(axis, sign);
  Vector v(4);
  for (int p = 0; p < 2; ++p)
    for (int s = 0; s < 2; ++s) v(2 * p + s) = cfg.path_post(p) * spin(s);
  return v;
}

// The six measured intensities I_{j,+-} = <Psi_i(a)| D(j;+-) |Psi_i(a)>,
// with each projector built by the density/flux/commutator machinery.
struct IntensityTable {
  double x_plus = 0, x_minus = 0;
  double y_plus = 0, y_minus = 0;
  double z_plus = 0, z_minus = 0;

  double axis_sum(SpinAxis axis) const {
    switch (axis) {
      case SpinAxis::x: return x_plus + x_minus;
      case SpinAxis::y: return y_plus + y_minus;
      case SpinAxis::z: return z_plus + z_minus;
    }
    return 0.0;
  }
};

inline IntensityTable intensity_table(const InterferometerConfig& cfg) {
  const PathSpinState psi = evolve_preselected(cfg);
  auto intensity = [&](SpinAxis axis, int sign) {
    FinitePostSelection post(post_selection_state(cfg, axis, sign));
    const auto triple = build_triple(sigma_z_path(), post);
    return psi.amplitudes.dot(triple.density.entries * psi.amplitudes).real();
  };
  IntensityTable t;
  t.x_plus = intensity(SpinAxis::x, +1);
  t.x_minus = intensity(SpinAxis::x, -1);
  t.y_plus = intensity(SpinAxis::y, +1);
  t.y_minus = intensity(SpinAxis::y, -1);
  t.z_plus = intensity(SpinAxis::z, +1);
  t.z_minus = intensity(SpinAxis::z, -1);
  return t;
}

// Direct path weak value <P_f|sigma_z|P_i> / <P_f|P_i>.
inline WeakValue weak_spin_direct(const InterferometerConfig& cfg,
                                  double overlap_eps = kOverlapEps) {
  cfg.validate();
  const std::complex<double> overlap = cfg.path_post.dot(cfg.path_pre);
  if (std::abs(overlap) <= overlap_eps)
    throw OrthogonalSelection("weak_spin_direct: path post-selection "
                              "orthogonal to the pre-selected path");
  Eigen::Vector2cd flipped = cfg.path_pre;
  flipped(1) *= -1.0;
  WeakValue w;
  w.value = cfg.path_post.dot(flipped) / overlap;
  w.re_channel = w.value.real();
  w.im_channel = w.value.imag();
  w.denominator = std::norm(overlap);
  return w;
}

// Weak value recovered from the six strong intensities:
// Re = cot(a/2)(I_y+ - I_y-)/(2 I_x+), Im = cot(a/2)(I_z+ - I_z-)/(2 I_x+).
inline WeakValue weak_spin_from_intensities(const IntensityTable& table,
                                            double alpha,
                                            double overlap_eps = kOverlapEps) {
  if (std::abs(std::sin(alpha)) < 1e-12)
    throw DegenerateAngle(
        "weak_spin_from_intensities: sin(alpha) = 0 at alpha = " +
        std::to_string(alpha));
  if (table.x_plus <= overlap_eps * overlap_eps)
    throw OrthogonalSelection(
        "weak_spin_from_intensities: I_x+ vanishes (orthogonal "
        "post-selection)");
  const double half_cot = 0.5 / std::tan(alpha / 2.0);
  WeakValue w;
  w.re_channel = half_cot * (table.y_plus - table.y_minus) / table.x_plus;
  w.im_channel = half_cot * (table.z_plus - table.z_minus) / table.x_plus;
  w.value = {w.re_channel, w.im_channel};
  w.denominator = table.x_plus;
  return w;
}

// Residuals of the closed-form identities connecting strong expectation
// values of D/F/C on the 4-dimensional space with the path weak value and
// the intensity differences.
struct TripleCorrespondence {
  double density_identity = 0.0;    // I_x+ vs cos^2(a/2) |<P_i|P_f>|^2
  double flux_closed_form = 0.0;    // <F(x;+)> vs |ovl|^2 cos^2(a/2) Re w
  double comm_closed_form = 0.0;    // <C(x;+)> vs |ovl|^2 cos^2(a/2) Im w
  double flux_intensity = 0.0;      // <F(x;+)> vs cot(a/2)(I_y+ - I_y-)/2
  double comm_intensity = 0.0;      // <C(x;+)> vs cot(a/2)(I_z+ - I_z-)/2

  double max() const {
    return std::max({density_identity, flux_closed_form, comm_closed_form,
                     flux_intensity, comm_intensity});
  }
};

inline TripleCorrespondence verify_triple_correspondence(
    const InterferometerConfig& cfg) {
  const PathSpinState psi = evolve_preselected(cfg);
  FinitePostSelection post(post_selection_state(cfg, SpinAxis::x, +1));
  const auto triple = build_triple(sigma_z_path(), post);
  auto expect = [&](const OperatorMatrix& op) {
    return psi.amplitudes.dot(op.entries * psi.amplitudes).real();
  };
  const double d = expect(triple.density);
  const double f = expect(triple.flux);
  const double c = expect(triple.commutator);

  const auto w = weak_spin_direct(cfg);
  const double ovl2 = std::norm(cfg.path_post.dot(cfg.path_pre));
  const double cos2 = std::cos(cfg.alpha / 2.0) * std::cos(cfg.alpha / 2.0);
  const auto table = intensity_table(cfg);
  const double half_cot = 0.5 / std::tan(cfg.alpha / 2.0);

  TripleCorrespondence out;
  out.density_identity = std::abs(d - cos2 * ovl2);
  out.flux_closed_form = std::abs(f - ovl2 * cos2 * w.re_channel);
  out.comm_closed_form = std::abs(c - ovl2 * cos2 * w.im_channel);
  out.flux_intensity = std::abs(f - half_cot * (table.y_plus - table.y_minus));
  out.comm_intensity = std::abs(c - half_cot * (table.z_plus - table.z_minus));
  return out;
}

// Shot-noise mode: per axis, n strong measurements split between +, - and
// "not detected" (the path post-selection failed). Estimates are count
// frequencies with binomial standard errors.
struct IntensityEstimate {
  IntensityTable mean;
  IntensityTable sigma;
  std::size_t shots_per_axis = 0;
};

inline IntensityEstimate sample_intensities(const IntensityTable& table,
                                            std::size_t shots_per_axis,
                                            std::uint64_t seed) {
  if (shots_per_axis == 0)
    throw ConfigError("sample_intensities: shots_per_axis must be positive");
  std::mt19937_64 engine(seed);
  auto draw_axis = [&](double p_plus, double p_minus, double& est_plus,
                       double& est_minus, double& sig_plus, double& sig_minus) {
    std::size_t c_plus = 0, c_minus = 0;
    for (std::size_t s = 0; s < shots_per_axis; ++s) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      if (u < p_plus)
        ++c_plus;
      else if (u < p_plus + p_minus)
        ++c_minus;
    }
    const double n = static_cast<double>(shots_per_axis);
    est_plus = static_cast<double>(c_plus) / n;
    est_minus = static_cast<double>(c_minus) / n;
    sig_plus = std::sqrt(std::max(est_plus * (1.0 - est_plus), 1.0 / n) / n);
    sig_minus = std::sqrt(std::max(est_minus * (1.0 - est_minus), 1.0 / n) / n);
  };
  IntensityEstimate est;
  est.shots_per_axis = shots_per_axis;
  draw_axis(table.x_plus, table.x_minus, est.mean.x_plus, est.mean.x_minus,
            est.sigma.x_plus, est.sigma.x_minus);
  draw_axis(table.y_plus, table.y_minus, est.mean.y_plus, est.mean.y_minus,
            est.sigma.y_plus, est.sigma.y_minus);
  draw_axis(table.z_plus, table.z_minus, est.mean.z_plus, est.mean.z_minus,
            est.sigma.z_plus, est.sigma.z_minus);
  return est;
}

struct WeakValueEstimate {
  double re = 0.0, re_sigma = 0.0;
  double im = 0.0, im_sigma = 0.0;
};

inline WeakValueEstimate weak_spin_from_counts(const IntensityEstimate& est,
                                               double alpha) {
  const auto w = weak_spin_from_intensities(est.mean, alpha);
  const double half_cot = 0.5 / std::tan(alpha / 2.0);
  const double ix = est.mean.x_plus;
  WeakValueEstimate out;
  out.re = w.re_channel;
  out.im = w.im_channel;
  const double gy = half_cot / ix;
  out.re_sigma = std::sqrt(
      gy * gy * (est.sigma.y_plus * est.sigma.y_plus +
                 est.sigma.y_minus * est.sigma.y_minus) +
      (w.re_channel / ix) * (w.re_channel / ix) * est.sigma.x_plus *
          est.sigma.x_plus);
  out.im_sigma = std::sqrt(
      gy * gy * (est.sigma.z_plus * est.sigma.z_plus +
                 est.sigma.z_minus * est.sigma.z_minus) +
      (w.im_channel / ix) * (w.im_channel / ix) * est.sigma.x_plus *
          est.sigma.x_plus);
  return out;
}

}  // namespace wvsim
