#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "wvsim/bohmian_dynamics.hpp"
#include "wvsim/manifest.hpp"
#include "wvsim/momentum_weak.hpp"
#include "wvsim/sampling.hpp"
#include "wvsim/spin.hpp"
#include "wvsim/tof_inference.hpp"
#include "wvsim/trajectory.hpp"

namespace wvsim {

namespace detail {

// Library-side deterministic generator for the finite-dimensional property
// scenario.
class PropertyRng {
 public:
  explicit PropertyRng(std::uint64_t seed) : bits_(seed) {}

  std::complex<double> unit_box() {
    const double re = 2.0 * bits_.next() - 1.0;
    const double im = 2.0 * bits_.next() - 1.0;
    return {re, im};
  }
  Vector state(Eigen::Index dim) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = unit_box();
    v.normalize();
    return v;
  }
  Matrix matrix(Eigen::Index dim) {
    Matrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = unit_box();
    return m;
  }
  Matrix hermitian(Eigen::Index dim) {
    Matrix m = matrix(dim);
    return Matrix(0.5 * (m + m.adjoint()));
  }

 private:
  UniformBits bits_;
};

inline std::string format_residual(double value, double bound) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << "max residual " << value << " (bound " << bound
      << ")";
  return out.str();
}

inline CheckResult bounded(const std::string& name, double value, double bound) {
  return CheckResult{name, value < bound, format_residual(value, bound)};
}

}  // namespace detail

// Random-instance verification that the flux/density and commutator/density
// ratios reproduce the direct weak value; residuals are relative above 1.
struct TripleIdentitySample {
  int dim = 0;
  double overlap = 0.0;
  std::complex<double> weak_value;
  double residual = 0.0;
};

inline std::vector<TripleIdentitySample> triple_identity_samples(
    std::size_t instances, int dim_min, int dim_max, double min_overlap,
    std::uint64_t seed) {
  detail::PropertyRng rng(seed);
  std::vector<TripleIdentitySample> out;
  out.reserve(instances);
  const int dim_span = dim_max - dim_min + 1;
  for (std::size_t rep = 0; rep < instances; ++rep) {
    const int dim = dim_min + static_cast<int>(rep % dim_span);
    const bool hermitian = rep % 2 == 0;
    OperatorMatrix op(hermitian ? rng.hermitian(dim) : rng.matrix(dim));
    Vector psi = rng.state(dim);
    Vector phi = rng.state(dim);
    while (std::abs(phi.dot(psi)) <= min_overlap) phi = rng.state(dim);
    FinitePostSelection post(phi);

    const auto direct = weak_value_exact(op, psi, post);
    const auto strong = weak_value_from_strong(op, psi, post);
    const double scale = std::max(1.0, std::abs(direct.value));
    const auto triple = build_triple(op, post);

    TripleIdentitySample sample;
    sample.dim = dim;
    sample.overlap = std::abs(phi.dot(psi));
    sample.weak_value = direct.value;
    sample.residual = std::max(
        {std::abs(strong.re_channel - direct.value.real()) / scale,
         std::abs(strong.im_channel - direct.value.imag()) / scale,
         triple.density.hermiticity_defect(), triple.flux.hermiticity_defect(),
         triple.commutator.hermiticity_defect()});
    out.push_back(sample);
  }
  return out;
}

inline CheckResult check_triple_identity(std::size_t instances, int dim_min,
                                         int dim_max, double min_overlap,
                                         std::uint64_t seed) {
  double worst = 0.0;
  for (const auto& s :
       triple_identity_samples(instances, dim_min, dim_max, min_overlap, seed))
    worst = std::max(worst, s.residual);
  return detail::bounded("triple_ratio_identity", worst, 1e-12);
}

// Per-detector series of the two strong-measurement channels against the
// direct (p psi)(x)/psi(x) value on the record mesh.
struct WeakChannelSeries {
  double x = 0.0;
  std::vector<double> times;
  std::vector<double> re_direct, im_direct;
  std::vector<double> re_ratio;  // M flux / density
  std::vector<double> im_fd;     // centered log-density difference
  std::vector<std::uint8_t> valid;
};

inline WeakChannelSeries build_weak_channel_series(const EvolutionRecord& record,
                                                   double x, double fd_step,
                                                   const PhysicalParams& params) {
  const Grid1D& grid = record.snapshots.front().grid;
  const std::size_t i = grid.index_near(x);
  WeakChannelSeries series;
  series.x = grid.x(i);
  series.times = record.times;

  const auto u = density_series(record, i);
  const auto f = flux_series(record, i, params);
  const double peak = *std::max_element(u.begin(), u.end());
  const auto fd = infer_im_weak_momentum_fd(record, x, fd_step, params);

  const std::size_t n_t = record.size();
  series.re_direct.assign(n_t, 0.0);
  series.im_direct.assign(n_t, 0.0);
  series.re_ratio.assign(n_t, 0.0);
  series.im_fd.assign(n_t, 0.0);
  series.valid.assign(n_t, 0);
  for (std::size_t k = 0; k < n_t; ++k) {
    if (u[k] <= kNodeEpsRel * peak || !fd.valid[k]) continue;
    const auto& snap = record.snapshots[k];
    const Wavefunction p_psi = apply_momentum(snap, params);
    const Complex direct = p_psi.amplitudes[i] / snap.amplitudes[i];
    series.re_direct[k] = direct.real();
    series.im_direct[k] = direct.imag();
    series.re_ratio[k] = params.mass * f[k] / u[k];
    series.im_fd[k] = fd.values[k];
    series.valid[k] = 1;
  }
  return series;
}

// Pointwise agreement of the exact-field channels with the direct value over
// times where the density is statistically meaningful.
inline CheckResult check_protocol_equivalence(const EvolutionRecord& record,
                                              const std::vector<double>& xs,
                                              const PhysicalParams& params,
                                              double density_window = 1e-6) {
  double worst = 0.0;
  for (double x : xs) {
    const std::size_t i = record.snapshots.front().grid.index_near(x);
    const auto u = density_series(record, i);
    const double peak = *std::max_element(u.begin(), u.end());
    const auto im = im_weak_series(record, i, params);
    const auto f = flux_series(record, i, params);
    for (std::size_t k = 0; k < record.size(); ++k) {
      if (u[k] < density_window * peak || !std::isfinite(im[k])) continue;
      const auto& snap = record.snapshots[k];
      const Wavefunction p_psi = apply_momentum(snap, params);
      const Complex direct = p_psi.amplitudes[i] / snap.amplitudes[i];
      const double re_ratio = params.mass * f[k] / u[k];
      worst = std::max(
          {worst,
           std::abs(re_ratio - direct.real()) /
               std::max(1.0, std::abs(direct.real())),
           std::abs(im[k] - direct.imag()) /
               std::max(1.0, std::abs(direct.imag()))});
    }
  }
  return detail::bounded("protocol_equivalence_exact_fields", worst, 1e-6);
}

inline CheckResult check_nx_constancy(const EvolutionRecord& record,
                                      const std::vector<double>& xs) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (double x : xs) {
    const double n = density_in_time(record, x).normalization;
    if (first) {
      lo = hi = n;
      first = false;
    }
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  return detail::bounded("N_of_x_constancy", hi / lo - 1.0, 0.01);
}

inline CheckResult check_nf_constancy(const EvolutionRecord& record,
                                      const std::vector<double>& xs,
                                      const PhysicalParams& params) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (double x : xs) {
    const double n = flux_in_time(record, x, params).normalization;
    if (first) {
      lo = hi = n;
      first = false;
    }
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  return detail::bounded("N_f_constancy", hi - lo, 1e-6);
}

inline CheckResult check_flux_density_ratio(const EvolutionRecord& record,
                                            double x,
                                            const PhysicalParams& params) {
  const auto rho = density_in_time(record, x);
  const auto flux = flux_in_time(record, x, params);
  const std::size_t i = rho.detector_index;
  double peak = 0.0;
  for (double v : rho.values) peak = std::max(peak, v);
  double worst = 0.0;
  for (std::size_t k = 0; k < record.size(); ++k) {
    if (rho.values[k] < 1e-8 * peak) continue;
    const auto& snap = record.snapshots[k];
    const Wavefunction p_psi = apply_momentum(snap, params);
    const Complex direct = p_psi.amplitudes[i] / snap.amplitudes[i];
    const double lhs = flux.values[k] * params.mass * flux.normalization /
                       (rho.normalization * rho.values[k]);
    worst = std::max(worst, std::abs(lhs - direct.real()) /
                                std::max(1.0, std::abs(direct.real())));
  }
  return detail::bounded("flux_density_ratio_identity", worst, 1e-8);
}

inline CheckResult check_mean_time_relation(const EvolutionRecord& record,
                                            double x, double fd_step,
                                            const PhysicalParams& params,
                                            double rel_bound = 1e-4) {
  const auto rel = verify_mean_time_relation(record, x, fd_step, params);
  const double relative =
      rel.residual / std::max(rel.scale, 1e-300);
  return detail::bounded("mean_time_relation", relative, rel_bound);
}

inline CheckResult check_distribution_normalization(
    const EvolutionRecord& record, const std::vector<double>& xs) {
  double worst = 0.0;
  for (double x : xs) {
    const auto dist = density_in_time(record, x);
    double total = 0.0;
    for (double v : dist.values) total += v;
    worst = std::max(worst, std::abs(total * dist.dt() - 1.0));
  }
  return detail::bounded("rho_normalization", worst, 1e-8);
}

inline CheckResult check_bohmian_field_equivalence(const EvolutionRecord& record,
                                                   const PhysicalParams& params,
                                                   std::size_t stride = 50) {
  double worst = 0.0;
  for (std::size_t k = 0; k < record.size(); k += stride) {
    const auto& snap = record.snapshots[k];
    auto polar = polar_decompose(snap, params);
    auto p_b = bohmian_momentum_field(polar, params);
    auto p_o = osmotic_momentum_field(polar, params);
    auto weak = momentum_weak_fields(snap, params);
    for (std::size_t i = 0; i < p_b.size(); ++i)
      if (polar.valid[i] && weak.valid[i])
        worst = std::max({worst, std::abs(p_b[i] - weak.re[i]),
                          std::abs(p_o[i] - weak.im[i])});
  }
  return detail::bounded("bohmian_fields_equal_weak_channels", worst, 1e-10);
}

inline CheckResult check_equivariance(const EvolutionRecord& record,
                                      const Potential& potential,
                                      std::size_t n_trajectories,
                                      std::uint64_t seed,
                                      const PhysicalParams& params) {
  TrajectoryIntegrator integrator(record, potential, params,
                                  /*with_energies=*/false);
  auto x0s = sample_positions(record.snapshots.front(), n_trajectories, seed);
  auto finals = integrator.final_positions(x0s);
  std::sort(finals.begin(), finals.end());
  const auto& last = record.snapshots.back();
  const double n = static_cast<double>(finals.size());
  double d = 0.0;
  for (std::size_t j = 0; j < finals.size(); ++j) {
    const double cdf = density_cdf(last, finals[j]);
    d = std::max(d, std::abs(cdf - static_cast<double>(j) / n));
    d = std::max(d, std::abs(static_cast<double>(j + 1) / n - cdf));
  }
  const double critical = 1.63 / std::sqrt(n);
  return detail::bounded("trajectory_equivariance_ks", d, critical);
}

inline CheckResult check_energy_conservation(const EvolutionRecord& record,
                                             const Potential& potential,
                                             const PhysicalParams& params) {
  const auto series = energy_partition(record, potential, params);
  const double rel =
      series.max_total_drift() / std::max(1e-300, std::abs(series.total.front()));
  return detail::bounded("energy_partition_conservation", rel, 1e-7);
}

inline CheckResult check_continuity(const EvolutionRecord& record,
                                    const PhysicalParams& params) {
  const auto res = continuity_residual(record, params);
  return detail::bounded("continuity_equation",
                         res.max_residual / std::max(1.0, res.scale), 1e-6);
}

inline CheckResult check_qhj(const EvolutionRecord& record,
                             const Potential& potential,
                             const PhysicalParams& params) {
  const auto res = qhj_residual(record, potential, params);
  return detail::bounded("quantum_hamilton_jacobi",
                         res.max_residual / std::max(1.0, res.scale), 1e-5);
}

inline CheckResult check_spin_three_route(const std::vector<double>& alphas,
                                          const std::vector<double>& phis,
                                          const Eigen::Vector2cd& path_pre,
                                          double min_overlap = 1e-3) {
  double worst = 0.0;
  for (double alpha : alphas) {
    for (double phi : phis) {
      InterferometerConfig cfg;
      cfg.alpha = alpha;
      cfg.path_pre = path_pre;
      cfg.path_post << std::cos(phi), std::sin(phi);
      if (std::abs(cfg.path_post.dot(cfg.path_pre)) <= min_overlap) continue;
      const auto direct = weak_spin_direct(cfg);
      const auto psi = evolve_preselected(cfg);
      const auto strong = weak_value_from_strong(
          sigma_z_path(), psi.amplitudes,
          FinitePostSelection(post_selection_state(cfg, SpinAxis::x, +1)));
      const auto table = intensity_table(cfg);
      const auto from_i = weak_spin_from_intensities(table, alpha);
      const double scale = std::max(1.0, std::abs(direct.value));
      worst = std::max(
          {worst, std::abs(strong.re_channel - direct.re_channel) / scale,
           std::abs(strong.im_channel - direct.im_channel) / scale,
           std::abs(from_i.re_channel - direct.re_channel) / scale,
           std::abs(from_i.im_channel - direct.im_channel) / scale});
    }
  }
  return detail::bounded("spin_three_route_agreement", worst, 1e-12);
}

inline CheckResult check_spin_completeness(const std::vector<double>& alphas,
                                           const std::vector<double>& phis,
                                           const Eigen::Vector2cd& path_pre) {
  double worst = 0.0;
  for (double alpha : alphas) {
    for (double phi : phis) {
      InterferometerConfig cfg;
      cfg.alpha = alpha;
      cfg.path_pre = path_pre;
      cfg.path_post << std::cos(phi), std::sin(phi);
      const auto t = intensity_table(cfg);
      const double sx = t.axis_sum(SpinAxis::x);
      worst = std::max({worst, std::abs(t.axis_sum(SpinAxis::y) - sx),
                        std::abs(t.axis_sum(SpinAxis::z) - sx)});
    }
  }
  return detail::bounded("spin_completeness_sums", worst, 1e-12);
}

}  // namespace wvsim
