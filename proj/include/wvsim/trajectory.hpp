#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wvsim/bohmian.hpp"
#include "wvsim/evolution.hpp"
#include "wvsim/sampling.hpp"

namespace wvsim {

// One Bohmian path with its energy bookkeeping per recorded time:
// kinetic T_B = p_B^2/2M, internal I_O = p_O^2/2M, classical V, quantum Q.
struct BohmianTrajectory {
  std::vector<double> times;
  std::vector<double> xs;
  std::vector<double> ps;
  std::vector<double> kinetic;
  std::vector<double> internal;
  std::vector<double> potential;
  std::vector<double> quantum;
};

// Integrates dx/dt = p_B(x,t)/M through a recorded evolution: classic RK4
// across each snapshot interval, with the field interpolated cubically in x
// and linearly in t. Field tables are built once per record, so ensembles of
// trajectories share the cost.
class TrajectoryIntegrator {
 public:
  TrajectoryIntegrator(const EvolutionRecord& record, const Potential& potential,
                       const PhysicalParams& params, bool with_energies = true,
                       double eps_node = kNodeEpsRel)
      : record_(&record),
        potential_(&potential),
        params_(params),
        with_energies_(with_energies) {
    if (record.size() < 2)
      throw ConfigError("TrajectoryIntegrator: record needs >= 2 snapshots");
    const std::size_t n_t = record.size();
    p_b_.resize(n_t);
    valid_.resize(n_t);
    if (with_energies_) {
      p_o_.resize(n_t);
      q_.resize(n_t);
    }
    for (std::size_t k = 0; k < n_t; ++k) {
      auto field = polar_decompose(record.snapshots[k], params, eps_node);
      p_b_[k] = bohmian_momentum_field(field, params);
      valid_[k] = field.valid;
      if (with_energies_) {
        p_o_[k] = osmotic_momentum_field(field, params);
        auto qf = quantum_potential(field, potential, params);
        q_[k] = std::move(qf.q);
      }
    }
  }

  const Grid1D& grid() const { return record_->snapshots.front().grid; }

  BohmianTrajectory integrate(double x0) const {
    const auto& times = record_->times;
    BohmianTrajectory traj;
    traj.times = times;
    traj.xs.resize(times.size());
    traj.ps.resize(times.size());
    if (with_energies_) {
      traj.kinetic.resize(times.size());
      traj.internal.resize(times.size());
      traj.potential.resize(times.size());
      traj.quantum.resize(times.size());
    }

    double x = x0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      record_point(traj, k, x);
      if (k + 1 == times.size()) break;
      const double h = times[k + 1] - times[k];
      const double k1 = velocity(x, k, 0.0);
      const double k2 = velocity(x + 0.5 * h * k1, k, 0.5);
      const double k3 = velocity(x + 0.5 * h * k2, k, 0.5);
      const double k4 = velocity(x + h * k3, k, 1.0);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return traj;
  }

  // Ensemble helper: final positions only (no energy bookkeeping needed).
  std::vector<double> final_positions(const std::vector<double>& x0s) const {
    std::vector<double> xs(x0s.size());
    for (std::size_t j = 0; j < x0s.size(); ++j) {
      const auto& times = record_->times;
      double x = x0s[j];
      for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double h = times[k + 1] - times[k];
        const double k1 = velocity(x, k, 0.0);
        const double k2 = velocity(x + 0.5 * h * k1, k, 0.5);
        const double k3 = velocity(x + 0.5 * h * k2, k, 0.5);
        const double k4 = velocity(x + h * k3, k, 1.0);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      xs[j] = x;
    }
    return xs;
  }

 private:
  // Cubic 4-point Lagrange interpolation; `mask`, when given, trips
  // NodeApproach if the stencil touches a masked cell.
  double interpolate(const std::vector<double>& f,
                     const std::vector<std::uint8_t>* mask, double x) const {
    const Grid1D& g = grid();
    const double u_full = (x - g.x_min()) / g.dx();
    auto i0 = static_cast<long>(std::floor(u_full));
    const long n = static_cast<long>(g.size());
    if (i0 < 1) i0 = 1;
    if (i0 > n - 3) i0 = n - 3;
    const double u = u_full - static_cast<double>(i0);
    if (mask)
      for (long j = i0 - 1; j <= i0 + 2; ++j)
        if (!(*mask)[static_cast<std::size_t>(j)])
          throw NodeApproach(
              "trajectory entered a node-masked region near x = " +
              std::to_string(x));
    const double wm1 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    const double w0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    const double w1 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    const double w2 = (u + 1.0) * u * (u - 1.0) / 6.0;
    return wm1 * f[static_cast<std::size_t>(i0 - 1)] +
           w0 * f[static_cast<std::size_t>(i0)] +
           w1 * f[static_cast<std::size_t>(i0 + 1)] +
           w2 * f[static_cast<std::size_t>(i0 + 2)];
  }

  // p_B/M at position x, linearly blended between snapshots k and k+1.
  double velocity(double x, std::size_t k, double frac) const {
    const double a = interpolate(p_b_[k], &valid_[k], x);
    if (frac == 0.0) return a / params_.mass;
    const double b = interpolate(p_b_[k + 1], &valid_[k + 1], x);
    return ((1.0 - frac) * a + frac * b) / params_.mass;
  }

  void record_point(BohmianTrajectory& traj, std::size_t k, double x) const {
    traj.xs[k] = x;
    const double p = interpolate(p_b_[k], &valid_[k], x);
    traj.ps[k] = p;
    if (!with_energies_) return;
    const double p_o = interpolate(p_o_[k], &valid_[k], x);
    traj.kinetic[k] = p * p / (2.0 * params_.mass);
    traj.internal[k] = p_o * p_o / (2.0 * params_.mass);
    traj.potential[k] = interpolate(potential_->values(), nullptr, x);
    traj.quantum[k] = interpolate(q_[k], &valid_[k], x);
  }

  const EvolutionRecord* record_;
  const Potential* potential_;
  PhysicalParams params_;
  bool with_energies_;
  std::vector<std::vector<double>> p_b_, p_o_, q_;
  std::vector<std::vector<std::uint8_t>> valid_;
};

inline BohmianTrajectory integrate_trajectory(const EvolutionRecord& record,
                                              const Potential& potential,
                                              double x0,
                                              const PhysicalParams& params) {
  return TrajectoryIntegrator(record, potential, params).integrate(x0);
}

// Draws n positions from |psi(x)|^2 dx by inverse CDF with in-cell jitter;
// deterministic for a given seed.
inline std::vector<double> sample_positions(const Wavefunction& state,
                                            std::size_t n, std::uint64_t seed) {
  const Grid1D& g = state.grid;
  std::vector<double> cum(g.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    acc += std::norm(state.amplitudes[i]) * g.dx();
    cum[i] = acc;
  }
  for (double& c : cum) c /= acc;
  std::vector<double> xs(n);
  detail::UniformBits rng(seed);
  for (std::size_t e = 0; e < n; ++e) {
    const double u = rng.next();
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const auto k = static_cast<std::size_t>(it - cum.begin());
    const double lo = (k == 0) ? 0.0 : cum[k - 1];
    const double frac = (u - lo) / std::max(cum[k] - lo, 1e-300);
    xs[e] = g.x(k) + frac * g.dx();
  }
  return xs;
}

// CDF of |psi|^2 on the grid, for equivariance tests against an ensemble.
inline double density_cdf(const Wavefunction& state, double x) {
  const Grid1D& g = state.grid;
  if (x <= g.x_min()) return 0.0;
  double acc = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double mass = std::norm(state.amplitudes[i]) * g.dx();
    norm += mass;
    if (g.x(i) + g.dx() <= x) {
      acc += mass;
    } else if (g.x(i) < x) {
      acc += mass * (x - g.x(i)) / g.dx();
    }
  }
  return std::min(1.0, acc / norm);
}

}  // namespace wvsim
