#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "wvsim/errors.hpp"
#include "wvsim/potential.hpp"
#include "wvsim/wavefunction.hpp"

namespace wvsim {

struct PropagatorConfig {
  double dt;
  double t_max;
  double boundary_density_threshold = 1e-8;
  std::size_t record_stride = 1;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("PropagatorConfig: dt must be > 0");
    if (t_max < 0.0) throw ConfigError("PropagatorConfig: t_max must be >= 0");
    if (t_max > 0.0 && t_max < dt)
      throw ConfigError("PropagatorConfig: t_max must be >= dt");
    if (!(boundary_density_threshold > 0.0 && boundary_density_threshold < 1.0))
      throw ConfigError("PropagatorConfig: boundary threshold must lie in (0,1)");
    if (record_stride == 0)
      throw ConfigError("PropagatorConfig: record_stride must be >= 1");
  }
};

// Time-ordered snapshot history of one propagation run plus conservation
// monitors. Snapshots are spaced uniformly by dt * record_stride, so
// downstream time quadratures use this mesh directly.
struct EvolutionRecord {
  std::vector<double> times;
  std::vector<Wavefunction> snapshots;
  double norm_drift = 0.0;    // max |norm^2 - 1| over every step
  double energy_drift = 0.0;  // max |E(t) - E(0)| over snapshots
  double max_edge_probability = 0.0;

  double dt_mesh() const {
    return times.size() > 1 ? times[1] - times[0] : 0.0;
  }
  double t_final() const { return times.empty() ? 0.0 : times.back(); }
  std::size_t size() const { return snapshots.size(); }
};

// <H> = <psi|p^2/2M|psi> + <psi|V|psi>, kinetic part in the spectral basis.
inline double total_energy(const Wavefunction& state, const Potential& potential,
                           const PhysicalParams& params) {
  if (state.grid != potential.grid())
    throw GridMismatch("total_energy: potential on a different grid");
  const CVector hat = fft_forward(state.amplitudes);
  const double n = static_cast<double>(state.grid.size());
  double kinetic = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double hk = params.hbar * state.grid.k(i);
    kinetic += hk * hk * std::norm(hat[i]);
  }
  kinetic *= state.grid.dx() / (2.0 * params.mass * n);
  double pot = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i)
    pot += potential.value_at(i) * std::norm(state.amplitudes[i]);
  pot *= state.grid.dx();
  return kinetic + pot;
}

// Probability mass within 5 dx of either grid edge.
inline double edge_probability(const Wavefunction& state) {
  const std::size_t n = state.grid.size();
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    s += std::norm(state.amplitudes[i]) + std::norm(state.amplitudes[n - 1 - i]);
  return s * state.grid.dx();
}

namespace detail {

// Precomputed Strang phases: exp(-i V dt / 2 hbar) and exp(-i hbar k^2 dt / 2M).
struct StrangPhases {
  CVector half_potential;
  CVector kinetic;

  StrangPhases(const Potential& potential, const PhysicalParams& params,
               double dt) {
    const Grid1D& grid = potential.grid();
    half_potential.resize(grid.size());
    kinetic.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      half_potential[i] =
          std::polar(1.0, -potential.value_at(i) * dt / (2.0 * params.hbar));
      const double k = grid.k(i);
      kinetic[i] =
          std::polar(1.0, -params.hbar * k * k * dt / (2.0 * params.mass));
    }
  }

  void advance(CVector& psi) const {
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_potential[i];
    CVector hat = fft_forward(psi);
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= kinetic[i];
    psi = fft_inverse(hat);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_potential[i];
  }
};

}  // namespace detail

// One Strang step exp(-iV dt/2h) exp(-ip^2 dt/2Mh) exp(-iV dt/2h).
inline Wavefunction step(const Wavefunction& state, const Potential& potential,
                         const PhysicalParams& params, double dt) {
  if (state.grid != potential.grid())
    throw GridMismatch("step: potential on a different grid");
  detail::StrangPhases phases(potential, params, dt);
  CVector psi = state.amplitudes;
  phases.advance(psi);
  return Wavefunction(state.grid, std::move(psi), state.time + dt);
}

// Runs ceil(t_max/dt) steps (rounded up to a whole number of record strides),
// storing a snapshot every record_stride steps. The edge monitor runs every
// step; exceeding cfg.boundary_density_threshold aborts with BoundaryLeak,
// since the protocol's normalizations assume the packet never reaches the
// boundary.
inline EvolutionRecord propagate(const Wavefunction& state,
                                 const Potential& potential,
                                 const PropagatorConfig& cfg,
                                 const PhysicalParams& params) {
  cfg.validate();
  if (state.grid != potential.grid())
    throw GridMismatch("propagate: potential on a different grid");

  EvolutionRecord record;
  record.times.push_back(state.time);
  record.snapshots.push_back(state);

  if (cfg.t_max <= 0.0) return record;

  std::size_t n_steps =
      static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-12));
  const std::size_t rem = n_steps % cfg.record_stride;
  if (rem != 0) n_steps += cfg.record_stride - rem;

  const detail::StrangPhases phases(potential, params, cfg.dt);
  const double e0 = total_energy(state, potential, params);

  CVector psi = state.amplitudes;
  const double dx = state.grid.dx();
  for (std::size_t s = 1; s <= n_steps; ++s) {
    phases.advance(psi);
    const double t = state.time + static_cast<double>(s) * cfg.dt;

    double nrm2 = 0.0;
    for (const auto& a : psi) nrm2 += std::norm(a);
    nrm2 *= dx;
    record.norm_drift = std::max(record.norm_drift, std::abs(nrm2 - 1.0));

    double edge = 0.0;
    const std::size_t n = psi.size();
    for (std::size_t i = 0; i < 5; ++i)
      edge += std::norm(psi[i]) + std::norm(psi[n - 1 - i]);
    edge *= dx;
    record.max_edge_probability = std::max(record.max_edge_probability, edge);
    if (edge > cfg.boundary_density_threshold)
      throw BoundaryLeak("propagate: edge probability " + std::to_string(edge) +
                             " at t = " + std::to_string(t) +
                             "; grid too small for this t_max",
                         t, edge);

    if (s % cfg.record_stride == 0) {
      Wavefunction snap(state.grid, psi, t);
      record.energy_drift =
          std::max(record.energy_drift,
                   std::abs(total_energy(snap, potential, params) - e0));
      record.times.push_back(t);
      record.snapshots.push_back(std::move(snap));
    }
  }
  return record;
}

}  // namespace wvsim
