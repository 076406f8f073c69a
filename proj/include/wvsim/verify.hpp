#pragma once

#include <string>
#include <vector>

#include "wvsim/checks.hpp"

namespace wvsim {

// Dry-runs the property suites of the modules a config touches, at reduced
// size and without writing files. Module errors surface as failed checks with
// their origin, never as crashes.
inline std::vector<CheckResult> verify_scenario(const ExperimentConfig& cfg) {
  std::vector<CheckResult> results;
  auto guarded = [&](const char* module, const char* op, auto&& fn) {
    try {
      results.push_back(fn());
    } catch (const Error& e) {
      results.push_back(CheckResult{std::string(module) + "/" + op, false,
                                    std::string(error_kind(e)) + ": " +
                                        e.what()});
    }
  };

  switch (cfg.scenario) {
    case Scenario::finite_dim: {
      guarded("weak-core", "weak_value_from_strong", [&] {
        return check_triple_identity(cfg.finite_dim.instances,
                                     cfg.finite_dim.dim_min,
                                     cfg.finite_dim.dim_max,
                                     cfg.finite_dim.min_overlap, cfg.seed + 1);
      });
      break;
    }
    case Scenario::tof: {
      const Grid1D grid = cfg.grid->make();
      const Potential potential = cfg.potential.make(grid);
      const auto psi0 = prepare_coherent_state(*cfg.state, grid, cfg.physical);
      PropagatorConfig prop = *cfg.propagation;
      const auto record = propagate(psi0, potential, prop, cfg.physical);
      guarded("tof-protocol", "density_in_time", [&] {
        return check_distribution_normalization(record, cfg.tof->detectors);
      });
      guarded("tof-protocol", "flux_in_time", [&] {
        return check_flux_density_ratio(record, cfg.tof->detectors.front(),
                                        cfg.physical);
      });
      guarded("tof-protocol", "infer_im_weak_momentum_fd", [&] {
        return check_protocol_equivalence(record, cfg.tof->detectors,
                                          cfg.physical);
      });
      guarded("tof-protocol", "verify_mean_time_relation", [&] {
        return check_mean_time_relation(record, cfg.tof->detectors.front(),
                                        cfg.tof->fd_step, cfg.physical);
      });
      break;
    }
    case Scenario::bohmian: {
      const Grid1D grid = cfg.grid->make();
      const Potential potential = cfg.potential.make(grid);
      const auto psi0 = prepare_coherent_state(*cfg.state, grid, cfg.physical);
      const auto record = propagate(psi0, potential, *cfg.propagation,
                                    cfg.physical);
      guarded("bohmian", "bohmian_momentum_field", [&] {
        return check_bohmian_field_equivalence(record, cfg.physical);
      });
      guarded("bohmian", "integrate_trajectory", [&] {
        const std::size_t n =
            cfg.bohmian->ensemble > 0 ? cfg.bohmian->ensemble : 1000;
        return check_equivariance(record, potential, n, cfg.seed, cfg.physical);
      });
      guarded("bohmian", "energy_partition", [&] {
        return check_energy_conservation(record, potential, cfg.physical);
      });
      guarded("bohmian", "continuity", [&] {
        return check_continuity(record, cfg.physical);
      });
      guarded("bohmian", "quantum_hamilton_jacobi", [&] {
        return check_qhj(record, potential, cfg.physical);
      });
      break;
    }
    case Scenario::spin: {
      guarded("spin-interferometry", "weak_spin_from_intensities", [&] {
        return check_spin_three_route(cfg.spin->alpha.values(),
                                      cfg.spin->post_angle.values(),
                                      cfg.spin->path_pre);
      });
      guarded("spin-interferometry", "intensity_table", [&] {
        return check_spin_completeness(cfg.spin->alpha.values(),
                                       cfg.spin->post_angle.values(),
                                       cfg.spin->path_pre);
      });
      break;
    }
  }
  return results;
}

}  // namespace wvsim
