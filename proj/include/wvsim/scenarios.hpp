#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "wvsim/checks.hpp"
#include "wvsim/csv.hpp"

namespace wvsim {

namespace detail {

template <typename F>
auto with_context(const char* module, const char* op, F&& f) {
  try {
    return f();
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(module, op, e.what());
  }
}

struct Emitter {
  std::filesystem::path dir;
  std::string hash;
  std::vector<std::string>* files;

  CsvWriter open(const std::string& name,
                 const std::vector<std::string>& columns) const {
    files->push_back(name);
    return CsvWriter((dir / name).string(), hash, columns);
  }
};

inline std::string detector_label(std::size_t index) {
  return "d" + std::to_string(index);
}

}  // namespace detail

inline void run_finite_dim_scenario(const ExperimentConfig& cfg,
                                    const detail::Emitter& emit,
                                    RunManifest& manifest) {
  const auto& spec = cfg.finite_dim;
  auto samples = detail::with_context("weak-core", "weak_value_from_strong", [&] {
    return triple_identity_samples(spec.instances, spec.dim_min, spec.dim_max,
                                   spec.min_overlap, cfg.seed + 1);
  });
  auto csv = emit.open("triple_identity.csv",
                       {"dim", "overlap", "re_w", "im_w", "residual"});
  double worst = 0.0;
  for (const auto& s : samples) {
    csv.row({static_cast<double>(s.dim), s.overlap, s.weak_value.real(),
             s.weak_value.imag(), s.residual});
    worst = std::max(worst, s.residual);
  }
  manifest.checks.push_back(
      detail::bounded("triple_ratio_identity", worst, 1e-12));
}

inline void run_tof_scenario(const ExperimentConfig& cfg,
                             const detail::Emitter& emit,
                             RunManifest& manifest) {
  const auto& spec = *cfg.tof;
  const Grid1D grid = cfg.grid->make();
  const Potential potential = detail::with_context(
      "core-state", "potential", [&] { return cfg.potential.make(grid); });
  const Wavefunction psi0 = detail::with_context(
      "core-state", "prepare_coherent_state",
      [&] { return prepare_coherent_state(*cfg.state, grid, cfg.physical); });
  const EvolutionRecord record =
      detail::with_context("evolution", "propagate", [&] {
        return propagate(psi0, potential, *cfg.propagation, cfg.physical);
      });

  for (std::size_t d = 0; d < spec.detectors.size(); ++d) {
    const double x = spec.detectors[d];
    const std::string label = detail::detector_label(d);

    const auto rho = detail::with_context("tof-protocol", "density_in_time",
                                          [&] { return density_in_time(record, x); });
    auto rho_csv = emit.open("density_" + label + ".csv", {"t", "value", "stderr"});
    for (std::size_t k = 0; k < rho.values.size(); ++k)
      rho_csv.row({rho.times[k], rho.values[k], 0.0});

    const auto flux = detail::with_context("tof-protocol", "flux_in_time", [&] {
      return flux_in_time(record, x, cfg.physical);
    });
    auto flux_csv = emit.open("flux_" + label + ".csv", {"t", "value", "stderr"});
    for (std::size_t k = 0; k < flux.values.size(); ++k)
      flux_csv.row({flux.times[k], flux.values[k], 0.0});

    const auto channels =
        detail::with_context("tof-protocol", "infer_im_weak_momentum_fd", [&] {
          return build_weak_channel_series(record, x, spec.fd_step, cfg.physical);
        });
    auto weak_csv = emit.open(
        "weak_" + label + ".csv",
        {"t", "re_direct", "im_direct", "re_flux_ratio", "im_fd", "valid"});
    for (std::size_t k = 0; k < channels.times.size(); ++k)
      weak_csv.row({channels.times[k], channels.re_direct[k],
                    channels.im_direct[k], channels.re_ratio[k],
                    channels.im_fd[k], static_cast<double>(channels.valid[k])});
  }

  if (spec.clicks.n_events > 0) {
    const std::size_t i = grid.index_near(spec.detectors.front());
    const std::size_t m = detail::fd_half_steps(grid, spec.fd_step);
    const auto dist_l = density_in_time(record, grid.x(i - m));
    const auto dist_r = density_in_time(record, grid.x(i + m));
    const auto left = detail::with_context("tof-protocol", "sample_clicks", [&] {
      return sample_clicks(dist_l, spec.clicks.n_events, cfg.seed);
    });
    const auto right = detail::with_context("tof-protocol", "sample_clicks", [&] {
      return sample_clicks(dist_r, spec.clicks.n_events, cfg.seed + 1);
    });
    auto events_csv = emit.open("click_events.csv", {"t_left", "t_right"});
    for (std::size_t e = 0; e < left.event_times.size(); ++e)
      events_csv.row({left.event_times[e], right.event_times[e]});

    const auto est = detail::with_context("tof-protocol", "estimate_im_from_clicks", [&] {
      return estimate_im_from_clicks(left, right,
                                     dist_r.detector_x - dist_l.detector_x,
                                     spec.clicks.bins, cfg.physical);
    });
    auto est_csv = emit.open("im_click_estimate.csv",
                             {"t", "value", "stderr", "count_left", "count_right"});
    for (std::size_t b = 0; b < est.bin_centers.size(); ++b)
      est_csv.row({est.bin_centers[b], est.estimate[b], est.std_error[b],
                   static_cast<double>(est.counts_left[b]),
                   static_cast<double>(est.counts_right[b])});
  }

  manifest.checks.push_back(
      check_distribution_normalization(record, spec.detectors));
  manifest.checks.push_back(check_nx_constancy(record, spec.detectors));
  manifest.checks.push_back(
      check_nf_constancy(record, spec.detectors, cfg.physical));
  manifest.checks.push_back(
      check_flux_density_ratio(record, spec.detectors.front(), cfg.physical));
  manifest.checks.push_back(
      check_protocol_equivalence(record, spec.detectors, cfg.physical));
  manifest.checks.push_back(check_mean_time_relation(
      record, spec.detectors.front(), spec.fd_step, cfg.physical));

  const double t = detail::with_context("tof-protocol", "transmission", [&] {
    FluxProtocolConfig fpc;
    fpc.source_x = spec.source_x;
    fpc.shutter_time = spec.shutter_time;
    fpc.detector_xs = spec.detectors;
    return transmission(record, potential, spec.source_x, spec.detectors.back(),
                        fpc, cfg.physical);
  });
  manifest.checks.push_back(
      CheckResult{"transmission_range", t >= 0.0 && t <= 1.0 + 1e-6,
                  "T = " + std::to_string(t)});
}

inline void run_bohmian_scenario(const ExperimentConfig& cfg,
                                 const detail::Emitter& emit,
                                 RunManifest& manifest) {
  const auto& spec = *cfg.bohmian;
  const Grid1D grid = cfg.grid->make();
  const Potential potential = detail::with_context(
      "core-state", "potential", [&] { return cfg.potential.make(grid); });
  const Wavefunction psi0 = detail::with_context(
      "core-state", "prepare_coherent_state",
      [&] { return prepare_coherent_state(*cfg.state, grid, cfg.physical); });
  const EvolutionRecord record =
      detail::with_context("evolution", "propagate", [&] {
        return propagate(psi0, potential, *cfg.propagation, cfg.physical);
      });

  TrajectoryIntegrator integrator(record, potential, cfg.physical);
  for (std::size_t j = 0; j < spec.starts.size(); ++j) {
    const auto traj = detail::with_context("bohmian", "integrate_trajectory", [&] {
      return integrator.integrate(spec.starts[j]);
    });
    auto csv = emit.open("trajectory_" + std::to_string(j) + ".csv",
                         {"t", "x", "p_B", "T_B", "I_O", "V", "Q"});
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      csv.row({traj.times[k], traj.xs[k], traj.ps[k], traj.kinetic[k],
               traj.internal[k], traj.potential[k], traj.quantum[k]});
  }

  const auto energy = detail::with_context("bohmian", "energy_partition", [&] {
    return energy_partition(record, potential, cfg.physical);
  });
  auto energy_csv =
      emit.open("energy_partition.csv", {"t", "T_B", "I_O", "V", "total"});
  for (std::size_t k = 0; k < energy.times.size(); ++k)
    energy_csv.row({energy.times[k], energy.kinetic[k], energy.internal[k],
                    energy.potential[k], energy.total[k]});

  if (spec.ensemble > 0) {
    auto x0s = sample_positions(record.snapshots.front(), spec.ensemble, cfg.seed);
    auto finals = detail::with_context("bohmian", "integrate_trajectory", [&] {
      TrajectoryIntegrator fast(record, potential, cfg.physical,
                                /*with_energies=*/false);
      return fast.final_positions(x0s);
    });
    std::sort(finals.begin(), finals.end());
    const std::size_t bins = 64;
    const double lo = finals.front(), hi = finals.back() + 1e-9;
    const double w = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double x : finals)
      ++counts[std::min(bins - 1, static_cast<std::size_t>((x - lo) / w))];
    auto hist_csv = emit.open("ensemble_histogram.csv",
                              {"x", "count", "model_density"});
    const auto& last = record.snapshots.back();
    for (std::size_t b = 0; b < bins; ++b) {
      const double xc = lo + (static_cast<double>(b) + 0.5) * w;
      hist_csv.row({xc, static_cast<double>(counts[b]),
                    std::norm(last.amplitudes[grid.index_near(xc)])});
    }
    manifest.checks.push_back(check_equivariance(record, potential,
                                                 spec.ensemble, cfg.seed,
                                                 cfg.physical));
  }

  manifest.checks.push_back(
      check_bohmian_field_equivalence(record, cfg.physical));
  manifest.checks.push_back(
      check_energy_conservation(record, potential, cfg.physical));
  manifest.checks.push_back(check_continuity(record, cfg.physical));
  manifest.checks.push_back(check_qhj(record, potential, cfg.physical));
}

inline void run_spin_scenario(const ExperimentConfig& cfg,
                              const detail::Emitter& emit,
                              RunManifest& manifest) {
  const auto& spec = *cfg.spin;
  const auto alphas = spec.alpha.values();
  const auto phis = spec.post_angle.values();

  auto csv = emit.open(
      "spin_sweep.csv",
      {"alpha", "phi", "I_x_plus", "I_x_minus", "I_y_plus", "I_y_minus",
       "I_z_plus", "I_z_minus", "re_exact", "im_exact", "re_intensities",
       "im_intensities", "re_shot", "im_shot", "re_shot_sigma", "im_shot_sigma"});

  std::uint64_t point_index = 0;
  for (double alpha : alphas) {
    for (double phi : phis) {
      InterferometerConfig icfg;
      icfg.alpha = alpha;
      icfg.path_pre = spec.path_pre;
      icfg.path_post << std::cos(phi), std::sin(phi);

      const auto table = detail::with_context(
          "spin-interferometry", "intensity_table",
          [&] { return intensity_table(icfg); });
      const auto direct = detail::with_context(
          "spin-interferometry", "weak_spin_direct",
          [&] { return weak_spin_direct(icfg); });
      const auto from_i = detail::with_context(
          "spin-interferometry", "weak_spin_from_intensities",
          [&] { return weak_spin_from_intensities(table, alpha); });

      double re_shot = 0.0, im_shot = 0.0, re_sigma = 0.0, im_sigma = 0.0;
      if (spec.shots > 0) {
        const auto counts = detail::with_context(
            "spin-interferometry", "sample_intensities", [&] {
              return sample_intensities(table, spec.shots,
                                        cfg.seed + point_index);
            });
        const auto noisy = detail::with_context(
            "spin-interferometry", "weak_spin_from_counts",
            [&] { return weak_spin_from_counts(counts, alpha); });
        re_shot = noisy.re;
        im_shot = noisy.im;
        re_sigma = noisy.re_sigma;
        im_sigma = noisy.im_sigma;
      }
      csv.row({alpha, phi, table.x_plus, table.x_minus, table.y_plus,
               table.y_minus, table.z_plus, table.z_minus, direct.re_channel,
               direct.im_channel, from_i.re_channel, from_i.im_channel,
               re_shot, im_shot, re_sigma, im_sigma});
      ++point_index;
    }
  }

  manifest.checks.push_back(detail::with_context(
      "spin-interferometry", "weak_spin_from_intensities",
      [&] { return check_spin_three_route(alphas, phis, spec.path_pre); }));
  manifest.checks.push_back(
      check_spin_completeness(alphas, phis, spec.path_pre));
}

// Executes a scenario into output_dir, returning the manifest (also written
// to manifest.json there). Throws ConfigError / ScenarioError.
inline RunManifest run_scenario(const ExperimentConfig& cfg,
                                const std::string& output_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(output_dir);

  RunManifest manifest;
  manifest.config_hash = cfg.hash();
  manifest.scenario = to_string(cfg.scenario);
  manifest.seed = cfg.seed;
  detail::Emitter emit{output_dir, manifest.config_hash, &manifest.files};

  switch (cfg.scenario) {
    case Scenario::finite_dim: run_finite_dim_scenario(cfg, emit, manifest); break;
    case Scenario::tof: run_tof_scenario(cfg, emit, manifest); break;
    case Scenario::bohmian: run_bohmian_scenario(cfg, emit, manifest); break;
    case Scenario::spin: run_spin_scenario(cfg, emit, manifest); break;
  }

  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.files.push_back("manifest.json");
  manifest.write((std::filesystem::path(output_dir) / "manifest.json").string());
  return manifest;
}

}  // namespace wvsim
