#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "wvsim/bohmian_dynamics.hpp"
#include "wvsim/momentum_weak.hpp"
#include "wvsim/trajectory.hpp"

using namespace wvsim;
using Catch::Approx;

namespace {

const PhysicalParams kUnits{};
const CoherentStateSpec kFreePacket{1.0, -5.0, 2.0};

// Shared free-flight record on a fine mesh: the dynamics identities are
// checked against 4th-order time stencils on it.
const EvolutionRecord& free_record() {
  static const EvolutionRecord record = [] {
    Grid1D g(-25.0, 35.0, 1024);
    auto psi = prepare_coherent_state(kFreePacket, g, kUnits);
    PropagatorConfig cfg{5e-4, 3.0};
    cfg.record_stride = 4;
    return propagate(psi, Potential::free_space(g), cfg, kUnits);
  }();
  return record;
}

}  // namespace

TEST_CASE("polar decomposition: linear phase, constant phase, reassembly") {
  Grid1D g(-20.0, 20.0, 1024);
  auto psi = prepare_coherent_state({1.0, -2.0, 3.0}, g, kUnits);
  auto field = polar_decompose(psi, kUnits);

  // S(x) = p_y (x - y) + const on the valid span.
  const std::size_t a = g.index_near(-4.0), b = g.index_near(1.0);
  const double slope = (field.s[b] - field.s[a]) / (g.x(b) - g.x(a));
  CHECK(slope == Approx(3.0).epsilon(1e-10));

  auto flat = polar_decompose(prepare_coherent_state({1.0, -2.0, 0.0}, g, kUnits),
                              kUnits);
  for (std::size_t i = flat.first_valid(); i <= flat.last_valid(); ++i)
    CHECK(flat.s[i] == Approx(0.0).margin(1e-12));

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!field.valid[i]) continue;
    const Complex rebuilt = std::sqrt(field.r[i]) *
                            std::polar(1.0, field.s[i] / kUnits.hbar);
    CHECK(std::abs(rebuilt - psi.amplitudes[i]) < 1e-12);
  }
}

TEST_CASE("momentum fields of a coherent state") {
  Grid1D g(-20.0, 20.0, 1024);
  const CoherentStateSpec spec{1.0, -2.0, 3.0};
  auto psi = prepare_coherent_state(spec, g, kUnits);
  auto field = polar_decompose(psi, kUnits);
  auto p_b = bohmian_momentum_field(field, kUnits);
  auto p_o = osmotic_momentum_field(field, kUnits);

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!field.valid[i] || field.r[i] < 1e-10) continue;
    CHECK(p_b[i] == Approx(spec.momentum).margin(1e-10));
    CHECK(p_o[i] ==
          Approx(kUnits.hbar * spec.gamma * (g.x(i) - spec.center)).margin(1e-9));
  }

  // p_O vanishes at the density maximum and is odd about it.
  auto centered = polar_decompose(
      prepare_coherent_state({1.0, 0.0, 0.0}, g, kUnits), kUnits);
  auto p_o_sym = osmotic_momentum_field(centered, kUnits);
  const std::size_t mid = g.index_near(0.0);
  CHECK(std::abs(p_o_sym[mid]) < 1e-10);
  for (std::size_t d = 10; d <= 60; d += 10)
    CHECK(p_o_sym[mid + d] == Approx(-p_o_sym[mid - d]).margin(1e-9));

  // Real state: p_B identically zero.
  auto p_b_real = bohmian_momentum_field(centered, kUnits);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (centered.valid[i] && centered.r[i] > 1e-10)
      CHECK(std::abs(p_b_real[i]) < 1e-10);
}

TEST_CASE("derivative of the unwrapped phase reproduces p_B") {
  // Independent route: finite differences of S itself, away from the span
  // edges. Coarser tolerance, genuine cross-check of the unwrap.
  Grid1D g(-30.0, 30.0, 1024);
  auto psi = prepare_coherent_state({0.7, -6.0, 2.5}, g, kUnits);
  auto barrier = Potential::gaussian_barrier(g, 4.0, 1.0, 0.0);
  PropagatorConfig cfg{1e-3, 2.0};
  cfg.record_stride = 2000;
  auto rec = propagate(psi, barrier, cfg, kUnits);
  auto field = polar_decompose(rec.snapshots.back(), kUnits);
  auto p_b = bohmian_momentum_field(field, kUnits);

  const double dx = g.dx();
  for (std::size_t i = g.index_near(-8.0); i <= g.index_near(4.0); ++i) {
    if (!(field.valid[i - 2] && field.valid[i - 1] && field.valid[i] &&
          field.valid[i + 1] && field.valid[i + 2]))
      continue;
    if (field.r[i] < 1e-6) continue;
    const double fd = (-field.s[i + 2] + 8.0 * field.s[i + 1] -
                       8.0 * field.s[i - 1] + field.s[i - 2]) /
                      (12.0 * dx);
    CHECK(fd == Approx(p_b[i]).margin(1e-4 * std::max(1.0, std::abs(p_b[i]))));
  }
}

TEST_CASE("fields equal the weak-value channels off-mask") {
  // Mid-scattering state with interference structure.
  Grid1D g(-30.0, 30.0, 1024);
  auto psi = prepare_coherent_state({1.0, -6.0, 2.0}, g, kUnits);
  auto barrier = Potential::gaussian_barrier(g, 2.0, 0.5, 0.0);
  PropagatorConfig cfg{1e-3, 2.5};
  cfg.record_stride = 2500;
  auto rec = propagate(psi, barrier, cfg, kUnits);
  const auto& state = rec.snapshots.back();

  auto field = polar_decompose(state, kUnits);
  auto p_b = bohmian_momentum_field(field, kUnits);
  auto p_o = osmotic_momentum_field(field, kUnits);
  auto weak = momentum_weak_fields(state, kUnits);

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!field.valid[i] || !weak.valid[i]) continue;
    CHECK(std::abs(p_b[i] - weak.re[i]) < 1e-8);
    CHECK(std::abs(p_o[i] - weak.im[i]) < 1e-8);
  }
}

TEST_CASE("quantum potential of a coherent state matches the closed form") {
  Grid1D g(-20.0, 20.0, 1024);
  const CoherentStateSpec spec{1.0, 1.0, 0.0};
  auto psi = prepare_coherent_state(spec, g, kUnits);
  auto field = polar_decompose(psi, kUnits);
  auto qf = quantum_potential(field, Potential::free_space(g), kUnits);

  // Q = (Gamma hbar^2 / 2M)(1 - Gamma (x-y)^2) for the Gaussian.
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!qf.valid[i] || field.r[i] < 1e-8) continue;
    const double d = g.x(i) - spec.center;
    const double expect = 0.5 * spec.gamma * (1.0 - spec.gamma * d * d);
    CHECK(qf.q[i] == Approx(expect).margin(1e-8));
    CHECK(qf.v_eff[i] == Approx(qf.q[i]).margin(1e-12));  // V = 0
  }
}

TEST_CASE("<Q> equals <I_O> (two independent quadratures)") {
  Grid1D g(-25.0, 25.0, 1024);
  auto psi = prepare_coherent_state({0.8, -3.0, 1.5}, g, kUnits);
  auto field = polar_decompose(psi, kUnits);
  auto qf = quantum_potential(field, Potential::free_space(g), kUnits);
  auto p_o = osmotic_momentum_field(field, kUnits);

  double q_mean = 0.0, i_o_mean = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!field.valid[i] || !qf.valid[i]) continue;
    q_mean += field.r[i] * qf.q[i];
    i_o_mean += field.r[i] * p_o[i] * p_o[i] / (2.0 * kUnits.mass);
  }
  q_mean *= g.dx();
  i_o_mean *= g.dx();
  CHECK(q_mean == Approx(i_o_mean).margin(1e-8));
}

TEST_CASE("trajectories: center rides the mean, stationary case stays put") {
  const auto& rec = free_record();
  auto v0 = Potential::free_space(rec.snapshots.front().grid);
  TrajectoryIntegrator integrator(rec, v0, kUnits);

  auto center = integrator.integrate(kFreePacket.center);
  const double t_end = rec.t_final();
  CHECK(center.xs.back() ==
        Approx(kFreePacket.center + kFreePacket.momentum * t_end / kUnits.mass)
            .margin(1e-6));
  // p_B along the center equals the boost momentum.
  for (std::size_t k = 0; k < center.ps.size(); k += 100)
    CHECK(center.ps[k] == Approx(kFreePacket.momentum).margin(1e-6));

  // p = 0 packet: the central trajectory is a fixed point.
  Grid1D g(-20.0, 20.0, 512);
  auto psi = prepare_coherent_state({1.0, 0.0, 0.0}, g, kUnits);
  PropagatorConfig cfg{1e-3, 1.0};
  cfg.record_stride = 10;
  auto rec0 = propagate(psi, Potential::free_space(g), cfg, kUnits);
  auto still = integrate_trajectory(rec0, Potential::free_space(g), 0.0, kUnits);
  CHECK(std::abs(still.xs.back()) < 1e-10);
}

TEST_CASE("trajectories follow the equivariant stretch of the free Gaussian") {
  const auto& rec = free_record();
  auto v0 = Potential::free_space(rec.snapshots.front().grid);
  TrajectoryIntegrator integrator(rec, v0, kUnits);
  for (double x0 : {-6.5, -5.8, -4.2, -3.6}) {
    auto traj = integrator.integrate(x0);
    const double expect = oracle::free_gaussian_bohmian_x(
        x0, rec.t_final(), kFreePacket.gamma, kFreePacket.center,
        kFreePacket.momentum, kUnits);
    CHECK(traj.xs.back() == Approx(expect).margin(1e-4));
  }
}

TEST_CASE("trajectories never cross") {
  const auto& rec = free_record();
  auto v0 = Potential::free_space(rec.snapshots.front().grid);
  TrajectoryIntegrator integrator(rec, v0, kUnits, /*with_energies=*/false);
  std::vector<double> x0s;
  for (int j = 0; j <= 50; ++j) x0s.push_back(-7.5 + 0.1 * j);
  auto finals = integrator.final_positions(x0s);
  for (std::size_t j = 1; j < finals.size(); ++j)
    CHECK(finals[j] > finals[j - 1]);
}

TEST_CASE("a trajectory started inside the mask is rejected") {
  const auto& rec = free_record();
  auto v0 = Potential::free_space(rec.snapshots.front().grid);
  TrajectoryIntegrator integrator(rec, v0, kUnits, /*with_energies=*/false);
  CHECK_THROWS_AS(integrator.integrate(-11.5), NodeApproach);
}

TEST_CASE("ensemble equivariance: |psi|^2 at t = 0 maps to |psi|^2 at t") {
  const auto& rec = free_record();
  auto v0 = Potential::free_space(rec.snapshots.front().grid);
  TrajectoryIntegrator integrator(rec, v0, kUnits, /*with_energies=*/false);

  const std::size_t n = 2000;
  auto x0s = sample_positions(rec.snapshots.front(), n, 777);
  auto finals = integrator.final_positions(x0s);
  const auto& last = rec.snapshots.back();
  const double d = oracle::ks_statistic(
      finals, [&](double x) { return density_cdf(last, x); });
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("fixed-point momentum rate balances the effective force") {
  const auto& rec = free_record();
  auto v0 = Potential::free_space(rec.snapshots.front().grid);
  auto series = fixed_point_momentum_rate(rec, v0, -3.0, kUnits);
  REQUIRE(series.scale() > 0.0);
  CHECK(series.max_residual() < 1e-4 * series.scale());
}

TEST_CASE("material derivative regains the Bohmian force law") {
  const auto& rec = free_record();
  auto v0 = Potential::free_space(rec.snapshots.front().grid);
  auto series = material_momentum_rate(rec, v0, -3.0, kUnits);
  REQUIRE(series.scale() > 0.0);
  CHECK(series.max_residual() < 1e-4 * series.scale());
}

TEST_CASE("stationary harmonic ground state: both momentum rates vanish") {
  Grid1D g(-16.0, 16.0, 512);
  auto psi = prepare_coherent_state({1.0, 0.0, 0.0}, g, kUnits);  // ground state
  auto harmonic = Potential::from_function(
      g, [](double x) { return 0.5 * x * x; }, [](double x) { return x; });
  PropagatorConfig cfg{5e-4, 0.5};
  cfg.record_stride = 4;
  auto rec = propagate(psi, harmonic, cfg, kUnits);
  auto series = fixed_point_momentum_rate(rec, harmonic, 0.5, kUnits);
  double worst = 0.0;
  for (std::size_t k = 0; k < series.lhs.size(); ++k)
    if (series.valid[k])
      worst = std::max({worst, std::abs(series.lhs[k]), std::abs(series.rhs[k])});
  CHECK(worst < 1e-5);
}

TEST_CASE("Ehrenfest balance: free, linear, and barrier potentials") {
  Grid1D g(-30.0, 30.0, 1024);
  auto psi = prepare_coherent_state({1.0, -6.0, 2.0}, g, kUnits);

  PropagatorConfig cfg{5e-4, 1.5};
  cfg.record_stride = 4;

  // V = 0: <p> constant.
  auto rec_free = propagate(psi, Potential::free_space(g), cfg, kUnits);
  auto free_series = ehrenfest_check(rec_free, Potential::free_space(g), kUnits);
  for (std::size_t k = 0; k < free_series.dpdt.size(); ++k)
    if (free_series.valid[k]) CHECK(std::abs(free_series.dpdt[k]) < 1e-10);

  // Linear potential: d<p>/dt = -g exactly.
  const double gforce = 0.7;
  auto linear = Potential::from_function(
      g, [gforce](double x) { return gforce * x; },
      [gforce](double) { return gforce; });
  auto rec_lin = propagate(psi, linear, cfg, kUnits);
  auto lin_series = ehrenfest_check(rec_lin, linear, kUnits);
  for (std::size_t k = 0; k < lin_series.dpdt.size(); ++k)
    if (lin_series.valid[k])
      CHECK(lin_series.dpdt[k] == Approx(-gforce).margin(1e-8));

  // Gaussian barrier: residual well under 1e-6 of the force scale.
  auto barrier = Potential::gaussian_barrier(g, 2.0, 1.0, 0.0);
  PropagatorConfig cfg_b{2e-4, 2.0};
  cfg_b.record_stride = 10;
  auto rec_bar = propagate(psi, barrier, cfg_b, kUnits);
  auto bar_series = ehrenfest_check(rec_bar, barrier, kUnits);
  REQUIRE(bar_series.scale() > 0.0);
  CHECK(bar_series.max_residual() < 1e-6 * bar_series.scale());
}

TEST_CASE("energy partition: Gaussian split and conservation") {
  const auto& rec = free_record();
  auto v0 = Potential::free_space(rec.snapshots.front().grid);
  auto series = energy_partition(rec, v0, kUnits);

  // t = 0: <T_B> = p^2/2M, <I_O> = hbar^2 Gamma / 4M (Gaussian integrals).
  CHECK(series.kinetic.front() ==
        Approx(kFreePacket.momentum * kFreePacket.momentum / 2.0).epsilon(1e-9));
  CHECK(series.internal.front() ==
        Approx(kFreePacket.gamma / 4.0).epsilon(1e-9));
  CHECK(series.potential.front() == Approx(0.0).margin(1e-15));

  CHECK(series.max_total_drift() < 1e-7 * std::abs(series.total.front()));
}

TEST_CASE("p = 0 packet starts with all energy osmotic") {
  Grid1D g(-20.0, 20.0, 512);
  auto psi = prepare_coherent_state({1.0, 0.0, 0.0}, g, kUnits);
  PropagatorConfig cfg{1e-3, 0.2};
  cfg.record_stride = 10;
  auto rec = propagate(psi, Potential::free_space(g), cfg, kUnits);
  auto series = energy_partition(rec, Potential::free_space(g), kUnits);
  CHECK(series.kinetic.front() == Approx(0.0).margin(1e-12));
  CHECK(series.internal.front() == Approx(0.25).epsilon(1e-9));
}

TEST_CASE("continuity equation holds on the grid interior") {
  const auto& rec = free_record();
  auto res = continuity_residual(rec, kUnits);
  REQUIRE(res.points_checked > 1000);
  CHECK(res.max_residual < 1e-6 * std::max(1.0, res.scale));
}

TEST_CASE("quantum Hamilton-Jacobi equation holds off-mask") {
  const auto& rec = free_record();
  auto v0 = Potential::free_space(rec.snapshots.front().grid);
  auto res = qhj_residual(rec, v0, kUnits);
  REQUIRE(res.points_checked > 1000);
  CHECK(res.max_residual < 1e-5 * std::max(1.0, res.scale));
}
