#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "wvsim/evolution.hpp"

using namespace wvsim;
using Catch::Approx;

namespace {

const PhysicalParams kUnits{};

double state_distance(const Wavefunction& a, const Wavefunction& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
    s += std::norm(a.amplitudes[i] - b.amplitudes[i]);
  return std::sqrt(s * a.grid.dx());
}

}  // namespace

TEST_CASE("free packet follows the analytic Gaussian") {
  Grid1D g(-30.0, 50.0, 2048);
  const CoherentStateSpec spec{1.0, -5.0, 3.0};
  auto psi = prepare_coherent_state(spec, g, kUnits);
  auto v0 = Potential::free_space(g);

  Wavefunction state = psi;
  const double dt = 1e-3;
  for (int s = 0; s < 3000; ++s) state = step(state, v0, kUnits, dt);
  const double t = state.time;

  CHECK(expectation_position(state) ==
        Approx(spec.center + spec.momentum * t / kUnits.mass).margin(1e-8));

  // Pointwise against the closed-form evolution (the global phase convention
  // matches the true propagator, so no phase alignment is needed).
  double max_err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Complex exact = oracle::free_gaussian(g.x(i), t, spec.gamma,
                                                spec.center, spec.momentum, kUnits);
    max_err = std::max(max_err, std::abs(state.amplitudes[i] - exact));
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("V = 0: composed Strang steps equal one exact kinetic propagation") {
  Grid1D g(-30.0, 30.0, 1024);
  auto psi = prepare_coherent_state({1.0, -3.0, 2.0}, g, kUnits);
  auto v0 = Potential::free_space(g);

  Wavefunction stepped = psi;
  const double dt = 1e-2;
  const int n_steps = 200;
  for (int s = 0; s < n_steps; ++s) stepped = step(stepped, v0, kUnits, dt);

  // Exact: single multiplication by exp(-i hbar k^2 t / 2M) in k-space.
  const double t = n_steps * dt;
  CVector hat = fft_forward(psi.amplitudes);
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double k = g.k(i);
    hat[i] *= std::polar(1.0, -kUnits.hbar * k * k * t / (2.0 * kUnits.mass));
  }
  Wavefunction exact(g, fft_inverse(hat), t);
  CHECK(state_distance(stepped, exact) < 1e-12);
}

TEST_CASE("step is unitary to 1e-13 per step") {
  Grid1D g(-20.0, 20.0, 1024);
  auto psi = prepare_coherent_state({1.0, 0.0, 2.0}, g, kUnits);
  auto barrier = Potential::gaussian_barrier(g, 4.0, 1.0, 5.0);
  auto s1 = step(psi, barrier, kUnits, 1e-3);
  CHECK(std::abs(s1.norm2() - psi.norm2()) < 1e-13);
}

TEST_CASE("harmonic potential: coherent state recurs after one period") {
  Grid1D g(-20.0, 20.0, 1024);
  // Gamma = M omega / hbar = 1 makes this a displaced ground state.
  auto psi = prepare_coherent_state({1.0, 3.0, 0.0}, g, kUnits);
  auto harmonic = Potential::from_function(
      g, [](double x) { return 0.5 * x * x; }, [](double x) { return x; });

  Wavefunction state = psi;
  const double dt = 1e-3;
  const auto n_steps = static_cast<int>(std::llround(2.0 * M_PI / dt));
  for (int s = 0; s < n_steps; ++s) state = step(state, harmonic, kUnits, dt);
  // Close the leftover fraction of a period from rounding n_steps.
  const double leftover = 2.0 * M_PI - n_steps * dt;
  state = step(state, harmonic, kUnits, leftover);

  CHECK(std::abs(inner_product(psi, state)) == Approx(1.0).margin(1e-6));
}

TEST_CASE("propagate: t_max = 0 returns the input snapshot") {
  Grid1D g(-20.0, 20.0, 256);
  auto psi = prepare_coherent_state({1.0, 0.0, 0.0}, g, kUnits);
  auto rec = propagate(psi, Potential::free_space(g), {1e-3, 0.0}, kUnits);
  REQUIRE(rec.size() == 1);
  CHECK(rec.times[0] == 0.0);
  CHECK(state_distance(rec.snapshots[0], psi) == 0.0);
}

TEST_CASE("propagate: free run keeps norm to 1e-10 and records the mesh") {
  Grid1D g(-30.0, 50.0, 1024);
  auto psi = prepare_coherent_state({1.0, -5.0, 3.0}, g, kUnits);
  PropagatorConfig cfg{1e-3, 3.0};
  cfg.record_stride = 10;
  auto rec = propagate(psi, Potential::free_space(g), cfg, kUnits);
  CHECK(rec.norm_drift < 1e-10);
  CHECK(rec.dt_mesh() == Approx(1e-2));
  CHECK(rec.t_final() == Approx(3.0).margin(1e-9));
  REQUIRE(rec.size() == 301);
}

TEST_CASE("propagate flags a boundary leak before statistics go bad") {
  Grid1D g(-12.0, 12.0, 512);
  auto psi = prepare_coherent_state({1.0, -5.0, 4.0}, g, kUnits);
  PropagatorConfig cfg{1e-3, 10.0};
  CHECK_THROWS_AS(propagate(psi, Potential::free_space(g), cfg, kUnits),
                  BoundaryLeak);
}

TEST_CASE("second-order convergence against a dt/8 reference") {
  Grid1D g(-20.0, 20.0, 512);
  auto psi = prepare_coherent_state({1.0, -6.0, 2.5}, g, kUnits);
  auto barrier = Potential::gaussian_barrier(g, 4.0, 1.0, 0.0);
  const double t_end = 1.0;

  auto run = [&](double dt) {
    Wavefunction s = psi;
    const auto n = static_cast<int>(std::llround(t_end / dt));
    for (int k = 0; k < n; ++k) s = step(s, barrier, kUnits, dt);
    return s;
  };

  const double dt0 = 4e-3;
  auto ref = run(dt0 / 8.0);
  const double e1 = state_distance(run(dt0), ref);
  const double e2 = state_distance(run(dt0 / 2.0), ref);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.0);
}

TEST_CASE("high barrier transmits less than 1e-3, stable under dt refinement") {
  Grid1D g(-40.0, 40.0, 1024);
  const CoherentStateSpec spec{1.0, -10.0, 2.0};
  auto psi = prepare_coherent_state(spec, g, kUnits);
  auto barrier = Potential::gaussian_barrier(g, 40.0, 1.0, 0.0);

  auto transmitted_mass = [&](double dt) {
    Wavefunction s = psi;
    const auto n = static_cast<int>(std::llround(8.0 / dt));
    for (int k = 0; k < n; ++k) s = step(s, barrier, kUnits, dt);
    double m = 0.0;
    for (std::size_t i = g.index_near(5.0); i < g.size(); ++i)
      m += std::norm(s.amplitudes[i]);
    return m * g.dx();
  };

  const double coarse = transmitted_mass(2e-3);
  const double fine = transmitted_mass(5e-4);  // dt/4 reference
  CHECK(coarse < 1e-3);
  CHECK(coarse == Approx(fine).margin(1e-6));
}

TEST_CASE("energy conservation across test potentials") {
  Grid1D g(-20.0, 20.0, 512);
  auto psi = prepare_coherent_state({1.0, -6.0, 2.0}, g, kUnits);
  auto barrier = Potential::gaussian_barrier(g, 3.0, 1.0, 0.0);
  auto harmonic = Potential::from_function(
      g, [](double x) { return 0.5 * x * x; }, [](double x) { return x; });

  for (const auto* pot : {&barrier, &harmonic}) {
    PropagatorConfig cfg{1e-4, 1.0};
    cfg.record_stride = 100;
    auto rec = propagate(psi, *pot, cfg, kUnits);
    const double e0 = total_energy(psi, *pot, kUnits);
    CHECK(rec.energy_drift / std::abs(e0) < 1e-8);
    CHECK(rec.norm_drift < 1e-10);
  }
}
