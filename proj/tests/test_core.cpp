#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "wvsim/evolution.hpp"
#include "wvsim/potential.hpp"
#include "wvsim/wavefunction.hpp"

using namespace wvsim;
using Catch::Approx;

namespace {
const PhysicalParams kUnits{};  // hbar = M = 1
}

TEST_CASE("grid validates shape and resolves positions") {
  CHECK_THROWS_AS(Grid1D(0.0, -1.0, 64), ConfigError);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 100), ConfigError);  // not a power of two
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 8), ConfigError);    // too small

  Grid1D g(-20.0, 20.0, 1024);
  CHECK(g.dx() == Approx(40.0 / 1024.0));
  CHECK(g.x(0) == Approx(-20.0));
  CHECK(g.index_near(0.0) == 512);
  CHECK(g.index_near(g.x(123) + 0.4 * g.dx()) == 123);
  CHECK_THROWS_AS(g.index_near(30.0), ConfigError);
}

TEST_CASE("coherent state: peak amplitude and modulus") {
  Grid1D g(-20.0, 20.0, 1024);

  // Gamma=1, y=0, p=0: peak at x=0 equals (1/pi)^{1/4}.
  auto psi = prepare_coherent_state({1.0, 0.0, 0.0}, g, kUnits);
  const auto i0 = g.index_near(0.0);
  CHECK(std::abs(psi.amplitudes[i0]) == Approx(std::pow(M_PI, -0.25)).epsilon(1e-12));

  // Boosting changes only the phase, not the modulus.
  auto boosted = prepare_coherent_state({1.0, 0.0, 5.0}, g, kUnits);
  for (std::size_t i = 0; i < g.size(); i += 17)
    CHECK(std::abs(boosted.amplitudes[i]) ==
          Approx(std::abs(psi.amplitudes[i])).margin(1e-15));
}

TEST_CASE("coherent state: grid norm matches trapezoid oracle") {
  Grid1D g(-20.0, 20.0, 1024);
  const CoherentStateSpec spec{2.0, -5.0, 3.0};
  auto psi = prepare_coherent_state(spec, g, kUnits);

  // Independent oracle: trapezoid quadrature over the analytic |psi|^2.
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g.x(i) - spec.center;
    rho[i] = std::sqrt(spec.gamma / M_PI) * std::exp(-spec.gamma * d * d);
  }
  const double oracle_norm = oracle::trapezoid(rho, g.dx());
  CHECK(oracle_norm == Approx(1.0).margin(1e-10));
  CHECK(psi.norm2() == Approx(1.0).margin(1e-10));
  CHECK(psi.norm2() == Approx(oracle_norm).margin(1e-12));
}

TEST_CASE("coherent state: containment is enforced") {
  Grid1D g(-2.0, 2.0, 64);
  CHECK_THROWS_AS(prepare_coherent_state({0.05, 0.0, 0.0}, g, kUnits),
                  ContainmentError);  // position tails stick out
  Grid1D wide(-20.0, 20.0, 64);
  CHECK_THROWS_AS(prepare_coherent_state({1.0, 0.0, 2.0}, wide, kUnits),
                  ContainmentError);  // momentum tail beyond Nyquist
}

TEST_CASE("inner product: normalization, orthogonality, antilinearity") {
  Grid1D g(-20.0, 20.0, 1024);
  auto psi = prepare_coherent_state({1.0, 0.0, 0.0}, g, kUnits);
  CHECK(std::abs(inner_product(psi, psi) - 1.0) < 1e-10);

  // Two Gaussians 20 apart: analytic overlap modulus exp(-Gamma dy^2 / 4).
  auto left = prepare_coherent_state({1.0, -10.0, 0.0}, g, kUnits);
  auto right = prepare_coherent_state({1.0, 10.0, 0.0}, g, kUnits);
  const double analytic = std::exp(-1.0 * 20.0 * 20.0 / 4.0);
  CHECK(analytic < 1e-20);
  CHECK(std::abs(inner_product(left, right)) < 1e-20);

  Wavefunction ipsi(g, psi.amplitudes, 0.0);
  for (auto& a : ipsi.amplitudes) a *= Complex(0.0, 1.0);
  const Complex v = inner_product(ipsi, psi);
  CHECK(v.real() == Approx(0.0).margin(1e-12));
  CHECK(v.imag() == Approx(-psi.norm2()).epsilon(1e-12));

  Grid1D other(-10.0, 10.0, 1024);
  auto small = prepare_coherent_state({1.0, 0.0, 0.0}, other, kUnits);
  CHECK_THROWS_AS(inner_product(psi, small), GridMismatch);
}

TEST_CASE("inner product is conjugate symmetric on random states") {
  Grid1D g(-20.0, 20.0, 256);
  oracle::Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    CVector a(g.size()), b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      a[i] = rng.complex_unit_box();
      b[i] = rng.complex_unit_box();
    }
    Wavefunction wa(g, a), wb(g, b);
    const Complex ab = inner_product(wa, wb);
    const Complex ba = inner_product(wb, wa);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-12 * std::abs(ab));
  }
}

TEST_CASE("apply_momentum: plane wave eigenrelation") {
  Grid1D g(-20.0, 20.0, 1024);
  const double k0 = 2.0 * M_PI * 40.0 / g.length();  // exact grid mode
  // Windowed plane wave: the Gaussian envelope (sigma = 3) dies off well
  // before the grid edges, keeping the state band-limited.
  CVector amps(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    amps[i] = std::exp(-x * x / 18.0) * std::polar(1.0, k0 * x);
  }
  Wavefunction psi(g, amps);
  auto p_psi = apply_momentum(psi, kUnits);
  // Analytic ratio: (p psi)/psi = -i hbar d/dx ln psi = hbar k0 + i hbar x/9.
  for (std::size_t i = g.index_near(-3.0); i <= g.index_near(3.0); ++i) {
    const double x = g.x(i);
    const Complex expected{k0, x / 9.0};
    const Complex got = p_psi.amplitudes[i] / psi.amplitudes[i];
    CHECK(std::abs(got - expected) < 1e-8 * std::abs(expected));
  }
}

TEST_CASE("apply_momentum: coherent state ratio i hbar Gamma x") {
  Grid1D g(-20.0, 20.0, 1024);
  auto psi = prepare_coherent_state({1.0, 0.0, 0.0}, g, kUnits);
  auto p_psi = apply_momentum(psi, kUnits);
  for (double x : {-2.0, -0.5, 0.75, 1.5}) {
    const auto i = g.index_near(x);
    const Complex got = p_psi.amplitudes[i] / psi.amplitudes[i];
    const Complex expected{0.0, g.x(i)};  // i hbar Gamma x with hbar=Gamma=1
    CHECK(std::abs(got - expected) < 1e-10);
  }
}

TEST_CASE("apply_momentum: parity kills <p> for real symmetric states") {
  Grid1D g(-20.0, 20.0, 512);
  auto psi = prepare_coherent_state({0.7, 0.0, 0.0}, g, kUnits);
  CHECK(std::abs(expectation_momentum(psi, kUnits)) < 1e-12);
}

TEST_CASE("Parseval: transform preserves the quadrature norm") {
  Grid1D g(-20.0, 20.0, 512);
  oracle::Rng rng(3);
  CVector a(g.size());
  for (auto& c : a) c = rng.complex_unit_box();
  Wavefunction psi(g, a);
  const auto hat = fft_forward(psi.amplitudes);
  double spectral = 0.0;
  for (const auto& c : hat) spectral += std::norm(c);
  spectral *= g.dx() / static_cast<double>(g.size());
  CHECK(spectral == Approx(psi.norm2()).epsilon(1e-12));
}

TEST_CASE("property: random contained coherent states stay normalized") {
  Grid1D g(-30.0, 30.0, 1024);
  oracle::Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const double gamma = rng.uniform(0.2, 4.0);
    const double sigma = 1.0 / std::sqrt(2.0 * gamma);
    const double y = rng.uniform(-30.0 + 7.0 * sigma, 30.0 - 7.0 * sigma);
    const double p = rng.uniform(-8.0, 8.0);
    auto psi = prepare_coherent_state({gamma, y, p}, g, kUnits);
    CHECK(std::abs(inner_product(psi, psi).real() - 1.0) < 1e-10);
  }
}

TEST_CASE("property: momentum operator is hermitian on contained states") {
  Grid1D g(-30.0, 30.0, 512);
  oracle::Rng rng(23);
  for (int rep = 0; rep < 25; ++rep) {
    auto phi = prepare_coherent_state(
        {rng.uniform(0.5, 2.0), rng.uniform(-5.0, 5.0), rng.uniform(-3.0, 3.0)},
        g, kUnits);
    auto psi = prepare_coherent_state(
        {rng.uniform(0.5, 2.0), rng.uniform(-5.0, 5.0), rng.uniform(-3.0, 3.0)},
        g, kUnits);
    const Complex lhs = inner_product(phi, apply_momentum(psi, kUnits));
    const Complex rhs = inner_product(psi, apply_momentum(phi, kUnits));
    CHECK(std::abs(lhs - std::conj(rhs)) < 1e-10);
  }
}

TEST_CASE("potential: scattering kinds demand flat edges") {
  Grid1D g(-20.0, 20.0, 256);
  CHECK_NOTHROW(Potential::gaussian_barrier(g, 5.0, 1.0, 0.0));
  CHECK_NOTHROW(Potential::eckart(g, 5.0, 1.0));
  // A barrier wider than the grid cannot flatten out.
  CHECK_THROWS_AS(Potential::gaussian_barrier(g, 5.0, 15.0, 0.0),
                  PotentialShapeError);

  // Custom tables (e.g. harmonic) are allowed without the flatness guarantee.
  auto harmonic =
      Potential::from_function(g, [](double x) { return 0.5 * x * x; },
                               [](double x) { return x; });
  CHECK_FALSE(harmonic.asymptotically_flat());
  CHECK_THROWS_AS(harmonic.require_asymptotically_flat(), PotentialShapeError);
}

TEST_CASE("potential: table gradient matches analytic gradient") {
  Grid1D g(-20.0, 20.0, 1024);
  auto analytic = Potential::gaussian_barrier(g, 3.0, 1.5, 0.0);
  auto table = Potential::from_samples(g, analytic.values());
  for (std::size_t i = 10; i < g.size() - 10; i += 31)
    CHECK(table.gradient_at(i) == Approx(analytic.gradient_at(i)).margin(1e-6));
}
