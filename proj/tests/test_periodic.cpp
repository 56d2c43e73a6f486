#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "perstab/errors.hpp"
#include "perstab/models.hpp"
#include "perstab/periodic.hpp"

using namespace perstab;

namespace {

Generator scalar(double lambda) { return make_reference({ModelKind::Diagonal, {}, {Complex(lambda)}}); }

CVector one(Complex v) { return CVector::Constant(1, v); }

}  // namespace

TEST_SUITE("periodic") {

TEST_CASE("scalar mode solves") {
  const Generator g = scalar(-1.0);
  CHECK(std::abs(solve_mode(g, 0, 1.0, one(1.0))(0) - Complex(1.0)) < 1e-12);
  CHECK(std::abs(solve_mode(g, 1, 1.0, one(1.0))(0) - Complex(0.5, -0.5)) < 1e-12);
  CHECK(std::abs(solve_mode(g, -3, 2.0, one(1.0))(0) - 1.0 / Complex(1.0, -6.0)) < 1e-14);
  CHECK_THROWS_AS(solve_mode(g, 1, 0.0, one(1.0)), InvalidSpec);
  CHECK_THROWS_AS(solve_mode(g, 1, 1.0, CVector::Ones(2)), DimensionMismatch);
}

TEST_CASE("oscillator lattice resonance") {
  const Generator osc = make_reference({ModelKind::ConservativeOscillator, {}, {}});
  try {
    solve_mode(osc, 1, 1.0, CVector::Ones(2));
    FAIL("expected LatticeResonance");
  } catch (const LatticeResonance& e) {
    CHECK(e.modes == std::vector<int>{1});
    CHECK(e.exit_code() == static_cast<int>(ErrorCode::LatticeResonance));
  }
  CHECK_NOTHROW(solve_mode(osc, 2, 1.0, CVector::Ones(2)));
}

TEST_CASE("lattice solver reports every resonant mode") {
  const Generator osc = make_reference({ModelKind::ConservativeOscillator, {}, {}});
  FourierForcing f;
  f.period = 2.0 * std::numbers::pi;
  for (int n = -2; n <= 2; ++n) f.coeffs[n] = CVector::Ones(2);
  try {
    solve_periodic(osc, f, 1.0);
    FAIL("expected LatticeResonance");
  } catch (const LatticeResonance& e) {
    CHECK(e.modes == std::vector<int>{-1, 1});
    CHECK(std::string(e.what()).find("-1") != std::string::npos);
  }
}

TEST_CASE("lattice solver requires prepared modes") {
  LatticeSolver solver(scalar(-1.0), 1.0);
  CHECK_THROWS_AS(solver.solve(0, one(1.0)), InvalidSpec);
  const int modes[] = {0, 2};
  solver.prepare(modes);
  CHECK(solver.resolvent_norm(2) == doctest::Approx(1.0 / std::sqrt(5.0)));
  const CVector u = solver.solve(2, one(1.0));
  CHECK(solver.residual(2, u, one(1.0)) < 1e-15);
}

TEST_CASE("constant forcing gives the steady state") {
  const Generator g = make_heat_wave_1d({ModelKind::HeatWave1d, {{"nx_heat", 6}, {"nx_wave", 5}}, {}});
  std::mt19937_64 rng(5);
  FourierForcing f;
  f.period = 1.0;
  f.coeffs[0] = oracle::random_state(rng, g.dim(), false).real().cast<Complex>();
  const PeriodicSolution sol = solve_periodic(g, f, 1.0);
  const CVector expected = -g.matrix().fullPivLu().solve(f.coeffs[0]);
  CHECK((sol.coeffs.at(0) - expected).norm() <= 1e-12 * expected.norm());
  CHECK(sol.norms.at(0.0) == doctest::Approx(energy_norm(g, expected)));
}

TEST_CASE("zero forcing gives zero") {
  const Generator g = scalar(-2.0);
  FourierForcing f;
  f.period = 3.0;
  for (int n = -4; n <= 4; ++n) f.coeffs[n] = CVector::Zero(1);
  const PeriodicSolution sol = solve_periodic(g, f, 1.0, 0.5);
  for (const auto& [n, u] : sol.coeffs) CHECK(u.norm() == 0.0);
  CHECK(sol.norms.at(1.0) == 0.0);
  REQUIRE(sol.loss_ratio.has_value());
  CHECK(*sol.loss_ratio == 0.0);

  FourierForcing empty;
  const PeriodicSolution none = solve_periodic(g, empty, 1.0);
  CHECK(none.coeffs.empty());
}

TEST_CASE("solve_periodic preconditions") {
  const Generator g = scalar(-1.0);
  FourierForcing f;
  f.coeffs[0] = one(1.0);
  CHECK_THROWS_AS(solve_periodic(g, f, 0.5), InvalidSpec);
  CHECK_THROWS_AS(solve_periodic(g, f, 1.0, -1.0), InvalidSpec);
  f.coeffs[0] = CVector::Ones(2);
  CHECK_THROWS_AS(solve_periodic(g, f, 1.0), DimensionMismatch);
}

TEST_CASE("heat-wave, 33-mode random forcing: residuals and direct-solve oracle") {
  const Generator g = make_heat_wave_1d({ModelKind::HeatWave1d, {{"nx_heat", 32}, {"nx_wave", 32}}, {}});
  const FourierForcing f = random_forcing(g, 2.0, 16, 2.0, 1234);
  REQUIRE(f.coeffs.size() == 33);
  CHECK(f.real_flag);
  const PeriodicSolution sol = solve_periodic(g, f, 1.0, 0.5, 4);
  for (const auto& [n, fn] : f.coeffs) {
    CHECK(sol.residuals.at(n) <= 1e-9 * energy_norm(g, fn));
    CMatrix m = -g.matrix();
    m.diagonal().array() += Complex(0.0, n * f.omega());
    const CVector direct = m.fullPivLu().solve(fn);
    CHECK(energy_norm(g, sol.coeffs.at(n) - direct) <= 1e-9 * energy_norm(g, direct));
  }
  // Real data and real A: U is conjugate symmetric.
  CHECK(conjugate_symmetric(sol.coeffs, 1e-10));
  REQUIRE(sol.loss_ratio.has_value());
  CHECK(*sol.loss_ratio > 0.0);
  CHECK(std::isfinite(*sol.loss_ratio));
}

TEST_CASE("random forcing is seeded and normalized") {
  const Generator g = make_weakly_damped_chain({ModelKind::WeaklyDampedChain, {{"n", 3}}, {}});
  const FourierForcing a = random_forcing(g, 1.0, 5, 1.0, 99);
  const FourierForcing b = random_forcing(g, 1.0, 5, 1.0, 99);
  const FourierForcing c = random_forcing(g, 1.0, 5, 1.0, 100);
  for (const auto& [n, v] : a.coeffs) {
    CHECK(v == b.coeffs.at(n));
    CHECK(energy_norm(g, v) == doctest::Approx(std::pow(1.0 + std::abs(n), -1.0)));
  }
  CHECK(a.coeffs.at(1) != c.coeffs.at(1));
  CHECK(a.coeffs.at(0).imag().norm() == 0.0);
}

TEST_CASE("uniformly damped loss ratios are bounded by 1") {
  const Generator g = make_reference({ModelKind::UniformlyDamped, {{"dim", 3}}, {}});
  const LossCertificate cert = verify_loss_estimate(g, 0.0, 1.0, 50, 7, {2.0, 16, 2});
  CHECK(cert.ratios.size() == 50);
  for (double r : cert.ratios) CHECK(r <= 1.0 + 1e-12);
  CHECK(cert.lattice_constant == doctest::Approx(1.0));
  CHECK(cert.tail_bound > 0.0);
}

TEST_CASE("verify is deterministic and independent of threads") {
  const Generator g = make_heat_wave_1d({ModelKind::HeatWave1d, {{"nx_heat", 8}, {"nx_wave", 8}}, {}});
  const LossCertificate a = verify_loss_estimate(g, 0.6, 1.0, 12, 42, {2.0, 16, 1});
  const LossCertificate b = verify_loss_estimate(g, 0.6, 1.0, 12, 42, {2.0, 16, 4});
  CHECK(a.ratios == b.ratios);
  CHECK(a.max_ratio == b.max_ratio);
  CHECK(a.lattice_constant == b.lattice_constant);
  const LossCertificate c = verify_loss_estimate(g, 0.6, 1.0, 12, 43, {2.0, 16, 1});
  CHECK(a.ratios != c.ratios);
  CHECK_THROWS_AS(verify_loss_estimate(g, -0.1, 1.0, 12, 1), InvalidSpec);
  CHECK_THROWS_AS(verify_loss_estimate(g, 0.5, 1.0, 0, 1), InvalidSpec);
}

TEST_CASE("lattice constant of a scalar") {
  // max_n 1/|i n + 1| / (1+|n|)^0 = 1 at n = 0
  CHECK(lattice_constant(scalar(-1.0), 1.0, 5, 0.0) == doctest::Approx(1.0));
}

}  // TEST_SUITE
