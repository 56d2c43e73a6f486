#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "perstab/errors.hpp"
#include "perstab/models.hpp"

using namespace perstab;

namespace {

ModelSpec heat_wave(int nx_heat, int nx_wave) {
  return {ModelKind::HeatWave1d, {{"nx_heat", nx_heat}, {"nx_wave", nx_wave}}, {}};
}

ModelSpec chain(int n, double d, double gamma, double k) {
  return {ModelKind::WeaklyDampedChain, {{"n", n}, {"damping", d}, {"coupling", gamma}, {"stiffness", k}}, {}};
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("heat-wave smallest grid") {
  const Generator g = make_heat_wave_1d(heat_wave(2, 2));
  CHECK(g.dim() == 6);
  CHECK(g.has_flag("dissipative"));
  CHECK(g.is_real());
  CHECK(g.dissipativity_defect() <= 1e-10);
}

TEST_CASE("heat-wave energy identity is exact") {
  // G A + A^T G = -2 blockdiag(0, 0, K_heat): only the heat block dissipates.
  const Generator g = make_heat_wave_1d(heat_wave(5, 4));
  const Eigen::MatrixXd ga = g.gram() * g.matrix().real();
  const Eigen::MatrixXd sym = ga + ga.transpose();
  const int wave = 2 * 4 - 1;
  CHECK(sym.topLeftCorner(wave, wave).cwiseAbs().maxCoeff() < 1e-12 * ga.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  CHECK(es.eigenvalues().maxCoeff() <= 1e-10 * ga.norm());
}

TEST_CASE("heat-wave spectral abscissa is negative (eigenvalue oracle)") {
  for (int nx : {2, 4, 8, 16, 32}) {
    const Generator g = make_heat_wave_1d(heat_wave(nx, nx));
    const double abscissa = oracle::abscissa(g.matrix());
    CHECK(abscissa < 0.0);
    CHECK(g.abscissa() == doctest::Approx(abscissa).epsilon(1e-6));
  }
}

TEST_CASE("heat-wave rejects degenerate input") {
  ModelSpec spec = heat_wave(4, 4);
  spec.parameters["diffusivity"] = 0.0;
  CHECK_THROWS_AS(make_heat_wave_1d(spec), InvalidSpec);
  spec = heat_wave(1, 4);
  CHECK_THROWS_AS(make_heat_wave_1d(spec), InvalidSpec);
  spec = heat_wave(4, 4);
  spec.kind = ModelKind::Diagonal;
  CHECK_THROWS_AS(make_heat_wave_1d(spec), InvalidSpec);
}

TEST_CASE("dimension bookkeeping for all grid sizes 2..64") {
  for (int n = 2; n <= 64; n += 7) {
    for (int m = 2; m <= 64; m += 9) {
      const ModelSpec spec = heat_wave(n, m);
      CHECK(make_heat_wave_1d(spec).dim() == expected_dim(spec));
      CHECK(expected_dim(spec) == 2 * m + n);
    }
  }
  for (int n = 2; n <= 64; n += 3) {
    const ModelSpec spec = chain(n, 1.0, 1.0, 1.0);
    CHECK(make_weakly_damped_chain(spec).dim() == 4 * n);
  }
}

TEST_CASE("weakly damped chain, n=1") {
  const Generator g = make_weakly_damped_chain(chain(1, 1.0, 1.0, 1.0));
  CHECK(g.dim() == 4);
  CHECK(oracle::abscissa(g.matrix()) < 0.0);
  CHECK_FALSE(g.has_flag("conservative-part"));
}

TEST_CASE("weakly damped chain, decoupled") {
  const Generator g = make_weakly_damped_chain(chain(3, 1.0, 0.0, 1.0));
  CHECK(g.has_flag("conservative-part"));
  CHECK(std::abs(g.abscissa()) < 1e-10);
}

TEST_CASE("weakly damped chain, undamped is skew in energy coordinates") {
  const Generator g = make_weakly_damped_chain(chain(4, 0.0, 1.0, 2.0));
  const Eigen::MatrixXd ga = g.gram() * g.matrix().real();
  CHECK((ga + ga.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("weakly damped chain rejects negative parameters") {
  CHECK_THROWS_AS(make_weakly_damped_chain(chain(4, -1.0, 1.0, 1.0)), InvalidSpec);
  CHECK_THROWS_AS(make_weakly_damped_chain(chain(4, 1.0, -1.0, 1.0)), InvalidSpec);
  CHECK_THROWS_AS(make_weakly_damped_chain(chain(4, 1.0, 1.0, 0.0)), InvalidSpec);
}

TEST_CASE("reference models") {
  const Generator ud = make_reference({ModelKind::UniformlyDamped, {{"dim", 3}}, {}});
  CHECK(ud.matrix().isApprox(-CMatrix::Identity(3, 3)));
  CHECK(ud.gram().isApprox(Eigen::MatrixXd::Identity(3, 3)));

  const Generator osc = make_reference({ModelKind::ConservativeOscillator, {}, {}});
  std::vector<double> im;
  for (Eigen::Index i = 0; i < 2; ++i) {
    CHECK(std::abs(osc.eigenvalues()(i).real()) < 1e-15);
    im.push_back(osc.eigenvalues()(i).imag());
  }
  std::sort(im.begin(), im.end());
  CHECK(im[0] == doctest::Approx(-1.0));
  CHECK(im[1] == doctest::Approx(1.0));

  const Generator diag = make_reference({ModelKind::Diagonal, {}, {Complex(-1.0), Complex(-2.0)}});
  CHECK(oracle::resolvent_norm(diag, 0.0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_reference({ModelKind::Diagonal, {}, {}}), InvalidSpec);
  CHECK_THROWS_AS(make_reference({ModelKind::Diagonal, {}, {Complex(0.0), Complex(-1.0)}}), InvalidSpec);
  CHECK_NOTHROW(make_reference({ModelKind::Diagonal, {{"invertible", 0.0}}, {Complex(0.0), Complex(-1.0)}}));
  CHECK_THROWS_AS(make_reference({ModelKind::HeatWave1d, {}, {}}), InvalidSpec);
}

TEST_CASE("energy norm") {
  const Generator g = make_reference({ModelKind::Diagonal, {}, {Complex(-1.0), Complex(-1.0)}});
  CHECK(energy_norm(g, CVector(Eigen::Vector2cd(3.0, 4.0))) == doctest::Approx(5.0));
  CHECK(energy_norm(g, CVector::Zero(2)) == 0.0);

  Eigen::MatrixXd gram(2, 2);
  gram << 4.0, 0.0, 0.0, 1.0;
  const Generator w(-CMatrix::Identity(2, 2), gram, "weighted");
  CHECK(energy_norm(w, CVector(Eigen::Vector2cd(1.0, 0.0))) == doctest::Approx(2.0));
  CHECK_THROWS_AS(energy_norm(w, CVector::Zero(3)), DimensionMismatch);
}

TEST_CASE("generator validates its Gram matrix") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
  CHECK_THROWS_AS(Generator(-CMatrix::Identity(2, 2), bad, "x"), InvalidSpec);
  bad << 1.0, 0.5, 0.0, 1.0;  // not symmetric
  CHECK_THROWS_AS(Generator(-CMatrix::Identity(2, 2), bad, "x"), InvalidSpec);
  CHECK_THROWS_AS(Generator(-CMatrix::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3), "x"), DimensionMismatch);
}

TEST_CASE("apply_inverse") {
  std::mt19937_64 rng(7);
  const Generator ud = make_reference({ModelKind::UniformlyDamped, {{"dim", 4}}, {}});
  const CVector b = oracle::random_state(rng, 4);
  CHECK((apply_inverse(ud, b) + b).norm() < 1e-14);

  const Generator osc = make_reference({ModelKind::ConservativeOscillator, {}, {}});
  const CVector x = apply_inverse(osc, CVector(Eigen::Vector2cd(1.0, 0.0)));
  CHECK(std::abs(x(0)) < 1e-15);
  // A^{-1} = -A for the rotation, so (1, 0) maps to -A (1, 0) = (0, 1).
  CHECK(x(1).real() == doctest::Approx(1.0));
  CHECK((x - (-osc.matrix() * CVector(Eigen::Vector2cd(1.0, 0.0)))).norm() < 1e-15);

  const Generator sing = make_reference({ModelKind::Diagonal, {{"invertible", 0.0}}, {Complex(0.0), Complex(-1.0)}});
  CHECK_THROWS_AS(apply_inverse(sing, CVector::Ones(2)), SingularGenerator);

  const Generator hw = make_heat_wave_1d(heat_wave(16, 16));
  const CVector rhs = oracle::random_state(rng, hw.dim());
  const CVector sol = apply_inverse(hw, rhs);
  CHECK(energy_norm(hw, hw.matrix() * sol - rhs) <= 1e-10 * energy_norm(hw, rhs));
}

TEST_CASE("dissipativity on random states for every dissipative zoo model") {
  std::mt19937_64 rng(11);
  const std::vector<Generator> zoo = {
      make_heat_wave_1d(heat_wave(8, 12)),
      make_heat_wave_1d(heat_wave(32, 32)),
      make_weakly_damped_chain(chain(16, 2.0, 1.0, 400.0)),
      make_weakly_damped_chain(chain(5, 0.0, 1.0, 1.0)),
      make_reference({ModelKind::UniformlyDamped, {{"dim", 3}}, {}}),
      make_reference({ModelKind::ConservativeOscillator, {}, {}}),
  };
  for (const auto& g : zoo) {
    REQUIRE(g.has_flag("dissipative"));
    CHECK(g.is_real());
    for (int k = 0; k < 100; ++k) {
      const CVector x = oracle::random_state(rng, g.dim());
      const CVector ax = g.matrix() * x;
      const double re = (x.adjoint() * g.gram().cast<Complex>() * ax)(0).real();
      const double nx = energy_norm(g, x);
      CHECK(re <= 1e-10 * nx * nx);
    }
  }
}

}  // TEST_SUITE
