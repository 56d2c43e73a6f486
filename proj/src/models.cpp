#include "perstab/models.hpp"

#include <cmath>
#include <numbers>

#include "perstab/errors.hpp"

namespace perstab {

namespace {

void require_kind(const ModelSpec& spec, ModelKind kind) {
  if (spec.kind != kind) {
    throw InvalidSpec("expected model kind " + to_string(kind) + ", got " + to_string(spec.kind));
  }
}

double positive(const ModelSpec& spec, const std::string& key, double fallback) {
  const double v = spec.get(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidSpec("parameter '" + key + "' must be positive (got " + std::to_string(v) + ")");
  }
  return v;
}

double nonnegative(const ModelSpec& spec, const std::string& key, double fallback) {
  const double v = spec.get(key, fallback);
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidSpec("parameter '" + key + "' must be nonnegative (got " + std::to_string(v) + ")");
  }
  return v;
}

int grid_size(const ModelSpec& spec, const std::string& key, double fallback, int minimum) {
  const double v = spec.get(key, fallback);
  if (v != std::floor(v) || v < minimum || v > 1e6) {
    throw InvalidSpec("parameter '" + key + "' must be an integer >= " + std::to_string(minimum));
  }
  return static_cast<int>(v);
}

// Stiffness matrix of sum_{cells} (coef/h) (y_{j+1} - y_j)^2 on a path of
// `n` unknowns. `left_dirichlet`/`right_dirichlet` add a cell to a pinned node.
RMatrix path_stiffness(int n, double coef_over_h, bool left_dirichlet, bool right_dirichlet) {
  RMatrix k = RMatrix::Zero(n, n);
  for (int j = 0; j + 1 < n; ++j) {
    k(j, j) += coef_over_h;
    k(j + 1, j + 1) += coef_over_h;
    k(j, j + 1) -= coef_over_h;
    k(j + 1, j) -= coef_over_h;
  }
  if (left_dirichlet) k(0, 0) += coef_over_h;
  if (right_dirichlet) k(n - 1, n - 1) += coef_over_h;
  return k;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::HeatWave1d: return "heat_wave_1d";
    case ModelKind::WeaklyDampedChain: return "weakly_damped_chain";
    case ModelKind::UniformlyDamped: return "uniformly_damped";
    case ModelKind::ConservativeOscillator: return "conservative_oscillator";
    case ModelKind::Diagonal: return "diagonal";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "heat_wave_1d") return ModelKind::HeatWave1d;
  if (name == "weakly_damped_chain") return ModelKind::WeaklyDampedChain;
  if (name == "uniformly_damped") return ModelKind::UniformlyDamped;
  if (name == "conservative_oscillator") return ModelKind::ConservativeOscillator;
  if (name == "diagonal") return ModelKind::Diagonal;
  throw InvalidSpec("unknown model kind '" + name + "'");
}

double ModelSpec::get(const std::string& key, double fallback) const {
  auto it = parameters.find(key);
  return it == parameters.end() ? fallback : it->second;
}

Generator make_heat_wave_1d(const ModelSpec& spec) {
  require_kind(spec, ModelKind::HeatWave1d);
  const int nx_heat = grid_size(spec, "nx_heat", 32, 2);
  const int nx_wave = grid_size(spec, "nx_wave", 32, 2);
  const double c = positive(spec, "diffusivity", 1.0);
  const double speed = positive(spec, "wave_speed", 1.0);
  const double heat_len = positive(spec, "heat_length", 1.0);
  const double wave_len = positive(spec, "wave_length", 1.0);
  const double kappa = speed * speed;

  const int m = nx_wave;        // wave cells; displacement unknowns w_0..w_{m-1}
  const int nh = nx_heat + 1;   // heat unknowns u_1..u_nh, u_nh at the interface
  const double hw = wave_len / m;
  const double hh = heat_len / nh;
  const double m_interface = 0.5 * (hw + hh);

  const int iw = 0;
  const int iv = m;             // v_1..v_{m-1}
  const int iu = 2 * m - 1;
  const int n = iu + nh;
  const int ii = n - 1;         // interface unknown

  // Wave: pinned at x = L_w (right), free displacement at the interface node.
  const RMatrix kw = path_stiffness(m, kappa / hw, false, true);
  // Heat: pinned at x = -L_h (left), interface node last.
  const RMatrix kh = path_stiffness(nh, c / hh, true, false);

  RMatrix a = RMatrix::Zero(n, n);
  a(iw, ii) = 1.0;  // w_0' = u(0) = w_t(0)
  for (int j = 1; j < m; ++j) a(iw + j, iv + j - 1) = 1.0;
  for (int j = 1; j < m; ++j) a.block(iv + j - 1, iw, 1, m) = -kw.row(j) / hw;
  for (int i = 0; i + 1 < nh; ++i) a.block(iu + i, iu, 1, nh) = -kh.row(i) / hh;
  // Interface momentum balance: heat flux plus wave traction on the shared mass.
  a.block(ii, iu, 1, nh) = -kh.row(nh - 1) / m_interface;
  a.block(ii, iw, 1, m) -= kw.row(0) / m_interface;

  RMatrix gram = RMatrix::Zero(n, n);
  gram.block(iw, iw, m, m) = kw;
  for (int j = 0; j + 1 < m; ++j) gram(iv + j, iv + j) = hw;
  for (int i = 0; i + 1 < nh; ++i) gram(iu + i, iu + i) = hh;
  gram(ii, ii) = m_interface;

  const double s_nyq = std::numbers::pi * speed / hw;
  Metadata meta{{"nx_heat", nx_heat},   {"nx_wave", nx_wave},   {"diffusivity", c},
                {"wave_speed", speed},  {"heat_length", heat_len}, {"wave_length", wave_len},
                {"h_heat", hh},         {"h_wave", hw},         {"s_nyquist", s_nyq},
                {"window_lo", 1.0},     {"window_hi", s_nyq / 4.0}};
  return Generator(a.cast<Complex>(), gram, "heat_wave_1d", std::move(meta), {"dissipative"});
}

Generator make_weakly_damped_chain(const ModelSpec& spec) {
  require_kind(spec, ModelKind::WeaklyDampedChain);
  const int n = grid_size(spec, "n", 16, 1);
  const double d = nonnegative(spec, "damping", 2.0);
  const double gamma = nonnegative(spec, "coupling", 1.0);
  const double k = positive(spec, "stiffness", 400.0);

  const RMatrix eye = RMatrix::Identity(n, n);
  RMatrix kmat = 2.0 * k * eye;
  for (int j = 0; j + 1 < n; ++j) {
    kmat(j, j + 1) = -k;
    kmat(j + 1, j) = -k;
  }
  RMatrix kc(2 * n, 2 * n);
  kc << kmat + gamma * eye, -gamma * eye, -gamma * eye, kmat + gamma * eye;

  RMatrix a = RMatrix::Zero(4 * n, 4 * n);
  a.block(0, 2 * n, 2 * n, 2 * n).setIdentity();
  a.block(2 * n, 0, 2 * n, 2 * n) = -kc;
  a.block(2 * n, 2 * n, n, n) = -d * eye;

  RMatrix gram = RMatrix::Zero(4 * n, 4 * n);
  gram.block(0, 0, 2 * n, 2 * n) = kc;
  gram.block(2 * n, 2 * n, 2 * n, 2 * n).setIdentity();

  std::set<std::string> flags{"dissipative"};
  if (d == 0.0 || gamma == 0.0) flags.insert("conservative-part");

  const double omega_max = std::sqrt(4.0 * k + 2.0 * gamma);
  Metadata meta{{"n", n},
                {"damping", d},
                {"coupling", gamma},
                {"stiffness", k},
                {"omega_max", omega_max},
                {"window_lo", omega_max / 4.0},
                {"window_hi", omega_max}};
  return Generator(a.cast<Complex>(), gram, "weakly_damped_chain", std::move(meta), std::move(flags));
}

Generator make_reference(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::UniformlyDamped: {
      const int n = grid_size(spec, "dim", 1, 1);
      return Generator(-CMatrix::Identity(n, n), RMatrix::Identity(n, n), "uniformly_damped",
                       {{"dim", n}}, {"dissipative"});
    }
    case ModelKind::ConservativeOscillator: {
      CMatrix a(2, 2);
      a << 0.0, 1.0, -1.0, 0.0;
      return Generator(a, RMatrix::Identity(2, 2), "conservative_oscillator", {},
                       {"dissipative", "conservative-part"});
    }
    case ModelKind::Diagonal: {
      if (spec.eigenvalues.empty()) throw InvalidSpec("diagonal model requires a nonempty eigenvalue list");
      const bool invertible = spec.get("invertible", 1.0) != 0.0;
      const auto n = static_cast<Eigen::Index>(spec.eigenvalues.size());
      CVector diag(n);
      bool dissipative = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex lam = spec.eigenvalues[static_cast<std::size_t>(i)];
        if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag())) throw InvalidSpec("non-finite eigenvalue");
        if (invertible && lam == Complex(0.0)) {
          throw InvalidSpec("diagonal model flagged invertible has a zero eigenvalue");
        }
        dissipative = dissipative && lam.real() <= 0.0;
        diag(i) = lam;
      }
      std::set<std::string> flags;
      if (dissipative) flags.insert("dissipative");
      if (invertible) flags.insert("invertible");
      return Generator(diag.asDiagonal().toDenseMatrix(), RMatrix::Identity(n, n), "diagonal",
                       {{"invertible", invertible ? 1.0 : 0.0}}, std::move(flags));
    }
    default:
      throw InvalidSpec("make_reference does not build " + to_string(spec.kind));
  }
}

Generator make_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::HeatWave1d: return make_heat_wave_1d(spec);
    case ModelKind::WeaklyDampedChain: return make_weakly_damped_chain(spec);
    default: return make_reference(spec);
  }
}

Eigen::Index expected_dim(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::HeatWave1d:
      return 2 * static_cast<Eigen::Index>(spec.get("nx_wave", 32)) +
             static_cast<Eigen::Index>(spec.get("nx_heat", 32));
    case ModelKind::WeaklyDampedChain: return 4 * static_cast<Eigen::Index>(spec.get("n", 16));
    case ModelKind::UniformlyDamped: return static_cast<Eigen::Index>(spec.get("dim", 1));
    case ModelKind::ConservativeOscillator: return 2;
    case ModelKind::Diagonal: return static_cast<Eigen::Index>(spec.eigenvalues.size());
  }
  return 0;
}

}  // namespace perstab
