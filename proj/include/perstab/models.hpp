#pragma once

#include <map>
#include <string>
#include <vector>

#include "perstab/generator.hpp"

namespace perstab {

enum class ModelKind {
  HeatWave1d,
  WeaklyDampedChain,
  UniformlyDamped,
  ConservativeOscillator,
  Diagonal,
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// Configuration of a zoo model. Numeric parameters live in `parameters`;
// the `diagonal` model also reads `eigenvalues`.
struct ModelSpec {
  ModelKind kind = ModelKind::UniformlyDamped;
  std::map<std::string, double> parameters;
  std::vector<Complex> eigenvalues;

  double get(const std::string& key, double fallback) const;
};

// Heat u_t = c u_xx on (-L_h, 0), wave w_tt = kappa w_xx on (0, L_w) with
// kappa = wave_speed^2, u(-L_h) = 0, w(L_w) = 0, and at x = 0
// u = w_t and c u_x = kappa w_x.
//
// Parameters: nx_heat, nx_wave (>= 2), diffusivity, wave_speed,
// heat_length, wave_length (default 1).
//
// State layout (w_0..w_{M-1}, v_1..v_{M-1}, u_1..u_{nx_heat+1}) with M = nx_wave:
// wave displacements include the interface node, wave velocities exclude it,
// and the last heat unknown is the interface value, which doubles as the wave
// velocity there. dim = 2 nx_wave + nx_heat. G is the trapezoidal discrete
// energy  sum kappa |w_x|^2 h + sum |w_t|^2 h + sum |u|^2 h.
Generator make_heat_wave_1d(const ModelSpec& spec);

// x1'' + d x1' + K x1 + g (x1 - x2) = 0,  x2'' + K x2 + g (x2 - x1) = 0,
// K = stiffness * tridiag(-1, 2, -1) of order n. State (x1, x2, x1', x2').
// Parameters: n, damping, coupling, stiffness.
Generator make_weakly_damped_chain(const ModelSpec& spec);

// uniformly_damped (A = -I of order `dim`), conservative_oscillator
// (A = [[0,1],[-1,0]]), diagonal (A = diag(eigenvalues)); all with G = I.
// `diagonal` rejects zero eigenvalues unless parameters["invertible"] == 0.
Generator make_reference(const ModelSpec& spec);

// Dispatches on spec.kind.
Generator make_model(const ModelSpec& spec);

// Documented state dimension for a spec.
Eigen::Index expected_dim(const ModelSpec& spec);

}  // namespace perstab
