#include "perstab/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "perstab/errors.hpp"
#include "perstab/linalg.hpp"
#include "perstab/parallel.hpp"

namespace perstab {

namespace {

CMatrix lattice_matrix(const CMatrix& a, double shift) {
  CMatrix m = -a;
  m.diagonal().array() += Complex(0.0, shift);
  return m;
}

// Uniform on {x : ||x||_H = 1}: Gaussian in energy coordinates, normalized, mapped back.
CVector unit_energy_vector(const Generator& g, std::mt19937_64& rng, bool real) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector z(g.dim());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double re = normal(rng);
    const double im = real ? 0.0 : normal(rng);
    z(i) = Complex(re, im);
  }
  z /= z.norm();
  return g.from_energy(z);
}

// sum_{n > n_max} 2 (1+n)^{-p} for p > 1: direct sum to a cutoff plus the
// integral remainder.
double two_sided_tail(int n_max, double p) {
  constexpr long kCut = 200000;
  double s = 0.0;
  for (long n = n_max + 1; n <= kCut; ++n) s += std::pow(1.0 + static_cast<double>(n), -p);
  s += std::pow(1.0 + kCut + 0.5, 1.0 - p) / (p - 1.0);
  return 2.0 * s;
}

}  // namespace

LatticeSolver::LatticeSolver(const Generator& g, double omega) : g_(g), omega_(omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidSpec("lattice frequency omega must be positive");
}

LatticeSolver::Entry LatticeSolver::factor(int n) const {
  const double shift = n * omega_;
  Entry e;
  e.sigma_min = linalg::sigma_min(lattice_matrix(g_.weighted(), shift));
  e.lu.compute(lattice_matrix(g_.matrix(), shift));
  return e;
}

void LatticeSolver::prepare(std::span<const int> modes, int threads) {
  std::vector<int> todo;
  for (int n : modes) {
    if (!cache_.count(n) && std::find(todo.begin(), todo.end(), n) == todo.end()) todo.push_back(n);
  }
  std::vector<Entry> entries(todo.size());
  parallel_for(todo.size(), threads, [&](std::size_t i) { entries[i] = factor(todo[i]); });
  std::vector<int> resonant;
  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (entries[i].sigma_min < kResonanceTol * g_.operator_norm()) resonant.push_back(todo[i]);
  }
  if (!resonant.empty()) {
    std::sort(resonant.begin(), resonant.end());
    throw LatticeResonance(resonant);
  }
  for (std::size_t i = 0; i < todo.size(); ++i) cache_.emplace(todo[i], std::move(entries[i]));
}

const LatticeSolver::Entry& LatticeSolver::entry(int n) const {
  auto it = cache_.find(n);
  if (it == cache_.end()) throw InvalidSpec("lattice mode " + std::to_string(n) + " was not prepared");
  return it->second;
}

CVector LatticeSolver::solve(int n, const CVector& f) const {
  if (f.size() != g_.dim()) throw DimensionMismatch("forcing coefficient length does not match generator dim");
  const Entry& e = entry(n);
  CVector u = e.lu.solve(f);
  const CVector r = f - lattice_matrix(g_.matrix(), n * omega_) * u;
  u += e.lu.solve(r);
  return u;
}

double LatticeSolver::resolvent_norm(int n) const { return 1.0 / entry(n).sigma_min; }

double LatticeSolver::residual(int n, const CVector& u, const CVector& f) const {
  const CVector r = CVector(Complex(0.0, n * omega_) * u) - g_.matrix() * u - f;
  return energy_norm(g_, r);
}

CVector solve_mode(const Generator& g, int n, double omega, const CVector& f) {
  LatticeSolver solver(g, omega);
  const int modes[] = {n};
  solver.prepare(modes);
  return solver.solve(n, f);
}

PeriodicSolution solve_periodic(const Generator& g, const FourierForcing& forcing, double m,
                                std::optional<double> alpha, int threads) {
  if (!(m >= 1.0)) throw InvalidSpec("solution regularity m must be >= 1");
  if (alpha && !(*alpha >= 0.0)) throw InvalidSpec("loss exponent alpha must be >= 0");
  forcing.validate();
  if (!forcing.coeffs.empty() && forcing.dim() != g.dim()) {
    throw DimensionMismatch("forcing dimension " + std::to_string(forcing.dim()) + " vs generator dim " +
                            std::to_string(g.dim()));
  }

  std::vector<int> modes;
  for (const auto& [n, v] : forcing.coeffs) modes.push_back(n);
  LatticeSolver solver(g, forcing.omega());
  solver.prepare(modes, threads);

  std::vector<CVector> u(modes.size());
  parallel_for(modes.size(), threads, [&](std::size_t i) { u[i] = solver.solve(modes[i], forcing.coeffs.at(modes[i])); });

  PeriodicSolution sol;
  sol.period = forcing.period;
  sol.m = m;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const CVector& f = forcing.coeffs.at(modes[i]);
    sol.residuals[modes[i]] = solver.residual(modes[i], u[i], f);
    sol.coeffs.emplace(modes[i], std::move(u[i]));
  }
  sol.norms[0.0] = sobolev_norm(g, sol.coeffs, 0.0);
  sol.norms[m] = sobolev_norm(g, sol.coeffs, m);
  if (alpha) {
    sol.alpha = alpha;
    sol.forcing_norm = sobolev_norm(g, forcing.coeffs, m + *alpha);
    sol.loss_ratio = *sol.forcing_norm > 0.0 ? sol.norms[m] / *sol.forcing_norm : 0.0;
  }
  return sol;
}

FourierForcing random_forcing(const Generator& g, double period, int n_max, double decay, std::uint64_t seed) {
  if (n_max < 0) throw InvalidSpec("n_max must be >= 0");
  std::mt19937_64 rng(seed);
  FourierForcing f;
  f.period = period;
  f.real_flag = true;
  for (int n = 0; n <= n_max; ++n) {
    const double c = std::pow(1.0 + n, -decay);
    CVector v = c * unit_energy_vector(g, rng, n == 0);
    if (n > 0) f.coeffs.emplace(-n, v.conjugate());
    f.coeffs.emplace(n, std::move(v));
  }
  return f;
}

double lattice_constant(const Generator& g, double omega, int n_max, double alpha, int threads) {
  std::vector<int> modes;
  for (int n = -n_max; n <= n_max; ++n) modes.push_back(n);
  LatticeSolver solver(g, omega);
  solver.prepare(modes, threads);
  double mt = 0.0;
  for (int n : modes) mt = std::max(mt, solver.resolvent_norm(n) / std::pow(1.0 + std::abs(n), alpha));
  return mt;
}

LossCertificate verify_loss_estimate(const Generator& g, double alpha, double m, int trials, std::uint64_t seed,
                                     const VerifyOptions& options) {
  if (!(alpha >= 0.0)) throw InvalidSpec("alpha must be >= 0");
  if (!(m >= 0.0)) throw InvalidSpec("m must be >= 0");
  if (trials < 1) throw InvalidSpec("trials must be >= 1");
  if (options.n_max < 0) throw InvalidSpec("n_max must be >= 0");

  LossCertificate cert;
  cert.m = m;
  cert.alpha = alpha;
  cert.period = options.period;
  cert.n_max = options.n_max;
  cert.trials = trials;
  cert.seed = seed;

  const double decay = m + alpha + 0.51;
  // Draw every forcing up front from one stream, so results do not depend on threading.
  std::vector<FourierForcing> forcings;
  forcings.reserve(static_cast<std::size_t>(trials));
  std::mt19937_64 master(seed);
  for (int k = 0; k < trials; ++k) forcings.push_back(random_forcing(g, options.period, options.n_max, decay, master()));

  std::vector<int> modes;
  for (int n = -options.n_max; n <= options.n_max; ++n) modes.push_back(n);
  const double omega = 2.0 * std::numbers::pi / options.period;
  LatticeSolver solver(g, omega);
  solver.prepare(modes, options.threads);

  cert.ratios.assign(static_cast<std::size_t>(trials), 0.0);
  parallel_for(forcings.size(), options.threads, [&](std::size_t k) {
    FourierForcing& f = forcings[k];
    const double fnorm = sobolev_norm(g, f.coeffs, m + alpha);
    ModeMap u;
    for (auto& [n, v] : f.coeffs) {
      v /= fnorm;
      u.emplace(n, solver.solve(n, v));
    }
    cert.ratios[k] = sobolev_norm(g, u, m) / sobolev_norm(g, f.coeffs, m + alpha);
  });
  for (double r : cert.ratios) {
    if (!std::isfinite(r)) throw UnstableGrowth("non-finite loss ratio");
  }
  cert.max_ratio = *std::max_element(cert.ratios.begin(), cert.ratios.end());

  for (int n : modes) {
    cert.lattice_constant =
        std::max(cert.lattice_constant, solver.resolvent_norm(n) / std::pow(1.0 + std::abs(n), alpha));
  }
  // Ensemble law: (1+|n|)^{2(m+alpha)} c_n^2 = (1+|n|)^{-1.02}.
  double head = 0.0;
  for (int n = -options.n_max; n <= options.n_max; ++n) head += std::pow(1.0 + std::abs(n), -1.02);
  cert.tail_bound = cert.lattice_constant * std::sqrt(two_sided_tail(options.n_max, 1.02) / head);
  return cert;
}

}  // namespace perstab
