#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "perstab/fourier.hpp"
#include "perstab/generator.hpp"

namespace perstab {

// Factorizations of the lattice matrices i n omega I - A, one per mode.
// `prepare` fills the cache (optionally in parallel); afterwards `solve` and
// `resolvent_norm` are const and safe to call concurrently.
class LatticeSolver {
 public:
  LatticeSolver(const Generator& g, double omega);

  // Factorizes the given modes. Throws LatticeResonance naming every mode
  // whose lattice point is numerically in the spectrum.
  void prepare(std::span<const int> modes, int threads = 1);

  // U_n = (i n omega I - A)^{-1} f, with one step of iterative refinement.
  CVector solve(int n, const CVector& f) const;

  // ||(i n omega I - A)^{-1}||_H
  double resolvent_norm(int n) const;

  // ||(i n omega I - A) u - f||_H
  double residual(int n, const CVector& u, const CVector& f) const;

  double omega() const noexcept { return omega_; }

 private:
  struct Entry {
    Eigen::PartialPivLU<CMatrix> lu;
    double sigma_min = 0.0;
  };
  Entry factor(int n) const;
  const Entry& entry(int n) const;

  Generator g_;
  double omega_;
  std::map<int, Entry> cache_;
};

// U_n = (i n omega I - A)^{-1} F_n. Throws LatticeResonance({n}).
CVector solve_mode(const Generator& g, int n, double omega, const CVector& f);

struct PeriodicSolution {
  double period = 1.0;
  double m = 1.0;
  ModeMap coeffs;
  std::map<int, double> residuals;  // ||(i n omega I - A) U_n - F_n||_H
  std::map<double, double> norms;   // Sobolev index -> ||U||_{H^m_#}
  std::optional<double> alpha;
  std::optional<double> forcing_norm;  // ||F||_{H^{m+alpha}_#}
  std::optional<double> loss_ratio;    // ||U||_{H^m} / ||F||_{H^{m+alpha}}
};

// Mode-by-mode periodic solve. Records residuals and ||U||_{H^0}, ||U||_{H^m};
// with `alpha` also ||F||_{H^{m+alpha}} and the loss ratio. Requires m >= 1.
PeriodicSolution solve_periodic(const Generator& g, const FourierForcing& forcing, double m,
                                std::optional<double> alpha = std::nullopt, int threads = 1);

// Random real forcing with modes |n| <= n_max: F_n = (1+|n|)^{-decay} v_n with
// v_n uniform on the unit energy sphere, F_{-n} = conj(F_n), F_0 real.
FourierForcing random_forcing(const Generator& g, double period, int n_max, double decay, std::uint64_t seed);

// Empirical lattice constant max_{|n| <= n_max} ||(i n omega - A)^{-1}||_H / (1+|n|)^alpha.
double lattice_constant(const Generator& g, double omega, int n_max, double alpha, int threads = 1);

struct LossCertificate {
  double m = 1.0;
  double alpha = 0.0;
  double period = 2.0;
  int n_max = 64;
  int trials = 0;
  std::uint64_t seed = 0;
  double max_ratio = 0.0;         // empirical C_T
  std::vector<double> ratios;     // ||U||_{H^m} / ||F||_{H^{m+alpha}} per trial
  double lattice_constant = 0.0;  // empirical M_T on |n| <= n_max
  // M_T times the H^{m+alpha} mass the ensemble's decay law puts on |n| > n_max
  // (relative to the normalized head): bounds the omitted part of ||U||_{H^m}.
  double tail_bound = 0.0;
};

struct VerifyOptions {
  double period = 2.0;
  int n_max = 64;
  int threads = 1;
};

// Draws `trials` forcings with c_n = (1+|n|)^{-(m+alpha)-0.51}, normalized to
// ||F||_{H^{m+alpha}} = 1, and records ||U||_{H^m} for each.
LossCertificate verify_loss_estimate(const Generator& g, double alpha, double m, int trials, std::uint64_t seed,
                                     const VerifyOptions& options = {});

}  // namespace perstab
