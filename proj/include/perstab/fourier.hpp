#pragma once

#include <map>
#include <span>
#include <vector>

#include "perstab/generator.hpp"

namespace perstab {

// Temporal Fourier coefficients n -> X_n of X(t) = sum_n X_n e^{i n omega t}.
using ModeMap = std::map<int, CVector>;

// A T-periodic forcing given by finitely many Fourier modes.
struct FourierForcing {
  double period = 1.0;
  ModeMap coeffs;
  // Asserts F_{-n} = conj(F_n), i.e. F(t) is real.
  bool real_flag = false;

  double omega() const;
  int n_max() const;
  Eigen::Index dim() const;
  // Throws on mixed dimensions, T <= 0, or a real_flag that does not hold to 1e-12.
  void validate() const;
};

int max_mode(const ModeMap& coeffs);

// Checks X_{-n} = conj(X_n) for all stored n, relative to the largest coefficient.
bool conjugate_symmetric(const ModeMap& coeffs, double tol = 1e-12);

// Periodic Sobolev norm sqrt(sum_n (1+|n|)^{2m} ||X_n||_H^2), real m >= 0.
double sobolev_norm(const Generator& g, const ModeMap& coeffs, double m);

// Trigonometric-interpolation coefficients |n| <= n_max of equispaced samples
// x_j = X(j T / S), j = 0..S-1. Requires S >= 2 n_max + 2.
ModeMap fourier_coefficients(std::span<const CVector> samples, int n_max);

// X(j T / S) for j = 0..S-1. Requires S >= 2 n_max + 2.
std::vector<CVector> synthesize_time_series(const ModeMap& coeffs, int sample_count);

// X(t) at an arbitrary time.
CVector evaluate(const ModeMap& coeffs, double omega, double t);

// Real parts of a synthesized series. Throws if an imaginary part exceeds
// 1e-10 relative to the series' largest entry.
std::vector<Eigen::VectorXd> real_series(const std::vector<CVector>& series, double rtol = 1e-10);

}  // namespace perstab
