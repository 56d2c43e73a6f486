#include "perstab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "perstab/errors.hpp"

namespace perstab {

namespace {

// e^{2 pi i k / s}, reduced mod s so large products stay exact.
Complex unit_root(long long k, long long s) {
  const long long r = ((k % s) + s) % s;
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(s);
  return {std::cos(theta), std::sin(theta)};
}

Eigen::Index common_dim(const ModeMap& coeffs) {
  Eigen::Index d = -1;
  for (const auto& [n, v] : coeffs) {
    if (d < 0) d = v.size();
    if (v.size() != d) throw DimensionMismatch("Fourier coefficient of mode " + std::to_string(n) + " has length " +
                                              std::to_string(v.size()) + ", expected " + std::to_string(d));
  }
  return d;
}

}  // namespace

double FourierForcing::omega() const { return 2.0 * std::numbers::pi / period; }

int FourierForcing::n_max() const { return max_mode(coeffs); }

Eigen::Index FourierForcing::dim() const { return std::max<Eigen::Index>(common_dim(coeffs), 0); }

void FourierForcing::validate() const {
  if (!(period > 0.0) || !std::isfinite(period)) throw InvalidSpec("forcing period must be positive");
  common_dim(coeffs);
  if (real_flag && !conjugate_symmetric(coeffs)) {
    throw InvalidSpec("forcing flagged real but F_{-n} != conj(F_n)");
  }
}

int max_mode(const ModeMap& coeffs) {
  int m = 0;
  for (const auto& [n, v] : coeffs) m = std::max(m, std::abs(n));
  return m;
}

bool conjugate_symmetric(const ModeMap& coeffs, double tol) {
  double scale = 0.0;
  for (const auto& [n, v] : coeffs) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  const double bound = tol * std::max(scale, 1e-300);
  for (const auto& [n, v] : coeffs) {
    auto it = coeffs.find(-n);
    if (it == coeffs.end()) {
      if (v.cwiseAbs().maxCoeff() > bound) return false;
      continue;
    }
    if ((it->second - v.conjugate()).cwiseAbs().maxCoeff() > bound) return false;
  }
  return true;
}

double sobolev_norm(const Generator& g, const ModeMap& coeffs, double m) {
  if (!(m >= 0.0)) throw InvalidSpec("Sobolev index must be >= 0");
  double sum = 0.0;
  for (const auto& [n, v] : coeffs) {
    const double e = energy_norm(g, v);
    sum += std::pow(1.0 + std::abs(n), 2.0 * m) * e * e;
  }
  return std::sqrt(sum);
}

ModeMap fourier_coefficients(std::span<const CVector> samples, int n_max) {
  const auto s = static_cast<long long>(samples.size());
  if (n_max < 0) throw InvalidSpec("n_max must be >= 0");
  if (s < 2LL * n_max + 2) {
    throw TooFewPoints("need >= " + std::to_string(2 * n_max + 2) + " samples for n_max=" + std::to_string(n_max) +
                       ", got " + std::to_string(s));
  }
  const Eigen::Index d = samples.front().size();
  for (const auto& x : samples) {
    if (x.size() != d) throw DimensionMismatch("time samples differ in length");
  }
  ModeMap out;
  for (int n = -n_max; n <= n_max; ++n) {
    CVector acc = CVector::Zero(d);
    for (long long j = 0; j < s; ++j) acc += unit_root(-static_cast<long long>(n) * j, s) * samples[static_cast<std::size_t>(j)];
    out.emplace(n, acc / static_cast<double>(s));
  }
  return out;
}

std::vector<CVector> synthesize_time_series(const ModeMap& coeffs, int sample_count) {
  const int n_max = max_mode(coeffs);
  if (sample_count < 2 * n_max + 2) {
    throw TooFewPoints("need >= " + std::to_string(2 * n_max + 2) + " samples to synthesize modes up to " +
                       std::to_string(n_max));
  }
  const Eigen::Index d = std::max<Eigen::Index>(common_dim(coeffs), 0);
  std::vector<CVector> out(static_cast<std::size_t>(sample_count), CVector::Zero(d));
  for (int j = 0; j < sample_count; ++j) {
    for (const auto& [n, v] : coeffs) out[static_cast<std::size_t>(j)] += unit_root(static_cast<long long>(n) * j, sample_count) * v;
  }
  return out;
}

CVector evaluate(const ModeMap& coeffs, double omega, double t) {
  const Eigen::Index d = std::max<Eigen::Index>(common_dim(coeffs), 0);
  CVector out = CVector::Zero(d);
  for (const auto& [n, v] : coeffs) out += std::polar(1.0, n * omega * t) * v;
  return out;
}

std::vector<Eigen::VectorXd> real_series(const std::vector<CVector>& series, double rtol) {
  double scale = 0.0, worst = 0.0;
  for (const auto& x : series) {
    if (x.size() == 0) continue;
    scale = std::max(scale, x.cwiseAbs().maxCoeff());
    worst = std::max(worst, x.imag().cwiseAbs().maxCoeff());
  }
  if (worst > rtol * std::max(scale, 1e-300)) {
    throw InvalidSpec("time series is not real (imaginary part " + std::to_string(worst) + ")");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(series.size());
  for (const auto& x : series) out.emplace_back(x.real());
  return out;
}

}  // namespace perstab
