#include "perstab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "perstab/errors.hpp"
#include "perstab/parallel.hpp"

namespace perstab {

namespace {

constexpr double kImaginaryAxisTol = 1e-8;
constexpr double kUniformExponent = 0.1;
constexpr int kMinFitPoints = 5;
constexpr int kLogGridPoints = 40;

bool in_window(double x, Window w) {
  const double slack = 1e-12 * std::max(1.0, std::abs(w.hi));
  return x >= w.lo - slack && x <= w.hi + slack;
}

void require_sorted(std::span<const double> grid) {
  if (grid.empty()) throw TooFewPoints("sampling grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidSpec("sampling grid must be strictly increasing");
  }
}

}  // namespace

ResolventProfile ResolventProfile::envelope() const {
  ResolventProfile out = *this;
  double running = 0.0;
  for (double& v : out.norm) {
    running = std::max(running, v);
    v = running;
  }
  return out;
}

double resolvent_norm(const Generator& g, double s, Eigen::Index dense_limit) {
  CMatrix shifted = -g.weighted();
  shifted.diagonal().array() += Complex(0.0, s);
  const double smin = linalg::sigma_min(shifted, dense_limit);
  if (smin < kResonanceTol * g.operator_norm()) throw ResonantFrequency(s, smin);
  return 1.0 / smin;
}

ResolventProfile sample_resolvent(const Generator& g, std::span<const double> grid, int threads) {
  require_sorted(grid);
  std::vector<double> values(grid.size(), 0.0);
  std::vector<char> resonant(grid.size(), 0);
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    try {
      values[i] = resolvent_norm(g, grid[i]);
    } catch (const ResonantFrequency&) {
      resonant[i] = 1;
    }
  });
  ResolventProfile out;
  out.generator_label = g.label();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (resonant[i] || !std::isfinite(values[i])) {
      out.resonant.push_back(grid[i]);
    } else {
      out.s.push_back(grid[i]);
      out.norm.push_back(values[i]);
    }
  }
  return out;
}

double semigroup_decay_norm(const Generator& g, double t) {
  if (!(t >= 0.0)) throw InvalidSpec("decay probe needs t >= 0");
  if (!g.invertible()) {
    throw SingularGenerator("S(t)A^{-1} undefined: 0 is numerically in the spectrum of " + g.label());
  }
  const CMatrix& aw = g.weighted();
  const CMatrix e = linalg::expm(CMatrix(t * aw));
  if (!e.allFinite()) throw UnstableGrowth("e^{tA} overflowed at t=" + std::to_string(t));
  // X = e^{tA_w} A_w^{-1}  <=>  A_w^T X^T = e^T
  const CMatrix xt = aw.transpose().partialPivLu().solve(CMatrix(e.transpose()));
  const double v = linalg::sigma_max_svd(xt);
  if (!std::isfinite(v)) throw UnstableGrowth("decay norm not finite at t=" + std::to_string(t));
  return v;
}

DecayProfile sample_decay(const Generator& g, std::span<const double> times, int threads) {
  require_sorted(times);
  DecayProfile out;
  out.generator_label = g.label();
  out.t.assign(times.begin(), times.end());
  out.norm.assign(times.size(), 0.0);
  parallel_for(times.size(), threads, [&](std::size_t i) { out.norm[i] = semigroup_decay_norm(g, times[i]); });
  return out;
}

ExponentFit fit_exponent(std::span<const double> x, std::span<const double> norm, Window window) {
  if (x.size() != norm.size()) throw DimensionMismatch("profile abscissa and values differ in length");
  if (!(window.hi > window.lo)) throw InvalidSpec("fit window must satisfy lo < hi");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!in_window(x[i], window)) continue;
    if (!(norm[i] > 0.0) || !std::isfinite(norm[i])) continue;
    lx.push_back(std::log1p(std::abs(x[i])));
    ly.push_back(std::log(norm[i]));
  }
  if (lx.size() < static_cast<std::size_t>(kMinFitPoints)) {
    throw TooFewPoints("exponent fit needs >= 5 samples in [" + std::to_string(window.lo) + ", " +
                       std::to_string(window.hi) + "], found " + std::to_string(lx.size()));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw TooFewPoints("exponent fit needs distinct abscissae");
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  fit.constant = std::exp(my - fit.exponent * mx);
  fit.window = window;
  fit.samples = lx.size();
  double ssr = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (my + fit.exponent * (lx[i] - mx));
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  return fit;
}

ExponentFit fit_exponent(const ResolventProfile& profile, Window window) {
  return fit_exponent(profile.s, profile.norm, window);
}

ExponentFit fit_exponent(const DecayProfile& profile, Window window) {
  return fit_exponent(profile.t, profile.norm, window);
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw InvalidSpec("log grid needs 0 < lo < hi and count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> peak_grid(const Generator& g, Window window) {
  std::vector<double> peaks;
  for (Eigen::Index i = 0; i < g.eigenvalues().size(); ++i) {
    const double im = g.eigenvalues()(i).imag();
    if (in_window(im, window)) peaks.push_back(im);
  }
  std::sort(peaks.begin(), peaks.end());
  std::vector<double> distinct;
  for (double p : peaks) {
    if (distinct.empty() || p - distinct.back() > 1e-9 * std::max(1.0, std::abs(p))) distinct.push_back(p);
  }
  return distinct;
}

Window default_frequency_window(const Generator& g) {
  const double lo = g.metadata_or("window_lo", 1.0);
  double hi = g.metadata_or("window_hi", -1.0);
  if (hi <= lo) {
    double max_im = 0.0;
    for (Eigen::Index i = 0; i < g.eigenvalues().size(); ++i) max_im = std::max(max_im, std::abs(g.eigenvalues()(i).imag()));
    hi = std::max({10.0, max_im, 2.0 * lo});
  }
  return {lo, hi};
}

ResolventProfile probe_resolvent(const Generator& g, Window window, int threads) {
  if (peak_grid(g, window).size() < static_cast<std::size_t>(kMinFitPoints)) {
    return sample_resolvent(g, log_grid(std::max(window.lo, 1e-6), window.hi, kLogGridPoints), threads);
  }
  // Peaks below the window too, so the envelope is the sup over [0, s].
  std::vector<double> grid = peak_grid(g, {0.0, window.hi});
  if (grid.front() > 0.0) grid.insert(grid.begin(), 0.0);
  return sample_resolvent(g, grid, threads);
}

BorichevTomilovReport check_borichev_tomilov(const Generator& g, Window freq_window, Window time_window,
                                             int threads) {
  if (!g.has_flag("dissipative")) {
    throw InvalidSpec("Borichev-Tomilov check requires a dissipative generator");
  }
  BorichevTomilovReport rep;
  const ResolventProfile freq = probe_resolvent(g, freq_window, threads).envelope();
  rep.frequency_fit = fit_exponent(freq, freq_window);
  const auto times = log_grid(time_window.lo, time_window.hi, kLogGridPoints);
  const DecayProfile decay = sample_decay(g, times, threads);
  rep.time_fit = fit_exponent(decay, time_window);
  rep.alpha = rep.frequency_fit.exponent;
  rep.beta = rep.time_fit.exponent;
  rep.product = rep.alpha * std::abs(rep.beta);

  std::ostringstream os;
  if (rep.alpha < kUniformExponent) {
    rep.uniform_regime = true;
    rep.pass = true;
    os << "uniform regime, equivalence vacuous (alpha_hat=" << rep.alpha << ")";
  } else {
    rep.pass = std::abs(rep.product - 1.0) <= rep.tolerance;
    os << "alpha_hat=" << rep.alpha << " beta_hat=" << rep.beta << " product=" << rep.product
       << (rep.pass ? " consistent" : " inconsistent");
  }
  rep.verdict = os.str();
  return rep;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Uniform: return "uniform";
    case Stability::Polynomial: return "polynomial";
    case Stability::Conservative: return "conservative";
    case Stability::Unstable: return "unstable";
  }
  return "unknown";
}

StabilityReport classify_stability(const Generator& g, std::optional<Window> window, int threads) {
  StabilityReport rep;
  rep.abscissa = g.abscissa();
  std::ostringstream os;
  os.precision(6);
  if (rep.abscissa > kImaginaryAxisTol) {
    rep.classification = Stability::Unstable;
    os << "spectral abscissa " << rep.abscissa << " > 0";
    rep.evidence = os.str();
    return rep;
  }
  double closest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.eigenvalues().size(); ++i) {
    closest = std::min(closest, std::abs(g.eigenvalues()(i).real()));
  }
  if (closest <= kImaginaryAxisTol) {
    rep.classification = Stability::Conservative;
    os << "eigenvalue within " << closest << " of the imaginary axis";
    rep.evidence = os.str();
    return rep;
  }
  const Window w = window.value_or(default_frequency_window(g));
  const ResolventProfile env = probe_resolvent(g, w, threads).envelope();
  const ExponentFit fit = fit_exponent(env, w);
  rep.fit = fit;
  if (fit.exponent < kUniformExponent) {
    rep.classification = Stability::Uniform;
    os << "resolvent bounded on [" << w.lo << ", " << w.hi << "], exponent " << fit.exponent;
  } else {
    rep.classification = Stability::Polynomial;
    rep.alpha_hat = fit.exponent;
    os << "resolvent grows like (1+s)^" << fit.exponent << " on [" << w.lo << ", " << w.hi
       << "], r2=" << fit.r_squared;
  }
  rep.evidence = os.str();
  return rep;
}

}  // namespace perstab
