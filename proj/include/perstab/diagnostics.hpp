#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perstab/generator.hpp"
#include "perstab/linalg.hpp"

namespace perstab {

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

// s -> ||(isI - A)^{-1}||_H on a sorted grid. Frequencies where is is numerically
// in the spectrum are dropped from the samples and listed in `resonant`.
struct ResolventProfile {
  std::vector<double> s;
  std::vector<double> norm;
  std::vector<double> resonant;
  std::string generator_label;

  // Running maximum: sup_{s' <= s} of the sampled norms.
  ResolventProfile envelope() const;
};

// t -> ||S(t) A^{-1}||_H
struct DecayProfile {
  std::vector<double> t;
  std::vector<double> norm;
  std::string generator_label;
};

// Least-squares fit of log(norm) = log(constant) + exponent * log(1 + |x|).
struct ExponentFit {
  double exponent = 0.0;
  double constant = 0.0;
  Window window;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

double resolvent_norm(const Generator& g, double s, Eigen::Index dense_limit = linalg::kDenseSvdLimit);

ResolventProfile sample_resolvent(const Generator& g, std::span<const double> grid, int threads = 1);

double semigroup_decay_norm(const Generator& g, double t);

DecayProfile sample_decay(const Generator& g, std::span<const double> times, int threads = 1);

ExponentFit fit_exponent(std::span<const double> x, std::span<const double> norm, Window window);
ExponentFit fit_exponent(const ResolventProfile& profile, Window window);
ExponentFit fit_exponent(const DecayProfile& profile, Window window);

// `count` log-spaced points in [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, int count);

// Sorted distinct Im(lambda) of the spectrum inside the window. The resolvent
// norm peaks at these frequencies.
std::vector<double> peak_grid(const Generator& g, Window window);

// Model-provided window (metadata window_lo/window_hi) or [1, max(10, max|Im lambda|)].
Window default_frequency_window(const Generator& g);

// Resolvent profile on the spectral peaks in [0, window.hi] (plus s = 0), so that
// envelope() is sup_{|s'| <= s} for real spectra; on a 40-point log grid over
// the window when fewer than 5 peaks fall inside it.
ResolventProfile probe_resolvent(const Generator& g, Window window, int threads = 1);

struct BorichevTomilovReport {
  ExponentFit frequency_fit;  // on the resolvent envelope, expect +alpha
  ExponentFit time_fit;       // on the decay profile, expect -1/alpha
  double alpha = 0.0;
  double beta = 0.0;
  double product = 0.0;       // alpha * |beta|
  double tolerance = 0.25;
  bool uniform_regime = false;
  bool pass = false;
  std::string verdict;
};

// Measures the resolvent exponent on `freq_window` and the decay exponent on
// `time_window` (40-point log grid) and checks alpha * |beta| against 1.
BorichevTomilovReport check_borichev_tomilov(const Generator& g, Window freq_window, Window time_window,
                                             int threads = 1);

enum class Stability { Uniform, Polynomial, Conservative, Unstable };

std::string to_string(Stability s);

struct StabilityReport {
  Stability classification = Stability::Uniform;
  std::optional<double> alpha_hat;
  double abscissa = 0.0;
  std::string evidence;
  std::optional<ExponentFit> fit;
};

StabilityReport classify_stability(const Generator& g, std::optional<Window> window = std::nullopt,
                                   int threads = 1);

}  // namespace perstab
