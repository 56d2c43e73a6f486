#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "perstab/fourier.hpp"
#include "perstab/generator.hpp"

namespace perstab {

struct Trajectory {
  std::vector<double> times;
  std::vector<CVector> states;
  std::vector<double> energy;       // ||state||_H
  std::vector<double> error_bound;  // accumulated local error estimate at each recorded time
  double step = 0.0;                // step actually used (horizon / steps)
  long steps = 0;
};

struct MarchOptions {
  // Record every k-th step (the final state is always recorded).
  long record_every = 1;
  // Step-halving error estimate; triples the cost per step.
  bool error_control = true;
  // Called after every step with (t, U(t)), recorded or not.
  std::function<void(double, const CVector&)> observer;
};

// Classical RK4 on U' = A U + F(t), F(t) = sum_n F_n e^{i n omega t}, from U(0) = u0.
// The step is shrunk to horizon / ceil(horizon / dt). With error control each
// step is taken once with dt and twice with dt/2; the half-step result is kept
// and |difference| / 15 (plus an eps*|U| roundoff floor) is its local error.
//
// Throws StepTooLarge if dt > T / (20 max(1, n_max)), UnstableGrowth on overflow.
Trajectory integrate_forced(const Generator& g, const FourierForcing& forcing, const CVector& u0, double dt,
                            double horizon, const MarchOptions& options = {});

// Largest step T/k with dt <= T / (200 max(1, n_max)) (ten times inside the
// StepTooLarge limit) and dt * rho(A) <= safety.
double suggest_step(const Generator& g, double period, int n_max, double safety = 0.5);

struct ConvergenceReport {
  std::vector<double> gaps;     // ||U(jT) - U_F(0)||_H, j = 0..k
  CVector periodic_start;       // U_F(0) from the Fourier solver
  double contraction = 0.0;     // gaps[1] / gaps[0]
  double terminal_ratio = 0.0;  // gaps[k] / gaps[0]
  double step = 0.0;
};

// Marches k_periods from u0 and samples the gap to the Fourier periodic orbit at
// every period boundary.
ConvergenceReport converge_to_periodic(const Generator& g, const FourierForcing& forcing, const CVector& u0,
                                       int k_periods, std::optional<double> dt = std::nullopt);

struct ResonanceOptions {
  // Require an eigenvalue within 1e-8 of iR (else NoImaginaryEigenvalue).
  bool require_imaginary = true;
  // Track |U_component| instead of ||U||_H when >= 0.
  int component = -1;
  std::optional<double> dt;
  std::optional<CVector> u0;
};

struct GrowthReport {
  double frequency = 0.0;         // n_max * omega of the forcing
  std::vector<double> peak_times;
  std::vector<double> peaks;      // per-forcing-period maxima of the tracked amplitude
  double amplitude_slope = 0.0;   // linear regression of peaks on time
  double growth_order = 0.0;      // log-log regression of peaks on time
  double amplification = 0.0;     // mean of the last three peaks / max_t ||F(t)||_H
  bool near_imaginary = false;
};

GrowthReport resonance_demo(const Generator& g, const FourierForcing& forcing, double horizon,
                            const ResonanceOptions& options = {});

}  // namespace perstab
