#include "perstab/march.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "perstab/errors.hpp"
#include "perstab/periodic.hpp"

namespace perstab {

namespace {

constexpr double kImaginaryAxisTol = 1e-8;

class ForcedSystem {
 public:
  ForcedSystem(const Generator& g, const FourierForcing& forcing)
      : a_(g.sparse()), omega_(forcing.omega()), gram_(CMatrix(g.gram().cast<Complex>()).sparseView()) {
    for (const auto& [n, v] : forcing.coeffs) {
      if (v.size() != g.dim()) throw DimensionMismatch("forcing coefficient length does not match generator dim");
      modes_.push_back(n);
      vecs_.push_back(v);
    }
  }

  CVector rhs(double t, const CVector& y) const {
    CVector out = a_ * y;
    for (std::size_t k = 0; k < modes_.size(); ++k) out += std::polar(1.0, modes_[k] * omega_ * t) * vecs_[k];
    return out;
  }

  CVector rk4(double t, const CVector& y, double h) const {
    const CVector k1 = rhs(t, y);
    const CVector k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
    const CVector k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
    const CVector k4 = rhs(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  double energy(const CVector& x) const {
    const double q = x.dot(gram_ * x).real();
    return std::sqrt(std::max(q, 0.0));
  }

 private:
  const CSparse& a_;
  double omega_;
  CSparse gram_;
  std::vector<int> modes_;
  std::vector<CVector> vecs_;
};

double spectral_radius(const Generator& g) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < g.eigenvalues().size(); ++i) r = std::max(r, std::abs(g.eigenvalues()(i)));
  return r;
}

void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  slope = sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

Trajectory integrate_forced(const Generator& g, const FourierForcing& forcing, const CVector& u0, double dt,
                            double horizon, const MarchOptions& options) {
  forcing.validate();
  if (u0.size() != g.dim()) throw DimensionMismatch("initial state length does not match generator dim");
  if (!(dt > 0.0) || !(horizon > 0.0)) throw InvalidSpec("dt and horizon must be positive");
  const double limit = forcing.period / (20.0 * std::max(1, forcing.n_max()));
  if (dt > limit * (1.0 + 1e-12)) {
    throw StepTooLarge("dt=" + std::to_string(dt) + " exceeds T/(20 n_max)=" + std::to_string(limit));
  }
  const long steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  const double h = horizon / static_cast<double>(steps);
  const long every = std::max<long>(1, options.record_every);

  ForcedSystem sys(g, forcing);
  Trajectory traj;
  traj.step = h;
  traj.steps = steps;
  auto record = [&](double t, const CVector& y, double err) {
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.energy.push_back(sys.energy(y));
    traj.error_bound.push_back(err);
  };

  CVector y = u0;
  double err = 0.0;
  record(0.0, y, err);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (long k = 0; k < steps; ++k) {
    const double t = h * static_cast<double>(k);
    if (options.error_control) {
      const CVector full = sys.rk4(t, y, h);
      const CVector half = sys.rk4(t, y, 0.5 * h);
      CVector two = sys.rk4(t + 0.5 * h, half, 0.5 * h);
      err += sys.energy(two - full) / 15.0 + eps * sys.energy(two);
      y = std::move(two);
    } else {
      y = sys.rk4(t, y, h);
    }
    if (!y.allFinite()) throw UnstableGrowth("state overflowed at t=" + std::to_string(t + h));
    if (options.observer) options.observer(h * static_cast<double>(k + 1), y);
    if ((k + 1) % every == 0 || k + 1 == steps) record(h * static_cast<double>(k + 1), y, err);
  }
  return traj;
}

double suggest_step(const Generator& g, double period, int n_max, double safety) {
  // Ten times finer than the hard limit, so the forced response is resolved well
  // below the gaps a convergence run measures.
  const double forced = period / (200.0 * std::max(1, n_max));
  const double rho = spectral_radius(g);
  const double stable = rho > 0.0 ? safety / rho : forced;
  const double target = std::min(forced, stable);
  const double k = std::ceil(period / target - 1e-9);
  return period / k;
}

ConvergenceReport converge_to_periodic(const Generator& g, const FourierForcing& forcing, const CVector& u0,
                                       int k_periods, std::optional<double> dt) {
  if (k_periods < 1) throw InvalidSpec("need at least one period");
  const PeriodicSolution sol = solve_periodic(g, forcing, 1.0);
  ConvergenceReport rep;
  rep.periodic_start = sol.coeffs.empty() ? CVector(CVector::Zero(g.dim()))
                                          : evaluate(sol.coeffs, forcing.omega(), 0.0);

  const double step = dt.value_or(suggest_step(g, forcing.period, forcing.n_max()));
  const long per_period = static_cast<long>(std::llround(forcing.period / step));
  if (std::abs(per_period * step - forcing.period) > 1e-9 * forcing.period) {
    throw InvalidSpec("step must divide the period");
  }
  MarchOptions opts;
  opts.record_every = per_period;
  opts.error_control = false;
  const Trajectory traj = integrate_forced(g, forcing, u0, step, k_periods * forcing.period, opts);
  rep.step = traj.step;
  for (const CVector& y : traj.states) rep.gaps.push_back(energy_norm(g, y - rep.periodic_start));
  rep.contraction = rep.gaps[0] > 0.0 ? rep.gaps[1] / rep.gaps[0] : 0.0;
  rep.terminal_ratio = rep.gaps[0] > 0.0 ? rep.gaps.back() / rep.gaps[0] : 0.0;
  return rep;
}

GrowthReport resonance_demo(const Generator& g, const FourierForcing& forcing, double horizon,
                            const ResonanceOptions& options) {
  forcing.validate();
  GrowthReport rep;
  for (Eigen::Index i = 0; i < g.eigenvalues().size(); ++i) {
    if (std::abs(g.eigenvalues()(i).real()) <= kImaginaryAxisTol) rep.near_imaginary = true;
  }
  if (options.require_imaginary && !rep.near_imaginary) {
    throw NoImaginaryEigenvalue("no eigenvalue of " + g.label() + " within 1e-8 of the imaginary axis");
  }
  if (forcing.n_max() < 1) throw InvalidSpec("resonance demo needs a forcing with a nonzero mode");
  if (options.component >= g.dim()) throw DimensionMismatch("tracked component out of range");

  rep.frequency = forcing.n_max() * forcing.omega();
  const double forcing_period = 2.0 * std::numbers::pi / rep.frequency;
  const double fine = forcing_period / 200.0;
  const double dt = options.dt.value_or(std::min(fine, suggest_step(g, forcing.period, forcing.n_max())));
  const CVector u0 = options.u0.value_or(CVector::Zero(g.dim()));
  if (u0.size() != g.dim()) throw DimensionMismatch("initial state length does not match generator dim");

  const auto periods = static_cast<long>(std::floor(horizon / forcing_period + 1e-9));
  rep.peaks.assign(static_cast<std::size_t>(std::max(0L, periods)), -1.0);
  rep.peak_times.assign(rep.peaks.size(), 0.0);
  const CSparse gram = CMatrix(g.gram().cast<Complex>()).sparseView();
  MarchOptions opts;
  opts.error_control = false;
  opts.record_every = std::numeric_limits<long>::max();
  opts.observer = [&](double t, const CVector& y) {
    const auto k = static_cast<long>(std::floor(t / forcing_period));
    if (k < 0 || k >= periods) return;
    const double amp = options.component >= 0 ? std::abs(y(options.component))
                                              : std::sqrt(std::max(0.0, y.dot(gram * y).real()));
    if (amp > rep.peaks[static_cast<std::size_t>(k)]) {
      rep.peaks[static_cast<std::size_t>(k)] = amp;
      rep.peak_times[static_cast<std::size_t>(k)] = t;
    }
  };
  integrate_forced(g, forcing, u0, dt, horizon, opts);
  if (rep.peaks.size() < 3) throw TooFewPoints("horizon covers fewer than three forcing periods");

  linear_fit(rep.peak_times, rep.peaks, rep.amplitude_slope);
  // Log-log fit skips the first period, where the response is still building up.
  std::vector<double> lt, lp;
  for (std::size_t k = 1; k < rep.peaks.size(); ++k) {
    if (rep.peaks[k] > 0.0 && rep.peak_times[k] > 0.0) {
      lt.push_back(std::log(rep.peak_times[k]));
      lp.push_back(std::log(rep.peaks[k]));
    }
  }
  if (lt.size() >= 2) linear_fit(lt, lp, rep.growth_order);

  double fmax = 0.0;
  const auto samples = synthesize_time_series(forcing.coeffs, std::max(64, 4 * forcing.n_max() + 4));
  for (const auto& f : samples) fmax = std::max(fmax, energy_norm(g, f));
  const std::size_t tail = std::min<std::size_t>(3, rep.peaks.size());
  double last = 0.0;
  for (std::size_t k = rep.peaks.size() - tail; k < rep.peaks.size(); ++k) last += rep.peaks[k];
  rep.amplification = fmax > 0.0 ? last / static_cast<double>(tail) / fmax : 0.0;
  return rep;
}

}  // namespace perstab
