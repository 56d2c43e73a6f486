// perstab: command-line front end. JSON in, JSON/CSV out, plus a manifest of
// SHA-256 digests for every file written.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "perstab/diagnostics.hpp"
#include "perstab/errors.hpp"
#include "perstab/io.hpp"
#include "perstab/march.hpp"
#include "perstab/models.hpp"
#include "perstab/periodic.hpp"

#ifndef PERSTAB_VERSION
#define PERSTAB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace perstab;
using io::json;

namespace {

// Anything that escapes as a plain std::exception.
constexpr int kInternalExit = 13;

const char* kExitCodes = R"(Exit codes:
   0  success
   1  usage error (bad flags, missing --seed for a randomized command)
   2  parse error (malformed JSON, reported as file:line:column)
   3  invalid spec (unknown model, bad parameter, broken forcing)
   4  dimension mismatch
   5  singular generator (0 in the spectrum where A^{-1} is needed)
   6  resonant frequency (probe point on the spectrum)
   7  lattice resonance (forcing mode n with i n omega in the spectrum)
   8  unstable growth (overflow or non-finite result)
   9  step too large for the forced modes
  10  too few points (grid, fit window or horizon)
  11  no eigenvalue on the imaginary axis
  12  I/O error
  13  internal error)";

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& msg) : Error(ErrorCode::Usage, msg) {}
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

struct Globals {
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

// Collects inputs and outputs of one command and writes the manifest last.
class Run {
 public:
  Run(const Globals& globals, std::string command) : globals_(globals), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(globals_.out, ec);
    if (ec) throw IoError("cannot create output directory " + globals_.out + ": " + ec.message());
  }

  json read_input(const fs::path& path) {
    const std::string text = slurp(path);
    inputs_.push_back({{"path", path.string()}, {"sha256", sha256_hex(text)}});
    return io::parse_json(text, path.string());
  }

  void write(const std::string& name, const std::string& contents) {
    io::write_atomic(fs::path(globals_.out) / name, contents);
    outputs_.push_back({{"file", name}, {"sha256", sha256_hex(contents)}, {"bytes", contents.size()}});
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  json& parameters() { return parameters_; }
  void set_model(const json& spec) { model_ = spec; }

  void finish() {
    const json manifest = {{"tool", "perstab"},
                           {"version", PERSTAB_VERSION},
                           {"command", command_},
                           {"model", model_},
                           {"parameters", parameters_},
                           {"seed", globals_.seed ? json(*globals_.seed) : json(nullptr)},
                           {"inputs", inputs_},
                           {"outputs", outputs_}};
    io::write_atomic(fs::path(globals_.out) / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  const Globals& globals_;
  std::string command_;
  json parameters_ = json::object();
  json model_ = nullptr;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

Generator load_model(Run& run, const std::string& path) {
  const json j = run.read_input(path);
  const ModelSpec spec = io::model_spec_from_json(j);
  run.set_model(io::to_json(spec));
  return make_model(spec);
}

std::uint64_t require_seed(const Globals& globals, const std::string& why) {
  if (!globals.seed) throw UsageError(why + " is randomized and needs an explicit --seed");
  return *globals.seed;
}

// A "random" forcing block takes its seed from --seed when it has none of its own.
FourierForcing load_forcing(Run& run, const Globals& globals, const std::string& path, const Generator& g) {
  json j = run.read_input(path);
  if (j.is_object() && j.contains("random") && j["random"].is_object() && !j["random"].contains("seed")) {
    j["random"]["seed"] = require_seed(globals, "a random forcing without a seed");
  }
  run.parameters()["forcing"] = j;
  return io::forcing_from_json(j, g);
}

// Fitted resolvent exponent, or 0 when the model has none (uniform, conservative, unstable).
std::pair<double, std::string> fitted_alpha(const Generator& g, int threads) {
  const StabilityReport rep = classify_stability(g, std::nullopt, threads);
  if (rep.alpha_hat && rep.classification == Stability::Polynomial) return {*rep.alpha_hat, "fitted"};
  return {0.0, "default (" + to_string(rep.classification) + " model)"};
}

std::vector<double> make_grid(const std::string& kind, double lo, double hi, int points) {
  if (kind == "log") return log_grid(lo, hi, points);
  if (kind == "linear") {
    if (!(hi > lo) || points < 2) throw InvalidSpec("linear grid needs lo < hi and points >= 2");
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) grid.push_back(lo + (hi - lo) * i / (points - 1));
    return grid;
  }
  throw InvalidSpec("unknown grid '" + kind + "'");
}

json fit_or_null(const std::function<ExponentFit()>& fit, std::string& note) {
  try {
    return io::to_json(fit());
  } catch (const TooFewPoints& e) {
    note = e.what();
    return nullptr;
  }
}

// ---- subcommands ----

struct ModelArgs {
  std::string spec;
};

void cmd_model(const Globals& globals, const ModelArgs& a) {
  Run run(globals, "model");
  const Generator g = load_model(run, a.spec);
  json summary = io::model_summary(g);
  summary["stability"] = io::to_json(classify_stability(g, std::nullopt, globals.threads));
  run.write_json("model.json", summary);
  run.finish();
}

struct ProbeArgs {
  std::string spec;
  bool resolvent = false;
  bool decay = false;
  std::string grid;
  std::optional<double> lo, hi;
  int points = 40;
  bool bt = false;
  double time_lo = 10.0, time_hi = 1000.0;
};

void cmd_probe(const Globals& globals, const ProbeArgs& a) {
  if (a.resolvent == a.decay) throw UsageError("probe needs exactly one of --resolvent or --decay");
  Run run(globals, "probe");
  const Generator g = load_model(run, a.spec);
  json& p = run.parameters();
  json out;
  std::string note;

  if (a.resolvent) {
    const Window dw = default_frequency_window(g);
    const Window w{a.lo.value_or(dw.lo), a.hi.value_or(dw.hi)};
    const std::string grid = a.grid.empty() ? "peaks" : a.grid;
    p = {{"probe", "resolvent"}, {"grid", grid}, {"lo", w.lo}, {"hi", w.hi}};
    ResolventProfile prof;
    if (grid == "peaks") {
      prof = probe_resolvent(g, w, globals.threads);
    } else {
      p["points"] = a.points;
      prof = sample_resolvent(g, make_grid(grid, w.lo, w.hi, a.points), globals.threads);
    }
    run.write("resolvent.csv", io::profile_csv(prof));
    const ResolventProfile env = prof.envelope();
    out = {{"probe", "resolvent"},
           {"window_lo", w.lo},
           {"window_hi", w.hi},
           {"resonant", prof.resonant},
           {"fit", fit_or_null([&] { return fit_exponent(env, w); }, note)}};
  } else {
    const Window w{a.lo.value_or(1.0), a.hi.value_or(100.0)};
    const std::string grid = a.grid.empty() ? "log" : a.grid;
    if (grid == "peaks") throw UsageError("--grid peaks applies to --resolvent only");
    p = {{"probe", "decay"}, {"grid", grid}, {"lo", w.lo}, {"hi", w.hi}, {"points", a.points}};
    const DecayProfile prof = sample_decay(g, make_grid(grid, w.lo, w.hi, a.points), globals.threads);
    run.write("decay.csv", io::profile_csv(prof));
    out = {{"probe", "decay"},
           {"window_lo", w.lo},
           {"window_hi", w.hi},
           {"fit", fit_or_null([&] { return fit_exponent(prof, w); }, note)}};
  }
  if (!note.empty()) out["note"] = note;
  out["stability"] = io::to_json(classify_stability(g, std::nullopt, globals.threads));
  run.write_json("fit.json", out);

  if (a.bt) {
    const Window dw = default_frequency_window(g);
    const Window fw{a.resolvent ? a.lo.value_or(dw.lo) : dw.lo, a.resolvent ? a.hi.value_or(dw.hi) : dw.hi};
    p["bt"] = {{"freq_lo", fw.lo}, {"freq_hi", fw.hi}, {"time_lo", a.time_lo}, {"time_hi", a.time_hi}};
    run.write_json("bt.json",
                   io::to_json(check_borichev_tomilov(g, fw, {a.time_lo, a.time_hi}, globals.threads)));
  }
  run.finish();
}

struct SolveArgs {
  std::string spec, forcing;
  double m = 1.0;
  std::optional<double> alpha;
  std::optional<int> samples;
};

void cmd_solve(const Globals& globals, const SolveArgs& a) {
  Run run(globals, "solve");
  const Generator g = load_model(run, a.spec);
  const FourierForcing f = load_forcing(run, globals, a.forcing, g);
  const auto [alpha, source] = a.alpha ? std::pair{*a.alpha, std::string("given")} : fitted_alpha(g, globals.threads);
  const int samples = a.samples.value_or(8 * (f.n_max() + 1));
  run.parameters().update({{"m", a.m}, {"alpha", alpha}, {"alpha_source", source}, {"samples", samples}});

  const PeriodicSolution sol = solve_periodic(g, f, a.m, alpha, globals.threads);
  json j = io::to_json(sol);
  j["alpha_source"] = source;
  const bool real = f.real_flag && g.is_real();
  j["real"] = real;
  run.write_json("solution.json", j);

  std::vector<CVector> series;
  if (sol.coeffs.empty()) {
    series.assign(static_cast<std::size_t>(samples), CVector::Zero(g.dim()));
  } else {
    series = synthesize_time_series(sol.coeffs, samples);
  }
  if (real) real_series(series);
  run.write("series.csv", io::time_series_csv(series, f.period, !real));
  run.finish();
}

struct VerifyArgs {
  std::string spec;
  double m = 1.0;
  std::optional<double> alpha;
  int trials = 100;
  int n_max = 64;
  double period = 2.0;
};

void cmd_verify(const Globals& globals, const VerifyArgs& a) {
  const std::uint64_t seed = require_seed(globals, "verify");
  Run run(globals, "verify");
  const Generator g = load_model(run, a.spec);
  const auto [alpha, source] = a.alpha ? std::pair{*a.alpha, std::string("given")} : fitted_alpha(g, globals.threads);
  run.parameters() = {{"m", a.m},         {"alpha", alpha},   {"alpha_source", source},
                      {"trials", a.trials}, {"n_max", a.n_max}, {"period", a.period}};
  const LossCertificate cert = verify_loss_estimate(g, alpha, a.m, a.trials, seed, {a.period, a.n_max, globals.threads});
  json j = io::to_json(cert);
  j["alpha_source"] = source;
  run.write_json("certificate.json", j);
  run.finish();
}

struct MarchArgs {
  std::string spec, forcing;
  int periods = 50;
  std::string u0 = "zero";
  std::optional<double> dt;
  double tol = 1e-3;
};

CVector initial_state(Run& run, const Globals& globals, const std::string& u0, const Generator& g) {
  if (u0 == "zero") return CVector::Zero(g.dim());
  if (u0 == "random") {
    std::mt19937_64 rng(require_seed(globals, "--u0 random"));
    std::normal_distribution<double> nd;
    CVector x(g.dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(nd(rng), g.is_real() ? 0.0 : nd(rng));
    return x / energy_norm(g, x);
  }
  return io::state_from_json(run.read_input(u0), g.dim());
}

void cmd_march(const Globals& globals, const MarchArgs& a) {
  Run run(globals, "march");
  const Generator g = load_model(run, a.spec);
  const FourierForcing f = load_forcing(run, globals, a.forcing, g);
  const CVector u0 = initial_state(run, globals, a.u0, g);
  run.parameters().update({{"periods", a.periods}, {"u0", a.u0}, {"tolerance", a.tol}});
  if (a.dt) run.parameters()["dt"] = *a.dt;

  const ConvergenceReport rep = converge_to_periodic(g, f, u0, a.periods, a.dt);
  run.write("gaps.csv", io::gaps_csv(rep, f.period));

  json j = io::to_json(rep);
  std::string verdict;
  if (rep.gaps.front() == 0.0 || rep.terminal_ratio < a.tol) {
    verdict = "converged";
  } else if (rep.gaps.back() < rep.gaps.front()) {
    verdict = "contracting";
  } else {
    verdict = "not contracting";
  }
  j["tolerance"] = a.tol;
  j["verdict"] = verdict;
  j["periodic_start"] = io::to_json(rep.periodic_start);
  run.write_json("convergence.json", j);
  run.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perstab: resolvent, decay and periodic-forcing diagnostics for linear evolution equations"};
  app.footer(kExitCodes);
  app.set_version_flag("--version", PERSTAB_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  app.add_option("--out", globals.out, "Output directory (created if missing)");
  app.add_option("--seed", globals.seed, "Seed for randomized commands (required by them)");
  app.add_option("--threads", globals.threads, "Worker threads")->check(CLI::PositiveNumber);

  ModelArgs model;
  auto* model_cmd = app.add_subcommand("model", "Summarize a model spec: dim, abscissa, flags, stability");
  model_cmd->add_option("spec", model.spec, "Model spec JSON")->required();

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "Sample the resolvent or decay profile and fit its exponent");
  probe_cmd->add_option("spec", probe.spec, "Model spec JSON")->required();
  probe_cmd->add_flag("--resolvent", probe.resolvent, "s -> ||(isI - A)^{-1}||_H");
  probe_cmd->add_flag("--decay", probe.decay, "t -> ||e^{tA} A^{-1}||_H");
  probe_cmd->add_option("--grid", probe.grid, "peaks (resolvent default), log (decay default) or linear")
      ->check(CLI::IsMember({"peaks", "log", "linear"}));
  probe_cmd->add_option("--lo", probe.lo, "Window start (resolvent: model default, decay: 1)");
  probe_cmd->add_option("--hi", probe.hi, "Window end (resolvent: model default, decay: 100)");
  probe_cmd->add_option("--points", probe.points, "Grid points for log/linear grids")->capture_default_str();
  probe_cmd->add_flag("--bt", probe.bt, "Also write bt.json (resolvent vs decay exponent consistency)");
  probe_cmd->add_option("--time-lo", probe.time_lo, "Decay window start for --bt")->capture_default_str();
  probe_cmd->add_option("--time-hi", probe.time_hi, "Decay window end for --bt")->capture_default_str();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Periodic solution of U' = AU + F mode by mode");
  solve_cmd->add_option("spec", solve.spec, "Model spec JSON")->required();
  solve_cmd->add_option("forcing", solve.forcing, "Forcing JSON")->required();
  solve_cmd->add_option("--m", solve.m, "Sobolev index of the solution norm (>= 1)")->capture_default_str();
  solve_cmd->add_option("--alpha", solve.alpha, "Loss exponent (default: fitted from the resolvent)");
  solve_cmd->add_option("--samples", solve.samples, "Time samples per period in series.csv");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Certify ||U||_{H^m} <= C ||F||_{H^{m+alpha}} on random forcings");
  verify_cmd->add_option("spec", verify.spec, "Model spec JSON")->required();
  verify_cmd->add_option("--m", verify.m, "Sobolev index")->capture_default_str();
  verify_cmd->add_option("--alpha", verify.alpha, "Loss exponent (default: fitted from the resolvent)");
  verify_cmd->add_option("--trials", verify.trials, "Random forcings")->capture_default_str();
  verify_cmd->add_option("--n-max", verify.n_max, "Largest forced mode")->capture_default_str();
  verify_cmd->add_option("--period", verify.period, "Forcing period T")->capture_default_str();

  MarchArgs march;
  auto* march_cmd = app.add_subcommand("march", "Time-march from U0 and track the gap to the periodic orbit");
  march_cmd->add_option("spec", march.spec, "Model spec JSON")->required();
  march_cmd->add_option("forcing", march.forcing, "Forcing JSON")->required();
  march_cmd->add_option("--periods", march.periods, "Periods to march")->capture_default_str();
  march_cmd->add_option("--u0", march.u0, "zero, random (needs --seed) or a state JSON file")->capture_default_str();
  march_cmd->add_option("--dt", march.dt, "Time step (must divide the period; default: automatic)");
  march_cmd->add_option("--tol", march.tol, "Gap ratio counted as converged")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCode::Usage);
  }

  try {
    if (model_cmd->parsed()) cmd_model(globals, model);
    if (probe_cmd->parsed()) cmd_probe(globals, probe);
    if (solve_cmd->parsed()) cmd_solve(globals, solve);
    if (verify_cmd->parsed()) cmd_verify(globals, verify);
    if (march_cmd->parsed()) cmd_march(globals, march);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalExit;
  }
  return 0;
}
