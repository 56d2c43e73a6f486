#include "perstab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "perstab/errors.hpp"

namespace perstab::io {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Complex parse_complex(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  if (v.is_object() && v.contains("re")) return {v.at("re").get<double>(), v.value("im", 0.0)};
  throw InvalidSpec("eigenvalue must be a number, [re, im] or {\"re\", \"im\"}");
}

CVector parse_vector(const json& re, const json* im) {
  if (!re.is_array()) throw InvalidSpec("mode 're' must be an array");
  CVector v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<Eigen::Index>(i)) = re[i].get<double>();
  if (im) {
    if (!im->is_array() || im->size() != re.size()) throw DimensionMismatch("mode 'im' length differs from 're'");
    for (std::size_t i = 0; i < im->size(); ++i) v(static_cast<Eigen::Index>(i)) += Complex(0.0, (*im)[i].get<double>());
  }
  return v;
}

json vector_parts(const CVector& v) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

json window_json(Window w) { return {{"lo", w.lo}, {"hi", w.hi}}; }

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min(text.size(), e.byte == 0 ? 0 : e.byte - 1);
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) { return parse_json(slurp(path), path.string()); }

ModelSpec model_spec_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("kind")) throw InvalidSpec("model spec needs a \"kind\" field");
    ModelSpec spec;
    spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("parameters")) {
      const json& p = j.at("parameters");
      if (!p.is_object()) throw InvalidSpec("\"parameters\" must be an object");
      for (const auto& [key, value] : p.items()) {
        if (key == "eigenvalues") {
          if (!value.is_array()) throw InvalidSpec("\"eigenvalues\" must be an array");
          for (const auto& e : value) spec.eigenvalues.push_back(parse_complex(e));
        } else if (value.is_boolean()) {
          spec.parameters[key] = value.get<bool>() ? 1.0 : 0.0;
        } else if (value.is_number()) {
          spec.parameters[key] = value.get<double>();
        } else {
          throw InvalidSpec("parameter '" + key + "' must be numeric or boolean");
        }
      }
    }
    return spec;
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("malformed model spec: ") + e.what());
  }
}

json to_json(const ModelSpec& spec) {
  json p = json::object();
  for (const auto& [k, v] : spec.parameters) p[k] = v;
  if (!spec.eigenvalues.empty()) {
    json ev = json::array();
    for (const Complex& z : spec.eigenvalues) ev.push_back({z.real(), z.imag()});
    p["eigenvalues"] = ev;
  }
  return {{"kind", to_string(spec.kind)}, {"parameters", p}};
}

FourierForcing forcing_from_json(const json& j, const Generator& g) {
  try {
    if (!j.is_object() || !j.contains("period")) throw InvalidSpec("forcing needs a \"period\" field");
    const double period = j.at("period").get<double>();
    if (j.contains("random")) {
      const json& r = j.at("random");
      const auto seed = r.at("seed").get<std::uint64_t>();
      const int n_max = r.at("n_max").get<int>();
      const double decay = r.value("decay", 2.0);
      FourierForcing f = random_forcing(g, period, n_max, decay, seed);
      f.validate();
      return f;
    }
    FourierForcing f;
    f.period = period;
    if (j.contains("modes")) {
      for (const auto& m : j.at("modes")) {
        const int n = m.at("n").get<int>();
        const json* im = m.contains("im") ? &m.at("im") : nullptr;
        CVector v = parse_vector(m.at("re"), im);
        if (v.size() != g.dim()) {
          throw DimensionMismatch("mode " + std::to_string(n) + " has length " + std::to_string(v.size()) +
                                  ", generator dim is " + std::to_string(g.dim()));
        }
        if (!f.coeffs.emplace(n, std::move(v)).second) throw InvalidSpec("duplicate mode " + std::to_string(n));
      }
    }
    f.real_flag = j.contains("real") ? j.at("real").get<bool>() : conjugate_symmetric(f.coeffs);
    f.validate();
    return f;
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("malformed forcing: ") + e.what());
  }
}

json to_json(const FourierForcing& forcing) {
  json modes = json::array();
  for (const auto& [n, v] : forcing.coeffs) {
    json m = vector_parts(v);
    m["n"] = n;
    modes.push_back(m);
  }
  return {{"period", forcing.period}, {"real", forcing.real_flag}, {"modes", modes}};
}

CVector state_from_json(const json& j, Eigen::Index dim) {
  try {
    CVector v;
    if (j.is_array()) {
      v = parse_vector(j, nullptr);
    } else if (j.is_object() && j.contains("re")) {
      v = parse_vector(j.at("re"), j.contains("im") ? &j.at("im") : nullptr);
    } else {
      throw InvalidSpec("state must be an array or {\"re\": [...], \"im\": [...]}");
    }
    if (v.size() != dim) {
      throw DimensionMismatch("state has length " + std::to_string(v.size()) + ", generator dim is " +
                              std::to_string(dim));
    }
    return v;
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("malformed state: ") + e.what());
  }
}

json to_json(const CVector& state) { return vector_parts(state); }

json to_json(const ExponentFit& fit) {
  return {{"exponent", fit.exponent},   {"constant", fit.constant},   {"window_lo", fit.window.lo},
          {"window_hi", fit.window.hi}, {"r_squared", fit.r_squared}, {"samples", fit.samples}};
}

json to_json(const BorichevTomilovReport& r) {
  return {{"frequency_fit", to_json(r.frequency_fit)},
          {"time_fit", to_json(r.time_fit)},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"product", r.product},
          {"tolerance", r.tolerance},
          {"uniform_regime", r.uniform_regime},
          {"pass", r.pass},
          {"verdict", r.verdict}};
}

json to_json(const StabilityReport& r) {
  json j = {{"classification", to_string(r.classification)},
            {"abscissa", r.abscissa},
            {"evidence", r.evidence},
            {"alpha_hat", r.alpha_hat ? json(*r.alpha_hat) : json(nullptr)}};
  if (r.fit) j["fit"] = to_json(*r.fit);
  return j;
}

json to_json(const PeriodicSolution& s) {
  json modes = json::array();
  for (const auto& [n, v] : s.coeffs) {
    json m = vector_parts(v);
    m["n"] = n;
    m["residual"] = s.residuals.at(n);
    modes.push_back(m);
  }
  json norms = json::object();
  for (const auto& [idx, v] : s.norms) norms[format_double(idx)] = v;
  json j = {{"period", s.period}, {"m", s.m}, {"norms", norms}, {"modes", modes}};
  j["alpha"] = s.alpha ? json(*s.alpha) : json(nullptr);
  j["forcing_norm"] = s.forcing_norm ? json(*s.forcing_norm) : json(nullptr);
  j["loss_ratio"] = s.loss_ratio ? json(*s.loss_ratio) : json(nullptr);
  return j;
}

json to_json(const LossCertificate& c) {
  return {{"m", c.m},
          {"alpha", c.alpha},
          {"period", c.period},
          {"n_max", c.n_max},
          {"trials", c.trials},
          {"seed", c.seed},
          {"max_ratio", c.max_ratio},
          {"lattice_constant", c.lattice_constant},
          {"tail_bound", c.tail_bound},
          {"ratios", c.ratios}};
}

json to_json(const ConvergenceReport& r) {
  return {{"gaps", r.gaps},
          {"contraction", r.contraction},
          {"terminal_ratio", r.terminal_ratio},
          {"step", r.step}};
}

json to_json(const GrowthReport& r) {
  return {{"frequency", r.frequency},
          {"amplitude_slope", r.amplitude_slope},
          {"growth_order", r.growth_order},
          {"amplification", r.amplification},
          {"near_imaginary", r.near_imaginary},
          {"peak_times", r.peak_times},
          {"peaks", r.peaks}};
}

json model_summary(const Generator& g) {
  json flags = json::array();
  for (const auto& f : g.flags()) flags.push_back(f);
  json meta = json::object();
  for (const auto& [k, v] : g.metadata()) meta[k] = v;
  const Window w = default_frequency_window(g);
  return {{"label", g.label()},
          {"dim", g.dim()},
          {"abscissa", g.abscissa()},
          {"operator_norm", g.operator_norm()},
          {"invertible", g.invertible()},
          {"dissipativity_defect", g.dissipativity_defect()},
          {"flags", flags},
          {"metadata", meta},
          {"default_window", window_json(w)}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string profile_csv(const ResolventProfile& p) {
  std::string out = "s,norm\n";
  for (std::size_t i = 0; i < p.s.size(); ++i) out += format_double(p.s[i]) + "," + format_double(p.norm[i]) + "\n";
  return out;
}

std::string profile_csv(const DecayProfile& p) {
  std::string out = "t,norm\n";
  for (std::size_t i = 0; i < p.t.size(); ++i) out += format_double(p.t[i]) + "," + format_double(p.norm[i]) + "\n";
  return out;
}

std::string time_series_csv(const std::vector<CVector>& series, double period, bool complex) {
  std::string out = "t";
  const Eigen::Index d = series.empty() ? 0 : series.front().size();
  for (Eigen::Index c = 0; c < d; ++c) {
    const std::string i = std::to_string(c);
    out += complex ? ",re_" + i + ",im_" + i : ",component_" + i;
  }
  out += "\n";
  const auto s = static_cast<double>(series.size());
  for (std::size_t j = 0; j < series.size(); ++j) {
    out += format_double(period * static_cast<double>(j) / s);
    for (Eigen::Index c = 0; c < d; ++c) {
      out += "," + format_double(series[j](c).real());
      if (complex) out += "," + format_double(series[j](c).imag());
    }
    out += "\n";
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj, bool full_state) {
  std::string out = "t,energy";
  const Eigen::Index d = traj.states.empty() ? 0 : traj.states.front().size();
  if (full_state) {
    for (Eigen::Index c = 0; c < d; ++c) out += ",component_" + std::to_string(c);
  }
  out += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_double(traj.times[i]) + "," + format_double(traj.energy[i]);
    if (full_state) {
      for (Eigen::Index c = 0; c < d; ++c) out += "," + format_double(traj.states[i](c).real());
    }
    out += "\n";
  }
  return out;
}

std::string gaps_csv(const ConvergenceReport& report, double period) {
  std::string out = "period,t,gap\n";
  for (std::size_t j = 0; j < report.gaps.size(); ++j) {
    out += std::to_string(j) + "," + format_double(period * static_cast<double>(j)) + "," +
           format_double(report.gaps[j]) + "\n";
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace perstab::io
