#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "perstab/diagnostics.hpp"
#include "perstab/march.hpp"
#include "perstab/models.hpp"
#include "perstab/periodic.hpp"

namespace perstab::io {

using nlohmann::json;

// Parses JSON text; syntax errors become ParseError with line and column.
json parse_json(const std::string& text, const std::string& source = "<input>");
json read_json_file(const std::filesystem::path& path);

// {"kind": "...", "parameters": {...}}. `diagonal` takes
// parameters.eigenvalues as numbers, [re, im] pairs or {"re", "im"} objects,
// and an optional boolean parameters.invertible.
ModelSpec model_spec_from_json(const json& j);
json to_json(const ModelSpec& spec);

// {"period": T, "modes": [{"n": int, "re": [...], "im": [...]}], "real": bool?}
// or {"period": T, "random": {"seed": int, "n_max": int, "decay": real}}.
// Without "real", real_flag is set when the modes are conjugate symmetric.
FourierForcing forcing_from_json(const json& j, const Generator& g);
json to_json(const FourierForcing& forcing);

// A state vector: [x_0, ...] (real) or {"re": [...], "im": [...]}.
CVector state_from_json(const json& j, Eigen::Index dim);
json to_json(const CVector& state);

json to_json(const ExponentFit& fit);
json to_json(const BorichevTomilovReport& report);
json to_json(const StabilityReport& report);
json to_json(const PeriodicSolution& solution);
json to_json(const LossCertificate& cert);
json to_json(const ConvergenceReport& report);
json to_json(const GrowthReport& report);
json model_summary(const Generator& g);

// Full double precision ("%.17g").
std::string format_double(double v);

std::string profile_csv(const ResolventProfile& profile);
std::string profile_csv(const DecayProfile& profile);
// t,component_0,...  (real parts; the solver guarantees realness for real data).
// With `complex`, each component is written as re_i,im_i instead.
std::string time_series_csv(const std::vector<CVector>& series, double period, bool complex = false);
std::string trajectory_csv(const Trajectory& traj, bool full_state);
std::string gaps_csv(const ConvergenceReport& report, double period);

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace perstab::io
