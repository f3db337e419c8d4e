#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfock/analysis.hpp"
#include "hfock/fock.hpp"
#include "hfock/herald.hpp"
#include "hfock/homodyne.hpp"
#include "hfock/pipeline.hpp"
#include "hfock/tomography.hpp"

namespace hfock::io {

using nlohmann::json;

// Density matrix: {"dim": int, "re": [...], "im": [...]}, row-major.
json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const json& j);

// Scenario: {"r", "eta_i", "eta_s", "herald_n", "n_max", optional "label"}.
json scenario_to_json(const HeraldScenario& s);
HeraldScenario scenario_from_json(const json& j);

json calibration_to_json(const ShotNoiseCalibration& cal);
ShotNoiseCalibration calibration_from_json(const json& j);

json thresholds_to_json(const ThresholdConfig& cfg);
ThresholdConfig thresholds_from_json(const json& j);

json mle_config_to_json(const MleConfig& cfg);
/// Missing keys keep their defaults.
MleConfig mle_config_from_json(const json& j, MleConfig defaults = {});

/// {"iterations", "log_likelihood", "converged", "diluted_steps", "config"}.
json mle_report_to_json(const MleResult& result, const MleConfig& cfg);

json bootstrap_to_json(const BootstrapReport& report);

/// {"min_value", "min_x", "min_p"}
json wigner_sidecar_to_json(const WignerGrid& grid);

/// First row "x\p" followed by the p axis; each further row is x then W(x, p_j).
std::string wigner_grid_to_csv(const WignerGrid& grid);

/// Header `x,theta,herald_n,slot`; reals with 17 significant digits.
std::string quadratures_to_csv(const std::vector<QuadratureRecord>& records);
std::vector<QuadratureRecord> quadratures_from_csv(const std::string& text);

/// One TraceEvent per line:
/// {"trigger_id": int, "slots": [{"slot": int, "snspd_peak": real, "hd_value": real}, ...]}.
std::string events_to_jsonl(const std::vector<TraceEvent>& events);
/// Throws InputError naming the 1-based line number of the first malformed line.
std::vector<TraceEvent> events_from_jsonl(const std::string& text);

std::string read_file(const std::filesystem::path& path);
json read_json_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace hfock::io
