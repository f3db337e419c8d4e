#include "hfock/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hfock/errors.hpp"

namespace hfock::io {

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("field \"") + key + "\" has the wrong type");
  }
}

}  // namespace

json density_to_json(const DensityMatrix& rho) {
  json re = json::array();
  json im = json::array();
  for (int m = 0; m < rho.dim(); ++m) {
    for (int n = 0; n < rho.dim(); ++n) {
      re.push_back(rho(m, n).real());
      im.push_back(rho(m, n).imag());
    }
  }
  return {{"dim", rho.dim()}, {"re", re}, {"im", im}};
}

DensityMatrix density_from_json(const json& j) {
  const int dim = required<int>(j, "dim");
  const auto re = required<std::vector<double>>(j, "re");
  const auto im = required<std::vector<double>>(j, "im");
  if (dim < 1 || re.size() != static_cast<std::size_t>(dim) * dim || im.size() != re.size()) {
    throw InputError("density matrix arrays do not match dim");
  }
  Eigen::MatrixXcd m(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) m(a, b) = Complex(re[a * dim + b], im[a * dim + b]);
  }
  return DensityMatrix(std::move(m));
}

json scenario_to_json(const HeraldScenario& s) {
  json j = {{"r", s.r()},
            {"eta_i", s.eta_i()},
            {"eta_s", s.eta_s()},
            {"herald_n", s.herald_n()},
            {"n_max", s.cutoff().n_max()}};
  if (!s.label().empty()) j["label"] = s.label();
  return j;
}

HeraldScenario scenario_from_json(const json& j) {
  return HeraldScenario(required<double>(j, "r"), required<double>(j, "eta_i"), required<double>(j, "eta_s"),
                        required<int>(j, "herald_n"), FockCutoff(required<int>(j, "n_max")),
                        j.contains("label") ? required<std::string>(j, "label") : std::string{});
}

json calibration_to_json(const ShotNoiseCalibration& cal) { return {{"mean_v", cal.mean_v}, {"sigma_v", cal.sigma_v}}; }

ShotNoiseCalibration calibration_from_json(const json& j) {
  ShotNoiseCalibration cal{required<double>(j, "mean_v"), required<double>(j, "sigma_v")};
  if (!(cal.sigma_v > 0.0)) throw DomainError("calibration sigma_v must be > 0");
  return cal;
}

json thresholds_to_json(const ThresholdConfig& cfg) { return {{"v1", cfg.v1()}, {"v2", cfg.v2()}}; }

ThresholdConfig thresholds_from_json(const json& j) {
  return ThresholdConfig(required<double>(j, "v1"), required<double>(j, "v2"));
}

json mle_config_to_json(const MleConfig& cfg) {
  return {{"n_max", cfg.cutoff.n_max()},
          {"max_iterations", cfg.max_iterations},
          {"log_likelihood_tolerance", cfg.log_likelihood_tolerance},
          {"phase_insensitive", cfg.phase_insensitive},
          {"bin_width", cfg.bin_width ? json(*cfg.bin_width) : json(nullptr)}};
}

MleConfig mle_config_from_json(const json& j, MleConfig cfg) {
  if (!j.is_object()) throw InputError("MLE config must be a JSON object");
  if (j.contains("n_max")) cfg.cutoff = FockCutoff(required<int>(j, "n_max"));
  if (j.contains("max_iterations")) cfg.max_iterations = required<int>(j, "max_iterations");
  if (j.contains("log_likelihood_tolerance")) {
    cfg.log_likelihood_tolerance = required<double>(j, "log_likelihood_tolerance");
  }
  if (j.contains("phase_insensitive")) cfg.phase_insensitive = required<bool>(j, "phase_insensitive");
  if (j.contains("bin_width")) {
    cfg.bin_width = j.at("bin_width").is_null() ? std::nullopt : std::optional(required<double>(j, "bin_width"));
  }
  cfg.validate();
  return cfg;
}

json mle_report_to_json(const MleResult& result, const MleConfig& cfg) {
  return {{"iterations", result.iterations_used},
          {"log_likelihood", result.final_log_likelihood},
          {"converged", result.converged},
          {"diluted_steps", result.diluted_steps},
          {"config", mle_config_to_json(cfg)}};
}

json bootstrap_to_json(const BootstrapReport& report) {
  return {{"statistic", report.statistic},
          {"replicate_count", report.replicate_count},
          {"used_replicates", report.used_replicates},
          {"excluded_replicates", report.excluded_replicates},
          {"point_estimate", report.point_estimate},
          {"standard_deviation", report.standard_deviation},
          {"ci_low", report.ci_low},
          {"ci_high", report.ci_high},
          {"skew_flag", report.skew_flag},
          {"warnings", report.warnings}};
}

json wigner_sidecar_to_json(const WignerGrid& grid) {
  return {{"min_value", grid.min_value}, {"min_x", grid.min_x}, {"min_p", grid.min_p}};
}

std::string wigner_grid_to_csv(const WignerGrid& grid) {
  std::string out = "x\\p";
  for (double p : grid.p_axis) out += "," + format_real(p);
  out += '\n';
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
    out += format_real(grid.x_axis[i]);
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) out += "," + format_real(grid.values(i, j));
    out += '\n';
  }
  return out;
}

std::string quadratures_to_csv(const std::vector<QuadratureRecord>& records) {
  std::string out = "x,theta,herald_n,slot\n";
  out.reserve(records.size() * 48);
  for (const auto& r : records) {
    out += format_real(r.x) + "," + format_real(r.theta) + "," + std::to_string(r.herald_n) + "," +
           std::to_string(r.slot) + "\n";
  }
  return out;
}

std::vector<QuadratureRecord> quadratures_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("quadrature CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,theta,herald_n,slot") throw InputError("quadrature CSV header must be x,theta,herald_n,slot");

  std::vector<QuadratureRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    QuadratureRecord r;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%d,%d%c", &r.x, &r.theta, &r.herald_n, &r.slot, &tail) != 4 ||
        !std::isfinite(r.x) || !std::isfinite(r.theta)) {
      throw InputError("malformed quadrature CSV line " + std::to_string(line_no));
    }
    records.push_back(r);
  }
  return records;
}

std::string events_to_jsonl(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    json slots = json::array();
    for (const auto& s : e.slots) {
      slots.push_back({{"slot", s.slot_index}, {"snspd_peak", s.snspd_peak}, {"hd_value", s.hd_value}});
    }
    out += json{{"trigger_id", e.trigger_id}, {"slots", slots}}.dump() + "\n";
  }
  return out;
}

std::vector<TraceEvent> events_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<TraceEvent> events;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      TraceEvent event;
      event.trigger_id = required<long long>(j, "trigger_id");
      const json& slots = j.at("slots");
      if (!slots.is_array()) throw InputError("slots must be an array");
      for (const auto& s : slots) {
        SlotRecord rec{required<int>(s, "slot"), required<double>(s, "snspd_peak"), required<double>(s, "hd_value")};
        if (!std::isfinite(rec.snspd_peak) || !std::isfinite(rec.hd_value)) throw InputError("non-finite voltage");
        event.slots.push_back(rec);
      }
      events.push_back(std::move(event));
    } catch (const std::exception& e) {
      throw InputError("malformed event on line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (events.empty()) throw InputError("event file contains no events");
  return events;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << contents;
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

}  // namespace hfock::io
