#include "hfock/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "hfock/errors.hpp"

namespace hfock {

ThresholdConfig::ThresholdConfig(double v1, double v2) : v1_(v1), v2_(v2) {
  if (!(v1 > 0.0 && v2 > v1) || !std::isfinite(v2)) {
    throw DomainError("thresholds must satisfy 0 < v1 < v2");
  }
}

int classify_pnr(double peak, const ThresholdConfig& cfg) {
  if (peak >= cfg.v2()) return 2;
  if (peak >= cfg.v1()) return 1;
  return 0;
}

VetoSummary veto_two_photon_events(std::span<const int> classes, int window) {
  if (window < 0) throw DomainError("veto window must be >= 0");
  VetoSummary summary;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] != 2) continue;
    const std::size_t lookback = std::min<std::size_t>(i, static_cast<std::size_t>(window));
    bool clean = true;
    for (std::size_t k = 1; k <= lookback; ++k) clean = clean && classes[i - k] == 0;

    VetoDecision decision{i, VetoOutcome::kKept};
    if (!clean) {
      decision.outcome = VetoOutcome::kRemoved;
      ++summary.removed;
    } else {
      if (lookback < static_cast<std::size_t>(window)) {
        decision.outcome = VetoOutcome::kKeptTruncatedHistory;
        ++summary.truncated_history;
      }
      ++summary.kept;
    }
    summary.decisions.push_back(decision);
  }
  return summary;
}

ShotNoiseCalibration calibrate_shot_noise(std::span<const double> hd_values) {
  if (hd_values.size() < 100) {
    throw DomainError("insufficient calibration data: " + std::to_string(hd_values.size()) +
                      " values, need at least 100");
  }
  double mean = 0.0;
  for (double v : hd_values) mean += v;
  mean /= static_cast<double>(hd_values.size());
  double ss = 0.0;
  for (double v : hd_values) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(hd_values.size() - 1));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("insufficient calibration data: zero shot-noise spread");
  }
  return {mean, sigma};
}

double normalize_quadrature(double hd_value, const ShotNoiseCalibration& cal) {
  return (hd_value - cal.mean_v) / (cal.sigma_v * std::numbers::sqrt2);
}

namespace {

std::vector<int> classify_event(const TraceEvent& event, const ThresholdConfig& thresholds) {
  std::vector<int> classes;
  classes.reserve(event.slots.size());
  for (const auto& s : event.slots) classes.push_back(classify_pnr(s.snspd_peak, thresholds));
  return classes;
}

void require_calibration(const ShotNoiseCalibration& cal) {
  if (!(cal.sigma_v > 0.0) || !std::isfinite(cal.mean_v)) throw DomainError("invalid shot-noise calibration");
}

}  // namespace

std::vector<QuadratureRecord> extract_quadratures(std::span<const TraceEvent> events,
                                                  const ShotNoiseCalibration& cal,
                                                  const ExtractionOptions& options) {
  require_calibration(cal);
  std::vector<QuadratureRecord> out;
  for (const auto& event : events) {
    const auto classes = classify_event(event, options.thresholds);
    std::vector<bool> vetoed(classes.size(), false);
    for (const auto& d : veto_two_photon_events(classes, options.veto_window).decisions) {
      if (d.outcome == VetoOutcome::kRemoved) vetoed[d.position] = true;
    }
    for (std::size_t i = 0; i < event.slots.size(); ++i) {
      if (options.herald && classes[i] != *options.herald) continue;
      if (options.herald == 2 && vetoed[i]) continue;
      const auto& s = event.slots[i];
      out.push_back({normalize_quadrature(s.hd_value, cal), 0.0, classes[i], s.slot_index});
    }
  }
  return out;
}

VetoSummary veto_events(std::span<const TraceEvent> events, const ThresholdConfig& thresholds, int window) {
  VetoSummary total;
  for (const auto& event : events) {
    const auto summary = veto_two_photon_events(classify_event(event, thresholds), window);
    total.kept += summary.kept;
    total.removed += summary.removed;
    total.truncated_history += summary.truncated_history;
  }
  return total;
}

std::vector<std::pair<int, double>> slot_variance_profile(std::span<const TraceEvent> events,
                                                          const ShotNoiseCalibration& cal) {
  require_calibration(cal);
  if (events.size() < 2) throw DomainError("slot variance needs at least 2 events");

  struct Moments {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::map<int, Moments> per_slot;
  for (const auto& event : events) {
    for (const auto& s : event.slots) {
      // Welford update
      auto& m = per_slot[s.slot_index];
      const double x = normalize_quadrature(s.hd_value, cal);
      ++m.count;
      const double delta = x - m.mean;
      m.mean += delta / static_cast<double>(m.count);
      m.m2 += delta * (x - m.mean);
    }
  }

  std::vector<std::pair<int, double>> profile;
  for (const auto& [slot, m] : per_slot) {
    if (m.count < 2) throw DomainError("slot " + std::to_string(slot) + " appears in fewer than 2 events");
    profile.emplace_back(slot, m.m2 / static_cast<double>(m.count - 1));
  }
  return profile;
}

}  // namespace hfock
