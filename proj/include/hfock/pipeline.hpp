#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hfock/homodyne.hpp"

namespace hfock {

/// Data for one pulse slot of a trigger: detector peak and the homodyne
/// voltage at the slot's designated sample time.
struct SlotRecord {
  int slot_index = 0;
  double snspd_peak = 0.0;  // volts
  double hd_value = 0.0;    // volts
};

struct TraceEvent {
  long long trigger_id = 0;
  std::vector<SlotRecord> slots;  // time-ordered
};

/// Peak-voltage thresholds, 0 < v1 < v2. A peak equal to a threshold counts as
/// the higher class.
class ThresholdConfig {
 public:
  ThresholdConfig(double v1, double v2);
  double v1() const { return v1_; }
  double v2() const { return v2_; }

 private:
  double v1_;
  double v2_;
};

struct ShotNoiseCalibration {
  double mean_v = 0.0;
  double sigma_v = 1.0;
};

int classify_pnr(double peak, const ThresholdConfig& cfg);

enum class VetoOutcome { kKept, kKeptTruncatedHistory, kRemoved };

struct VetoDecision {
  std::size_t position = 0;  // index of the two-photon slot in the stream
  VetoOutcome outcome = VetoOutcome::kKept;
};

struct VetoSummary {
  std::vector<VetoDecision> decisions;
  int kept = 0;  // includes truncated-history keeps
  int removed = 0;
  int truncated_history = 0;
};

/// Afterpulse veto over one time-ordered stream of PNR classes. A class-2 slot
/// survives only if the `window` preceding slots are all class 0. Slots too
/// close to the start of the stream are judged on the history that exists and
/// flagged when kept.
VetoSummary veto_two_photon_events(std::span<const int> classes, int window = 2);

/// Sample mean and sample standard deviation of vacuum homodyne voltages.
/// Requires at least 100 values and a non-zero spread.
ShotNoiseCalibration calibrate_shot_noise(std::span<const double> hd_values);

/// Voltage to shot-noise units: (v - mean) / (sigma sqrt 2), vacuum variance 1/2.
double normalize_quadrature(double hd_value, const ShotNoiseCalibration& cal);

struct ExtractionOptions {
  ThresholdConfig thresholds;
  /// nullopt: every slot is emitted, tagged with its class. Otherwise only
  /// slots of that class; class-2 slots must also pass the veto.
  std::optional<int> herald;
  int veto_window = 2;
};

std::vector<QuadratureRecord> extract_quadratures(std::span<const TraceEvent> events,
                                                  const ShotNoiseCalibration& cal,
                                                  const ExtractionOptions& options);

/// Veto totals across all events.
VetoSummary veto_events(std::span<const TraceEvent> events, const ThresholdConfig& thresholds, int window = 2);

/// Per-slot sample variance of normalized quadratures. Requires >= 2 events.
std::vector<std::pair<int, double>> slot_variance_profile(std::span<const TraceEvent> events,
                                                          const ShotNoiseCalibration& cal);

}  // namespace hfock
