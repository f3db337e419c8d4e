#pragma once

#include <cstdint>
#include <vector>

#include "hfock/fock.hpp"
#include "hfock/pipeline.hpp"

namespace hfock {

/// Generator for trigger-event corpora with known ground truth.
///
/// Every trigger carries `slots_per_trigger` slots. The heralded slot holds the
/// given signal state and a detector peak of class `herald_class`; all other
/// slots hold vacuum. Each of the `veto_window` slots preceding the herald is
/// independently contaminated with a class-1 detection with probability
/// `contamination_prob`, which is what the afterpulse veto must catch.
struct SyntheticCorpusConfig {
  int triggers = 10000;
  int slots_per_trigger = 6;
  int herald_slot = 3;
  int herald_class = 2;
  double contamination_prob = 0.0;
  int veto_window = 2;

  double peak_noise = 0.03;  // volts, additive Gaussian on every peak
  double one_photon_peak = 0.5;
  double two_photon_peak = 1.0;

  ShotNoiseCalibration volts{0.012, 0.2};  // true offset and shot-noise sd of the homodyne
};

struct SyntheticCorpus {
  std::vector<TraceEvent> events;
  int planted_contaminations = 0;  // triggers with at least one contaminated slot
  double expected_contaminations = 0.0;
};

/// Contamination probability per preceding slot that makes the expected
/// fraction of vetoed heralds equal `veto_fraction`.
double contamination_prob_for_veto_fraction(double veto_fraction, int window);

SyntheticCorpus generate_trace_corpus(const SyntheticCorpusConfig& cfg, const DensityMatrix& herald_state,
                                      std::uint64_t seed);

/// Vacuum homodyne voltages for shot-noise calibration.
std::vector<double> generate_vacuum_voltages(std::size_t count, const ShotNoiseCalibration& volts,
                                             std::uint64_t seed);

}  // namespace hfock
