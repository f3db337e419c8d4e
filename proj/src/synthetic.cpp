#include "hfock/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hfock/errors.hpp"
#include "hfock/random.hpp"

namespace hfock {

namespace {

double volts_from_quadrature(double x, const ShotNoiseCalibration& volts) {
  return volts.mean_v + x * volts.sigma_v * std::numbers::sqrt2;
}

}  // namespace

double contamination_prob_for_veto_fraction(double veto_fraction, int window) {
  if (!(veto_fraction >= 0.0 && veto_fraction < 1.0) || window < 1) {
    throw DomainError("veto fraction must lie in [0, 1) with window >= 1");
  }
  return 1.0 - std::pow(1.0 - veto_fraction, 1.0 / window);
}

SyntheticCorpus generate_trace_corpus(const SyntheticCorpusConfig& cfg, const DensityMatrix& herald_state,
                                      std::uint64_t seed) {
  if (cfg.triggers < 0 || cfg.slots_per_trigger < 1 || cfg.herald_slot < 0 ||
      cfg.herald_slot >= cfg.slots_per_trigger || cfg.herald_class < 0 || cfg.herald_class > 2 ||
      !(cfg.contamination_prob >= 0.0 && cfg.contamination_prob <= 1.0) || cfg.veto_window < 0) {
    throw DomainError("invalid synthetic corpus configuration");
  }

  Rng peak_rng(derive_seed(seed, 0));
  Rng hd_rng(derive_seed(seed, 1));
  const QuadratureSampler herald_sampler(herald_state, FixedPhase{0.0});
  const QuadratureSampler vacuum_sampler(DensityMatrix::vacuum(FockCutoff(0)), FixedPhase{0.0});

  const double class_peak[3] = {0.0, cfg.one_photon_peak, cfg.two_photon_peak};
  const int lookback = std::min(cfg.veto_window, cfg.herald_slot);

  SyntheticCorpus corpus;
  corpus.events.reserve(cfg.triggers);
  for (int t = 0; t < cfg.triggers; ++t) {
    std::vector<int> classes(cfg.slots_per_trigger, 0);
    classes[cfg.herald_slot] = cfg.herald_class;
    bool contaminated = false;
    for (int k = 1; k <= lookback; ++k) {
      if (uniform01(peak_rng) < cfg.contamination_prob) {
        classes[cfg.herald_slot - k] = 1;
        contaminated = true;
      }
    }
    if (contaminated) ++corpus.planted_contaminations;

    TraceEvent event{t, {}};
    event.slots.reserve(cfg.slots_per_trigger);
    for (int s = 0; s < cfg.slots_per_trigger; ++s) {
      const double noise = cfg.peak_noise * standard_normal(peak_rng);
      const double peak = classes[s] == 0 ? std::abs(noise) : class_peak[classes[s]] + noise;
      const auto& sampler = s == cfg.herald_slot ? herald_sampler : vacuum_sampler;
      const double x = sampler.draw(hd_rng).x;
      event.slots.push_back({s, peak, volts_from_quadrature(x, cfg.volts)});
    }
    corpus.events.push_back(std::move(event));
  }
  corpus.expected_contaminations = cfg.triggers * (1.0 - std::pow(1.0 - cfg.contamination_prob, lookback));
  return corpus;
}

std::vector<double> generate_vacuum_voltages(std::size_t count, const ShotNoiseCalibration& volts,
                                             std::uint64_t seed) {
  const QuadratureSampler sampler(DensityMatrix::vacuum(FockCutoff(0)), FixedPhase{0.0});
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(volts_from_quadrature(sampler.draw(rng).x, volts));
  return out;
}

}  // namespace hfock
