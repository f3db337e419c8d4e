#include "hfock/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>

#include "hfock/analysis.hpp"
#include "hfock/herald.hpp"
#include "hfock/homodyne.hpp"
#include "hfock/io.hpp"
#include "hfock/pipeline.hpp"
#include "hfock/synthetic.hpp"
#include "hfock/tomography.hpp"

namespace hfock::acceptance {

namespace {

// Reference photon-number rows, P(0)..P(4).
constexpr double kSinglePhotonRow[] = {0.372, 0.620, 0.000, 0.008, 0.000};
constexpr double kTwoPhotonRow[] = {0.119, 0.382, 0.408, 0.079, 0.013};

constexpr int kClosedLoopSamples = 10000;
constexpr int kClosedLoopCutoff = 10;
constexpr double kClosedLoopFidelity = 0.99;
constexpr double kClosedLoopBudgetSeconds = 30.0;
constexpr double kMonotoneTolerance = 1e-12;
constexpr int kVetoTriggers = 10000;
constexpr double kVetoFraction = 498.0 / 10000.0;
constexpr int kBootstrapSamples = 10000;
constexpr int kBootstrapReplicates = 100;
constexpr double kBootstrapSdLow = 0.0034;
constexpr double kBootstrapSdHigh = 0.0063;
constexpr double kBootstrapBudgetSeconds = 120.0;

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Rounded reference rows do not sum to exactly one.
DensityMatrix reference_row_state(std::span<const double> row) {
  double sum = 0.0;
  for (double p : row) sum += p;
  std::vector<double> normalized;
  for (double p : row) normalized.push_back(p / sum);
  return dm_from_diag(normalized, FockCutoff(static_cast<int>(row.size()) - 1));
}

struct Context {
  Artifacts artifacts;
  std::vector<std::vector<double>> likelihood_histories;
};

CriterionResult criterion_normalization() {
  const auto c = tmsv_coefficients(0.5, FockCutoff(40));
  double sum = 0.0;
  for (double v : c) sum += v * v;
  const double dev = std::abs(sum - 1.0);
  return {"1", "squeezed-vacuum normalization (r=0.5, n_max=40)", dev < 1e-12, fmt("|sum p(n) - 1| = %.3e", dev)};
}

CriterionResult criterion_single_photon_wigner() {
  const double w = wigner_point(reference_row_state(kSinglePhotonRow), 0.0, 0.0);
  return {"2", "single-photon row: W(0,0) = -0.0815 +- 0.0005", std::abs(w - (-0.0815)) <= 0.0005,
          fmt("W(0,0) = %.5f", w)};
}

CriterionResult criterion_two_photon_wigner() {
  const DensityMatrix rho = reference_row_state(kTwoPhotonRow);
  const double w_off = wigner_point(rho, 0.0, 0.65);
  const double w_origin = wigner_point(rho, 0.0, 0.0);
  const bool ok = std::abs(w_off - (-0.0082)) <= 0.0010 && w_origin > 0.0;
  return {"3", "two-photon row: W(0,0.65) = -0.0082 +- 0.0010, W(0,0) > 0", ok,
          fmt("W(0,0.65) = %.5f, W(0,0) = %+.5f", w_off, w_origin)};
}

std::vector<CriterionResult> criterion_closed_loop(Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const FockCutoff cutoff(kClosedLoopCutoff);
  const HeraldScenario scenarios[] = {
      HeraldScenario(0.3, 1.0, 1.0, 1, cutoff),
      HeraldScenario(0.3, 1.0, 0.62, 1, cutoff),
      HeraldScenario(0.5, 0.85, 0.85, 2, cutoff),
  };
  MleConfig cfg;
  cfg.cutoff = cutoff;

  bool fidelity_ok = true;
  bool counts_ok = true;
  std::string fidelity_detail;
  std::string counts_detail;
  for (std::size_t k = 0; k < std::size(scenarios); ++k) {
    const auto truth = conditional_signal_state(scenarios[k]).state;
    const auto records =
        sample_quadratures(truth, kClosedLoopSamples, UniformRandomPhase{}, derive_seed(kSeed, 40 + k),
                           scenarios[k].herald_n());
    const MleResult fit = mle_reconstruct(records, cfg);
    ctx.likelihood_histories.push_back(fit.log_likelihood_history);
    ctx.artifacts["closed_loop_" + std::to_string(k)] = io::density_to_json(fit.rho).dump();

    const double f = fidelity(truth, fit.rho);
    fidelity_ok = fidelity_ok && f >= kClosedLoopFidelity;
    fidelity_detail += fmt("%sF%zu=%.4f", k ? ", " : "", k + 1, f);

    // largest deviation in units of the binomial standard error sqrt(p(1-p)/N)
    double worst_ratio = 0.0;
    int worst_n = 0;
    for (int n = 0; n < cutoff.dim(); ++n) {
      const double p = truth(n, n).real();
      const double est = fit.rho(n, n).real();
      const double se = std::sqrt(p * (1.0 - p) / kClosedLoopSamples);
      const double dev = std::abs(est - p);
      const double ratio = se > 0.0 ? dev / se : (dev > 0.0 ? INFINITY : 0.0);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst_n = n;
      }
      counts_ok = counts_ok && dev <= 3.0 * se;
    }
    counts_detail += fmt("%sS%zu worst P(%d) at %.3g SE", k ? ", " : "", k + 1, worst_n, worst_ratio);
  }
  const double elapsed = seconds_since(start);
  const bool in_budget = elapsed < kClosedLoopBudgetSeconds;
  return {
      {"4a", "closed-loop tomography: fidelity >= 0.99 (3 scenarios, N=10,000, n_max=10)",
       fidelity_ok && in_budget, fidelity_detail + fmt(" (%.1f s)", elapsed)},
      {"4b", "closed-loop tomography: every P(n) within 3 binomial SE", counts_ok, counts_detail},
  };
}

CriterionResult criterion_veto(Context& ctx) {
  SyntheticCorpusConfig cfg;
  cfg.triggers = kVetoTriggers;
  cfg.herald_class = 2;
  cfg.contamination_prob = contamination_prob_for_veto_fraction(kVetoFraction, cfg.veto_window);
  const ThresholdConfig thresholds(0.25, 0.75);
  const auto corpus = generate_trace_corpus(cfg, DensityMatrix::fock(2, FockCutoff(2)), derive_seed(kSeed, 60));
  const auto cal = calibrate_shot_noise(generate_vacuum_voltages(10000, cfg.volts, derive_seed(kSeed, 61)));

  const ExtractionOptions options{thresholds, 2, cfg.veto_window};
  int two_photon_slots = 0;
  int emitted = 0;
  int violations = 0;
  std::vector<QuadratureRecord> all_kept;
  for (const auto& event : corpus.events) {
    std::vector<int> classes;
    for (const auto& s : event.slots) {
      const int c = s.snspd_peak >= thresholds.v2() ? 2 : (s.snspd_peak >= thresholds.v1() ? 1 : 0);
      classes.push_back(c);
      two_photon_slots += c == 2;
    }
    const auto kept = extract_quadratures(std::span(&event, 1), cal, options);
    emitted += static_cast<int>(kept.size());
    for (const auto& rec : kept) {
      std::size_t pos = 0;
      while (event.slots[pos].slot_index != rec.slot) ++pos;
      for (std::size_t k = 1; k <= static_cast<std::size_t>(cfg.veto_window) && k <= pos; ++k) {
        violations += classes[pos - k] != 0;
      }
    }
    all_kept.insert(all_kept.end(), kept.begin(), kept.end());
  }
  const int removed = two_photon_slots - emitted;
  const double expected = corpus.expected_contaminations;
  const bool ok = violations == 0 && std::abs(removed - expected) <= 3.0 * std::sqrt(expected) &&
                  removed == corpus.planted_contaminations;
  ctx.artifacts["veto_quadratures"] = io::quadratures_to_csv(all_kept);
  return {"6", "afterpulse veto: clean history for kept heralds, removals within Poisson 3 sigma", ok,
          fmt("removed %d of %d (planted %d, expected %.1f +- %.1f), violations %d", removed, two_photon_slots,
              corpus.planted_contaminations, expected, 3.0 * std::sqrt(expected), violations)};
}

CriterionResult criterion_pipeline_normalization(Context& ctx) {
  const ThresholdConfig thresholds(0.25, 0.75);
  SyntheticCorpusConfig vacuum_cfg;
  vacuum_cfg.triggers = 10000;
  vacuum_cfg.herald_class = 0;
  const auto vacuum = generate_trace_corpus(vacuum_cfg, DensityMatrix::vacuum(FockCutoff(0)), derive_seed(kSeed, 70));

  std::vector<double> volts;
  for (const auto& e : vacuum.events) {
    for (const auto& s : e.slots) volts.push_back(s.hd_value);
  }
  const auto cal = calibrate_shot_noise(volts);
  const auto records = extract_quadratures(vacuum.events, cal, {thresholds, std::nullopt, 2});
  double mean = 0.0;
  for (const auto& r : records) mean += r.x;
  mean /= static_cast<double>(records.size());
  double ss = 0.0;
  for (const auto& r : records) ss += (r.x - mean) * (r.x - mean);
  const double variance = ss / static_cast<double>(records.size() - 1);
  const double variance_se = 0.5 * std::sqrt(2.0 / static_cast<double>(records.size() - 1));
  const bool closure_ok = std::abs(variance - 0.5) <= 2.0 * variance_se;

  SyntheticCorpusConfig planted_cfg;
  planted_cfg.triggers = 10000;
  planted_cfg.herald_class = 2;
  const auto planted = generate_trace_corpus(planted_cfg, DensityMatrix::fock(2, FockCutoff(2)), derive_seed(kSeed, 71));
  const auto profile = slot_variance_profile(planted.events, cal);
  bool profile_ok = true;
  std::string profile_detail;
  for (const auto& [slot, var] : profile) {
    const bool ok = slot == planted_cfg.herald_slot ? std::abs(var - 2.5) <= 0.1 : std::abs(var - 0.5) <= 0.05;
    profile_ok = profile_ok && ok;
    profile_detail += fmt(" %d:%.3f", slot, var);
  }

  std::string artifact;
  for (const auto& [slot, var] : profile) artifact += fmt("%d,%.17g\n", slot, var);
  ctx.artifacts["slot_variance"] = artifact;
  ctx.artifacts["vacuum_calibration"] = io::calibration_to_json(cal).dump();
  return {"7", "pipeline normalization closure and slot-variance profile", closure_ok && profile_ok,
          fmt("vacuum variance %.5f (2 SE = %.5f); slot variances", variance, 2.0 * variance_se) + profile_detail};
}

CriterionResult criterion_bootstrap(Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  MleConfig cfg;
  cfg.cutoff = FockCutoff(kClosedLoopCutoff);
  const double probs[] = {0.38, 0.62};
  const auto truth = dm_from_diag(probs, cfg.cutoff);
  const auto records = sample_quadratures(truth, kBootstrapSamples, UniformRandomPhase{}, derive_seed(kSeed, 80), 1);

  const MleResult base = mle_reconstruct(records, cfg);
  ctx.likelihood_histories.push_back(base.log_likelihood_history);

  const auto report = bootstrap(records, PhotonNumberStatistic{1}, cfg, kBootstrapReplicates, derive_seed(kSeed, 81));
  ctx.artifacts["bootstrap_p1"] = io::bootstrap_to_json(report).dump();
  const double elapsed = seconds_since(start);
  const bool ok = report.standard_deviation >= kBootstrapSdLow && report.standard_deviation <= kBootstrapSdHigh &&
                  elapsed < kBootstrapBudgetSeconds;
  return {"8", "bootstrap sd of P(1) in [0.0034, 0.0063] (diag(0.38,0.62), N=10,000, 100 replicates)", ok,
          fmt("sd = %.5f (binomial 0.00485), used %d/%d replicates, %.1f s", report.standard_deviation,
              report.used_replicates, report.replicate_count, elapsed)};
}

// A phase-sensitive run exercises the full-matrix iteration for the
// monotonicity check as well.
void full_phase_run(Context& ctx) {
  const FockCutoff cutoff(6);
  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(cutoff.dim());
  amp(0) = std::sqrt(0.5);
  amp(1) = Complex(0.0, std::sqrt(0.3));
  amp(2) = std::sqrt(0.2);
  const DensityMatrix truth = apply_loss(PureState(amp).to_density(), 0.9);
  const auto records = sample_quadratures(truth, 4000, UniformRandomPhase{}, derive_seed(kSeed, 90));
  MleConfig cfg;
  cfg.cutoff = cutoff;
  cfg.phase_insensitive = false;
  const MleResult fit = mle_reconstruct(records, cfg);
  ctx.likelihood_histories.push_back(fit.log_likelihood_history);
  ctx.artifacts["full_phase"] = io::density_to_json(fit.rho).dump();
}

CriterionResult criterion_monotone(const Context& ctx) {
  double worst = 0.0;
  std::size_t iterations = 0;
  for (const auto& h : ctx.likelihood_histories) {
    for (std::size_t k = 1; k < h.size(); ++k) worst = std::max(worst, h[k - 1] - h[k]);
    iterations += h.size() - 1;
  }
  return {"5", "MLE log-likelihood never decreases", worst <= kMonotoneTolerance,
          fmt("%zu runs, %zu iterations, largest per-sample decrease %.3e", ctx.likelihood_histories.size(),
              iterations, worst)};
}

}  // namespace

std::string format_line(const CriterionResult& result) {
  return std::string(result.passed ? "[PASS] " : "[FAIL] ") + "C" + result.id + " " + result.title + " -- " +
         result.detail;
}

std::vector<CriterionResult> run_all(std::ostream* progress) {
  std::vector<CriterionResult> results;
  const auto record = [&](CriterionResult r) {
    if (progress) *progress << format_line(r) << std::endl;
    results.push_back(std::move(r));
  };

  record(criterion_normalization());
  record(criterion_single_photon_wigner());
  record(criterion_two_photon_wigner());

  const auto stochastic = [](Context& ctx, const std::function<void(CriterionResult)>& sink) {
    for (auto& r : criterion_closed_loop(ctx)) sink(std::move(r));
    full_phase_run(ctx);
    CriterionResult veto = criterion_veto(ctx);
    CriterionResult pipeline = criterion_pipeline_normalization(ctx);
    CriterionResult boot = criterion_bootstrap(ctx);
    sink(criterion_monotone(ctx));
    sink(std::move(veto));
    sink(std::move(pipeline));
    sink(std::move(boot));
  };

  Context first;
  stochastic(first, record);
  Context second;
  stochastic(second, [](CriterionResult) {});

  std::size_t differing = 0;
  for (const auto& [name, text] : first.artifacts) {
    const auto it = second.artifacts.find(name);
    differing += it == second.artifacts.end() || it->second != text;
  }
  differing += first.artifacts.size() != second.artifacts.size();
  record({"9", "determinism: repeated criteria 4-8 give byte-identical artifacts", differing == 0,
          fmt("%zu artifacts compared, %zu differ", first.artifacts.size(), differing)});
  return results;
}

}  // namespace hfock::acceptance
