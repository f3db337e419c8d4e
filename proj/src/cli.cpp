#include "hfock/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <regex>

#include "CLI11.hpp"

#include "hfock/acceptance.hpp"
#include "hfock/analysis.hpp"
#include "hfock/errors.hpp"
#include "hfock/herald.hpp"
#include "hfock/homodyne.hpp"
#include "hfock/io.hpp"
#include "hfock/pipeline.hpp"
#include "hfock/synthetic.hpp"
#include "hfock/tomography.hpp"

namespace hfock::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

// Sub-seed streams derived from the global --seed.
constexpr std::uint64_t kQuadratureStream = 0;
constexpr std::uint64_t kTraceStream = 1;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out = ".";
  int cutoff = -1;  // -1: take it from the input
  std::string config;
};

struct SimulateOptions {
  int count = 10000;
  std::string phase = "random";
  double theta = 0.0;
  bool trace_events = false;
  double veto_fraction = 0.0;
};

struct PipelineOptions {
  std::string events;
  std::string calibration;
  std::string vacuum;
  int window = 2;
};

struct TomoOptions {
  std::string csv;
  int herald = -1;
};

struct ReportOptions {
  std::string rho;
  std::string csv;
  int replicates = kDefaultBootstrapReplicates;
  int resolution = kDefaultWignerResolution;
};

struct BootstrapOptions {
  std::string csv;
  std::string statistic = "P(1)";
  int replicates = kDefaultBootstrapReplicates;
  int herald = -1;
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

fs::path prepare_out(const GlobalOptions& g) {
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string());
  return dir;
}

MleConfig load_mle_config(const GlobalOptions& g) {
  MleConfig cfg;
  if (!g.config.empty()) cfg = io::mle_config_from_json(io::read_json_file(g.config));
  if (g.cutoff >= 0) cfg.cutoff = FockCutoff(g.cutoff);
  return cfg;
}

// Every output JSON carries the seed and resolved config of the run that made it.
json stamped(json j, const GlobalOptions& g, const json& config) {
  j["seed"] = g.seed;
  j["config"] = config;
  return j;
}

std::vector<QuadratureRecord> load_records(const std::string& path, int herald) {
  auto records = io::quadratures_from_csv(io::read_file(path));
  if (herald >= 0) std::erase_if(records, [herald](const QuadratureRecord& r) { return r.herald_n != herald; });
  return records;
}

BootstrapStatistic parse_statistic(const std::string& text) {
  static const std::regex photon(R"(P\(?(\d+)\)?)");
  static const std::regex wigner(R"(W[:(]\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\)?)");
  std::smatch m;
  if (std::regex_match(text, m, photon)) return PhotonNumberStatistic{std::stoi(m[1])};
  if (std::regex_match(text, m, wigner)) return WignerStatistic{std::stod(m[1]), std::stod(m[2])};
  throw InputError("unknown statistic \"" + text + "\" (use P(n) or W(x,p))");
}

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out) {
  if (g.config.empty()) throw InputError("simulate needs a scenario file (--config)");
  json scenario_json = io::read_json_file(g.config);
  if (g.cutoff >= 0) scenario_json["n_max"] = g.cutoff;
  const HeraldScenario scenario = io::scenario_from_json(scenario_json);
  if (o.count < 1) throw DomainError("--count must be >= 1");

  PhasePolicy policy = UniformRandomPhase{};
  if (o.phase == "fixed") {
    policy = FixedPhase{o.theta};
  } else if (o.phase != "random") {
    throw InputError("--phase must be 'random' or 'fixed'");
  }

  const HeraldedState heralded = conditional_signal_state(scenario);
  const auto records = sample_quadratures(heralded.state, static_cast<std::size_t>(o.count), policy,
                                          derive_seed(g.seed, kQuadratureStream), scenario.herald_n());

  const fs::path dir = prepare_out(g);
  io::write_file(dir / "quadratures.csv", io::quadratures_to_csv(records));
  json config = {{"scenario", io::scenario_to_json(scenario)},
                 {"count", o.count},
                 {"phase", o.phase},
                 {"theta", o.theta}};
  json report = {{"seed", g.seed}, {"config", config}, {"herald_probability", heralded.probability}};

  if (o.trace_events) {
    if (scenario.herald_n() > 2) throw DomainError("trace events support herald classes 0, 1 and 2 only");
    SyntheticCorpusConfig corpus_cfg;
    corpus_cfg.triggers = o.count;
    corpus_cfg.herald_class = scenario.herald_n();
    corpus_cfg.contamination_prob = contamination_prob_for_veto_fraction(o.veto_fraction, corpus_cfg.veto_window);
    const auto corpus = generate_trace_corpus(corpus_cfg, heralded.state, derive_seed(g.seed, kTraceStream));
    io::write_file(dir / "events.jsonl", io::events_to_jsonl(corpus.events));
    report["config"]["veto_fraction"] = o.veto_fraction;
    report["trace_events"] = {{"triggers", corpus_cfg.triggers},
                              {"slots_per_trigger", corpus_cfg.slots_per_trigger},
                              {"herald_slot", corpus_cfg.herald_slot},
                              {"planted_contaminations", corpus.planted_contaminations},
                              {"expected_contaminations", corpus.expected_contaminations},
                              {"volts", io::calibration_to_json(corpus_cfg.volts)}};
  }
  io::write_json_file(dir / "truth.json", stamped(io::density_to_json(heralded.state), g, report["config"]));
  io::write_json_file(dir / "simulate_report.json", report);

  out << fmt("herald probability: %.10g\n", heralded.probability);
  out << "wrote " << records.size() << " records to " << (dir / "quadratures.csv").string() << "\n";
  return kSuccess;
}

int cmd_pipeline(const GlobalOptions& g, const PipelineOptions& o, std::ostream& out) {
  if (g.config.empty()) throw InputError("pipeline needs a threshold file (--config)");
  const json cfg_json = io::read_json_file(g.config);
  const ThresholdConfig thresholds = io::thresholds_from_json(cfg_json);
  const int window = cfg_json.contains("window") ? cfg_json.at("window").get<int>() : o.window;

  const auto events = io::events_from_jsonl(io::read_file(o.events));

  ShotNoiseCalibration cal;
  std::string cal_source;
  if (!o.calibration.empty()) {
    cal = io::calibration_from_json(io::read_json_file(o.calibration));
    cal_source = "file";
  } else {
    // Self-calibration uses the slots without a detector click; a separate
    // vacuum (blocked-signal) file is used whole.
    const bool self = o.vacuum.empty();
    const auto vacuum_events = self ? events : io::events_from_jsonl(io::read_file(o.vacuum));
    std::vector<double> volts;
    for (const auto& e : vacuum_events) {
      for (const auto& s : e.slots) {
        if (!self || classify_pnr(s.snspd_peak, thresholds) == 0) volts.push_back(s.hd_value);
      }
    }
    cal = calibrate_shot_noise(volts);
    cal_source = o.vacuum.empty() ? "self" : "vacuum";
  }

  const fs::path dir = prepare_out(g);
  json per_herald = json::object();
  int heralded = 0;
  for (int h = 0; h <= 2; ++h) {
    const auto records = extract_quadratures(events, cal, {thresholds, h, window});
    io::write_file(dir / ("herald_" + std::to_string(h) + ".csv"), io::quadratures_to_csv(records));
    per_herald[std::to_string(h)] = records.size();
    if (h > 0) heralded += static_cast<int>(records.size());
  }
  const VetoSummary veto = veto_events(events, thresholds, window);

  std::string profile_csv = "slot,variance\n";
  if (events.size() >= 2) {
    for (const auto& [slot, var] : slot_variance_profile(events, cal)) profile_csv += fmt("%d,%.17g\n", slot, var);
  }
  io::write_file(dir / "slot_variance.csv", profile_csv);

  json report = {{"seed", g.seed},
                 {"config",
                  {{"thresholds", io::thresholds_to_json(thresholds)},
                   {"window", window},
                   {"calibration_source", cal_source},
                   {"events_file", o.events}}},
                 {"calibration", io::calibration_to_json(cal)},
                 {"events_in", events.size()},
                 {"kept", heralded},
                 {"vetoed", veto.removed},
                 {"truncated_history", veto.truncated_history},
                 {"per_herald", per_herald}};
  io::write_json_file(dir / "calibration.json", stamped(io::calibration_to_json(cal), g, report["config"]));
  io::write_json_file(dir / "pipeline_report.json", report);
  out << fmt("events %zu, heralded slots kept %d, vetoed %d\n", events.size(), heralded, veto.removed);
  return kSuccess;
}

int cmd_tomo(const GlobalOptions& g, const TomoOptions& o, std::ostream& out) {
  const MleConfig cfg = load_mle_config(g);
  const auto records = load_records(o.csv, o.herald);
  const MleResult result = mle_reconstruct(records, cfg);

  const fs::path dir = prepare_out(g);
  json report = io::mle_report_to_json(result, cfg);
  report["seed"] = g.seed;
  report["config"]["csv"] = o.csv;
  report["config"]["herald"] = o.herald;
  report["records"] = records.size();
  io::write_json_file(dir / "rho.json", stamped(io::density_to_json(result.rho), g, report["config"]));
  io::write_json_file(dir / "tomo_report.json", report);

  out << fmt("%s after %d iterations, log-likelihood %.10g\n", result.converged ? "converged" : "NOT converged",
             result.iterations_used, result.final_log_likelihood);
  return kSuccess;
}

int cmd_report(const GlobalOptions& g, const ReportOptions& o, std::ostream& out) {
  const DensityMatrix rho = io::density_from_json(io::read_json_file(o.rho));
  const auto probs = photon_distribution(rho);

  std::vector<BootstrapReport> errors;
  json mle_json = nullptr;
  if (!o.csv.empty()) {
    MleConfig cfg = load_mle_config(g);
    if (g.cutoff < 0 && g.config.empty()) cfg.cutoff = rho.cutoff();
    mle_json = io::mle_config_to_json(cfg);
    const auto records = load_records(o.csv, -1);
    std::vector<BootstrapStatistic> stats;
    for (int n = 0; n <= 4; ++n) {
      if (n < cfg.cutoff.dim()) stats.push_back(PhotonNumberStatistic{n});
    }
    stats.push_back(WignerStatistic{0.0, 0.0});
    errors = bootstrap_many(records, stats, cfg, o.replicates, g.seed);
  }

  out << "      ";
  for (int n = 0; n <= 4; ++n) out << fmt("  %-14s", fmt("P(%d)", n).c_str());
  out << "\n  rho ";
  json table = json::array();
  for (int n = 0; n <= 4; ++n) {
    const double p = n < static_cast<int>(probs.size()) ? probs[n] : 0.0;
    std::string cell = fmt("%.1f", 100.0 * p);
    json entry = {{"n", n}, {"probability", p}};
    if (n < static_cast<int>(errors.size()) - 1) {
      cell += fmt(" +- %.1f", 100.0 * errors[n].standard_deviation);
      entry["bootstrap"] = io::bootstrap_to_json(errors[n]);
    }
    out << fmt("  %-14s", (cell + " %").c_str());
    table.push_back(entry);
  }
  out << "\n";

  const double w_origin = wigner_point(rho, 0.0, 0.0);
  out << fmt("W(0,0) = %.4f", w_origin);
  if (!errors.empty()) out << fmt(" +- %.4f", errors.back().standard_deviation);
  out << "\n";

  const WignerGrid grid = wigner_grid(rho, kDefaultWignerRange, kDefaultWignerRange, o.resolution);
  json report = {{"seed", g.seed},
                 {"config",
                  {{"rho", o.rho},
                   {"csv", o.csv},
                   {"replicates", o.replicates},
                   {"resolution", o.resolution},
                   {"mle", mle_json}}},
                 {"photon_distribution", table},
                 {"wigner_origin", w_origin},
                 {"wigner_min", io::wigner_sidecar_to_json(grid)}};
  if (!errors.empty()) report["wigner_origin_bootstrap"] = io::bootstrap_to_json(errors.back());
  out << fmt("Wigner grid minimum %.4f at (x, p) = (%.3f, %.3f)\n", grid.min_value, grid.min_x, grid.min_p);
  if (rho.is_diagonal() && grid.min_value < 0.0) {
    const double r0 = std::hypot(grid.min_x, grid.min_p);
    const double step = (kDefaultWignerRange.hi - kDefaultWignerRange.lo) / (o.resolution - 1);
    const RadialMinimum refined = refine_radial_minimum(rho, std::max(0.0, r0 - 2 * step), r0 + 2 * step);
    out << fmt("refined radial minimum %.5f at radius %.4f\n", refined.value, refined.radius);
    report["wigner_radial_min"] = {{"radius", refined.radius}, {"value", refined.value}};
  }

  const fs::path dir = prepare_out(g);
  io::write_file(dir / "wigner_grid.csv", io::wigner_grid_to_csv(grid));
  io::write_json_file(dir / "wigner_grid.json", stamped(io::wigner_sidecar_to_json(grid), g, report["config"]));
  io::write_json_file(dir / "report.json", report);
  return kSuccess;
}

int cmd_bootstrap(const GlobalOptions& g, const BootstrapOptions& o, std::ostream& out) {
  const MleConfig cfg = load_mle_config(g);
  const auto records = load_records(o.csv, o.herald);
  const BootstrapStatistic statistic = parse_statistic(o.statistic);
  const BootstrapReport report = bootstrap(records, statistic, cfg, o.replicates, g.seed);

  json j = io::bootstrap_to_json(report);
  j["seed"] = g.seed;
  j["config"] = {{"mle", io::mle_config_to_json(cfg)}, {"csv", o.csv}, {"herald", o.herald}};
  const fs::path dir = prepare_out(g);
  io::write_json_file(dir / "bootstrap.json", j);

  out << fmt("%s = %.6g, sd %.6g, 95%% interval [%.6g, %.6g] from %d replicates\n", report.statistic.c_str(),
             report.point_estimate, report.standard_deviation, report.ci_low, report.ci_high, report.used_replicates);
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  return kSuccess;
}

int cmd_selftest(std::ostream& out) {
  const auto results = acceptance::run_all(&out);
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  out << fmt("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? kSuccess : kCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heralded Fock-state simulation, homodyne tomography and analysis"};
  app.require_subcommand(1);

  GlobalOptions g;
  const auto add_globals = [&g](CLI::App* sub) {
    sub->add_option("--seed", g.seed, "Random seed (recorded in every report)");
    sub->add_option("--out", g.out, "Output directory");
    sub->add_option("--cutoff", g.cutoff, "Fock cutoff n_max (overrides the input)");
    sub->add_option("--config", g.config, "JSON config file");
  };

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Sample homodyne data from a heralding scenario");
  add_globals(simulate);
  simulate->add_option("--count", sim.count, "Number of quadrature samples / triggers");
  simulate->add_option("--phase", sim.phase, "LO phase policy: random or fixed");
  simulate->add_option("--theta", sim.theta, "LO phase for --phase fixed");
  simulate->add_flag("--trace-events", sim.trace_events, "Also write a synthetic detector event corpus");
  simulate->add_option("--veto-fraction", sim.veto_fraction, "Expected fraction of contaminated heralds");

  PipelineOptions pipe;
  auto* pipeline = app.add_subcommand("pipeline", "Classify, veto and normalize detector event data");
  add_globals(pipeline);
  pipeline->add_option("--events", pipe.events, "JSON-lines event file")->required();
  pipeline->add_option("--calibration", pipe.calibration, "Shot-noise calibration JSON");
  pipeline->add_option("--vacuum", pipe.vacuum, "Vacuum event file for calibration");
  pipeline->add_option("--window", pipe.window, "Veto window in slots");

  TomoOptions tomo_opts;
  auto* tomo = app.add_subcommand("tomo", "Maximum-likelihood density-matrix reconstruction");
  add_globals(tomo);
  tomo->add_option("--csv", tomo_opts.csv, "Quadrature CSV")->required();
  tomo->add_option("--herald", tomo_opts.herald, "Use only records with this herald class");

  ReportOptions rep;
  auto* report = app.add_subcommand("report", "Photon-number table and Wigner function of a state");
  add_globals(report);
  report->add_option("--rho", rep.rho, "Density matrix JSON")->required();
  report->add_option("--csv", rep.csv, "Dataset for bootstrap error bars");
  report->add_option("--replicates", rep.replicates, "Bootstrap replicates");
  report->add_option("--resolution", rep.resolution, "Wigner grid points per axis");

  BootstrapOptions boot;
  auto* bootstrap_cmd = app.add_subcommand("bootstrap", "Bootstrap error of one statistic");
  add_globals(bootstrap_cmd);
  bootstrap_cmd->add_option("--csv", boot.csv, "Quadrature CSV")->required();
  bootstrap_cmd->add_option("--statistic", boot.statistic, "P(n) or W(x,p)");
  bootstrap_cmd->add_option("--replicates", boot.replicates, "Bootstrap replicates");
  bootstrap_cmd->add_option("--herald", boot.herald, "Use only records with this herald class");

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(g, sim, out);
    if (pipeline->parsed()) return cmd_pipeline(g, pipe, out);
    if (tomo->parsed()) return cmd_tomo(g, tomo_opts, out);
    if (report->parsed()) return cmd_report(g, rep, out);
    if (bootstrap_cmd->parsed()) return cmd_bootstrap(g, boot, out);
    if (selftest->parsed()) return cmd_selftest(out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace hfock::cli
