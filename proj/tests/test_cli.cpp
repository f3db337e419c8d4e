#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "hfock/cli.hpp"
#include "hfock/io.hpp"

using namespace hfock;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"hfock"};
  storage.insert(storage.end(), args);
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(HFOCK_TEST_TMPDIR) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string str(const fs::path& p) { return p.string(); }

}  // namespace

TEST_CASE("simulate, tomo and report chain") {
  const auto dir = fresh_dir("chain");
  io::write_json_file(dir / "scenario.json",
                      {{"r", 0.3}, {"eta_i", 1.0}, {"eta_s", 0.62}, {"herald_n", 1}, {"n_max", 10}});
  auto r = run_cli({"simulate", "--config", str(dir / "scenario.json"), "--seed", "4", "--count", "3000", "--out",
                    str(dir / "sim")});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "sim" / "quadratures.csv"));
  CHECK(io::read_json_file(dir / "sim" / "simulate_report.json").at("seed") == 4);
  const auto truth = io::density_from_json(io::read_json_file(dir / "sim" / "truth.json"));
  CHECK(truth(1, 1).real() == doctest::Approx(0.62));

  r = run_cli({"tomo", "--csv", str(dir / "sim" / "quadratures.csv"), "--out", str(dir / "tomo")});
  REQUIRE(r.code == 0);
  const auto rho = io::density_from_json(io::read_json_file(dir / "tomo" / "rho.json"));
  CHECK(fidelity(rho, truth) > 0.98);
  CHECK(io::read_json_file(dir / "tomo" / "tomo_report.json").at("converged") == true);

  r = run_cli({"report", "--rho", str(dir / "tomo" / "rho.json"), "--resolution", "41", "--out", str(dir / "rep")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("P(1)") != std::string::npos);
  CHECK(r.out.find("W(0,0)") != std::string::npos);
  CHECK(fs::exists(dir / "rep" / "wigner_grid.csv"));
  CHECK(io::read_json_file(dir / "rep" / "wigner_grid.json").at("min_value").get<double>() < 0.0);

  r = run_cli({"bootstrap", "--csv", str(dir / "sim" / "quadratures.csv"), "--statistic", "W(0,0)",
               "--replicates", "5", "--seed", "1", "--out", str(dir / "boot")});
  REQUIRE(r.code == 0);
  const auto boot = io::read_json_file(dir / "boot" / "bootstrap.json");
  CHECK(boot.at("statistic") == "W(0,0)");
  CHECK_FALSE(boot.at("warnings").empty());
}

TEST_CASE("same seed gives byte-identical outputs") {
  const auto dir = fresh_dir("repro");
  io::write_json_file(dir / "scenario.json",
                      {{"r", 0.5}, {"eta_i", 0.85}, {"eta_s", 0.85}, {"herald_n", 2}, {"n_max", 10}});
  for (const char* name : {"a", "b"}) {
    REQUIRE(run_cli({"simulate", "--config", str(dir / "scenario.json"), "--seed", "9", "--count", "600",
                     "--trace-events", "--veto-fraction", "0.05", "--out", str(dir / name)})
                .code == 0);
    // same input path so the recorded config matches too
    REQUIRE(run_cli({"tomo", "--csv", str(dir / "a" / "quadratures.csv"), "--out", str(dir / name)}).code == 0);
    REQUIRE(run_cli({"bootstrap", "--csv", str(dir / "a" / "quadratures.csv"), "--replicates", "4", "--seed", "2",
                     "--out", str(dir / name)})
                .code == 0);
  }
  for (const char* file : {"quadratures.csv", "events.jsonl", "rho.json", "bootstrap.json", "simulate_report.json"}) {
    CHECK_MESSAGE(io::read_file(dir / "a" / file) == io::read_file(dir / "b" / file), std::string(file));
  }
}

TEST_CASE("pipeline on a simulated event corpus") {
  const auto dir = fresh_dir("pipeline");
  io::write_json_file(dir / "scenario.json",
                      {{"r", 0.5}, {"eta_i", 1.0}, {"eta_s", 1.0}, {"herald_n", 2}, {"n_max", 12}});
  io::write_json_file(dir / "thresholds.json", {{"v1", 0.25}, {"v2", 0.75}});
  REQUIRE(run_cli({"simulate", "--config", str(dir / "scenario.json"), "--count", "2000", "--trace-events",
                   "--veto-fraction", "0.1", "--seed", "3", "--out", str(dir)})
              .code == 0);
  const auto r = run_cli({"pipeline", "--events", str(dir / "events.jsonl"), "--config",
                          str(dir / "thresholds.json"), "--out", str(dir / "out")});
  REQUIRE(r.code == 0);
  const auto report = io::read_json_file(dir / "out" / "pipeline_report.json");
  const auto sim = io::read_json_file(dir / "simulate_report.json");
  CHECK(report.at("vetoed") == sim.at("trace_events").at("planted_contaminations"));
  CHECK(report.at("events_in") == 2000);
  const auto twos = io::quadratures_from_csv(io::read_file(dir / "out" / "herald_2.csv"));
  CHECK(static_cast<int>(twos.size()) == 2000 - report.at("vetoed").get<int>());
  const auto cal = io::read_json_file(dir / "out" / "calibration.json");
  CHECK(cal.at("sigma_v").get<double>() == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("exit codes") {
  const auto dir = fresh_dir("codes");
  io::write_json_file(dir / "unheraldable.json",
                      {{"r", 0.0}, {"eta_i", 1.0}, {"eta_s", 1.0}, {"herald_n", 2}, {"n_max", 10}});
  auto r = run_cli({"simulate", "--config", str(dir / "unheraldable.json"), "--out", str(dir)});
  CHECK(r.code == cli::kDomainError);
  CHECK_FALSE(r.err.empty());

  io::write_json_file(dir / "thresholds.json", {{"v1", 0.25}, {"v2", 0.75}});
  io::write_file(dir / "empty.jsonl", "");
  r = run_cli({"pipeline", "--events", str(dir / "empty.jsonl"), "--config", str(dir / "thresholds.json"), "--out",
               str(dir)});
  CHECK(r.code == cli::kInputError);

  r = run_cli({"tomo", "--csv", str(dir / "missing.csv"), "--out", str(dir)});
  CHECK(r.code == cli::kInputError);

  r = run_cli({"frobnicate"});
  CHECK(r.code == cli::kInputError);

  r = run_cli({"--help"});
  CHECK(r.code == cli::kSuccess);

  // too few records for tomography
  io::write_file(dir / "few.csv", "x,theta,herald_n,slot\n0.1,0,1,0\n");
  r = run_cli({"tomo", "--csv", str(dir / "few.csv"), "--out", str(dir)});
  CHECK(r.code == cli::kDomainError);
}

TEST_CASE("non-convergence is reported but is not an error") {
  const auto dir = fresh_dir("nonconv");
  io::write_json_file(dir / "scenario.json",
                      {{"r", 0.3}, {"eta_i", 1.0}, {"eta_s", 0.62}, {"herald_n", 1}, {"n_max", 10}});
  io::write_json_file(dir / "mle.json", {{"max_iterations", 2}});
  REQUIRE(run_cli({"simulate", "--config", str(dir / "scenario.json"), "--count", "500", "--out", str(dir)}).code ==
          0);
  const auto r = run_cli({"tomo", "--csv", str(dir / "quadratures.csv"), "--config", str(dir / "mle.json"), "--out",
                          str(dir / "t")});
  CHECK(r.code == cli::kSuccess);
  CHECK(r.out.find("NOT converged") != std::string::npos);
  CHECK(io::read_json_file(dir / "t" / "tomo_report.json").at("converged") == false);
}

TEST_CASE("lossless simulate writes a Fock-1 truth") {
  const auto dir = fresh_dir("lossless");
  io::write_json_file(dir / "scenario.json",
                      {{"r", 0.3}, {"eta_i", 1.0}, {"eta_s", 1.0}, {"herald_n", 1}, {"n_max", 10}});
  const auto r = run_cli({"simulate", "--config", str(dir / "scenario.json"), "--out", str(dir)});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("herald probability") != std::string::npos);
  CHECK(io::quadratures_from_csv(io::read_file(dir / "quadratures.csv")).size() == 10000u);
  const auto truth = io::read_json_file(dir / "truth.json");
  CHECK(io::density_from_json(truth)(1, 1).real() == doctest::Approx(1.0));
  CHECK(truth.at("seed") == 0);
  CHECK(truth.at("config").at("count") == 10000);
}

TEST_CASE("report on reference diagonal states") {
  const auto dir = fresh_dir("report");
  const double single[] = {0.372, 0.620, 0.000, 0.008, 0.000};
  io::write_json_file(dir / "single.json", io::density_to_json(dm_from_diag(single, FockCutoff(4))));
  auto r = run_cli({"report", "--rho", str(dir / "single.json"), "--out", str(dir / "s")});
  REQUIRE(r.code == 0);
  for (const char* cell : {"37.2 %", "62.0 %", "0.0 %", "0.8 %"}) CHECK(r.out.find(cell) != std::string::npos);
  CHECK(r.out.find("W(0,0) = -0.0815") != std::string::npos);

  io::write_json_file(dir / "vacuum.json", io::density_to_json(DensityMatrix::vacuum(FockCutoff(4))));
  r = run_cli({"report", "--rho", str(dir / "vacuum.json"), "--out", str(dir / "v")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("100.0 %") != std::string::npos);
  CHECK(io::read_json_file(dir / "v" / "wigner_grid.json").at("min_value").get<double>() > 0.0);

  // the reference two-photon row sums to 1.001
  const double two[] = {0.119 / 1.001, 0.382 / 1.001, 0.408 / 1.001, 0.079 / 1.001, 0.013 / 1.001};
  io::write_json_file(dir / "two.json", io::density_to_json(dm_from_diag(two, FockCutoff(4))));
  r = run_cli({"report", "--rho", str(dir / "two.json"), "--out", str(dir / "t")});
  REQUIRE(r.code == 0);
  const auto rep = io::read_json_file(dir / "t" / "report.json");
  CHECK(rep.at("wigner_radial_min").at("value").get<double>() == doctest::Approx(-0.0082).epsilon(0.15));
  CHECK(rep.at("wigner_radial_min").at("radius").get<double>() == doctest::Approx(0.65).epsilon(0.1));

  r = run_cli({"report", "--rho", str(dir / "nothing.json"), "--out", str(dir)});
  CHECK(r.code == cli::kInputError);
}

TEST_CASE("report with a dataset adds bootstrap errors") {
  const auto dir = fresh_dir("report_boot");
  io::write_json_file(dir / "scenario.json",
                      {{"r", 0.3}, {"eta_i", 1.0}, {"eta_s", 0.62}, {"herald_n", 1}, {"n_max", 10}});
  REQUIRE(run_cli({"simulate", "--config", str(dir / "scenario.json"), "--count", "1000", "--out", str(dir)}).code ==
          0);
  REQUIRE(run_cli({"tomo", "--csv", str(dir / "quadratures.csv"), "--out", str(dir)}).code == 0);
  const auto r = run_cli({"report", "--rho", str(dir / "rho.json"), "--csv", str(dir / "quadratures.csv"),
                          "--replicates", "5", "--resolution", "31", "--out", str(dir / "r")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("+-") != std::string::npos);
  const auto rep = io::read_json_file(dir / "r" / "report.json");
  CHECK(rep.at("photon_distribution").at(1).contains("bootstrap"));
  CHECK(rep.at("config").at("mle").at("n_max") == 10);
}

TEST_CASE("pipeline input errors and self-calibration") {
  const auto dir = fresh_dir("pipeline_errors");
  io::write_json_file(dir / "thresholds.json", {{"v1", 0.25}, {"v2", 0.75}});
  io::write_file(dir / "bad.jsonl",
                 "{\"trigger_id\": 0, \"slots\": [{\"slot\": 0, \"snspd_peak\": 0.0, \"hd_value\": 0.1}]}\n"
                 "not json\n");
  auto r = run_cli({"pipeline", "--events", str(dir / "bad.jsonl"), "--config", str(dir / "thresholds.json"),
                    "--out", str(dir)});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find("line 2") != std::string::npos);

  // vacuum-only corpus calibrating itself
  io::write_json_file(dir / "scenario.json",
                      {{"r", 0.3}, {"eta_i", 1.0}, {"eta_s", 1.0}, {"herald_n", 0}, {"n_max", 10}});
  REQUIRE(run_cli({"simulate", "--config", str(dir / "scenario.json"), "--count", "2000", "--trace-events",
                   "--out", str(dir)})
              .code == 0);
  r = run_cli({"pipeline", "--events", str(dir / "events.jsonl"), "--config", str(dir / "thresholds.json"), "--out",
               str(dir / "out")});
  REQUIRE(r.code == 0);
  const auto records = io::quadratures_from_csv(io::read_file(dir / "out" / "herald_0.csv"));
  double mean = 0.0, ss = 0.0;
  for (const auto& q : records) mean += q.x / records.size();
  for (const auto& q : records) ss += (q.x - mean) * (q.x - mean);
  CHECK(ss / (records.size() - 1) == doctest::Approx(0.5).epsilon(1e-9));
}
