#include <filesystem>
#include <string>

#include "doctest.h"

#include "hfock/errors.hpp"
#include "hfock/io.hpp"

using namespace hfock;
using io::json;

TEST_CASE("density matrix round trip is lossless") {
  Eigen::VectorXcd v(3);
  v << 0.6, Complex(0.1 / 3.0, 0.48), 0.64;
  v.normalize();
  const auto rho = PureState(v).to_density();
  const auto back = io::density_from_json(json::parse(io::density_to_json(rho).dump()));
  CHECK(back.matrix() == rho.matrix());
}

TEST_CASE("density matrix JSON errors") {
  CHECK_THROWS_AS(io::density_from_json(json{{"dim", 2}, {"re", {1.0}}, {"im", {0.0}}}), InputError);
  CHECK_THROWS_AS(io::density_from_json(json{{"re", {1.0}}, {"im", {0.0}}}), InputError);
  CHECK_THROWS_AS(io::density_from_json(json{{"dim", "one"}, {"re", {1.0}}, {"im", {0.0}}}), InputError);
  // well-formed but not a state
  CHECK_THROWS_AS(io::density_from_json(json{{"dim", 1}, {"re", {2.0}}, {"im", {0.0}}}), DomainError);
}

TEST_CASE("scenario round trip") {
  const HeraldScenario s(0.5, 0.85, 0.85, 2, FockCutoff(12), "two-photon");
  const auto back = io::scenario_from_json(io::scenario_to_json(s));
  CHECK(back.r() == 0.5);
  CHECK(back.eta_i() == 0.85);
  CHECK(back.herald_n() == 2);
  CHECK(back.cutoff() == FockCutoff(12));
  CHECK(back.label() == "two-photon");
  CHECK_THROWS_AS(io::scenario_from_json(json{{"r", 0.5}}), InputError);
}

TEST_CASE("calibration and thresholds") {
  const auto cal = io::calibration_from_json(io::calibration_to_json({0.01, 0.2}));
  CHECK(cal.mean_v == 0.01);
  CHECK(cal.sigma_v == 0.2);
  const auto thr = io::thresholds_from_json(json{{"v1", 0.012}, {"v2", 0.02}});
  CHECK(thr.v1() == 0.012);
  CHECK_THROWS_AS(io::thresholds_from_json(json{{"v1", 0.03}, {"v2", 0.02}}), DomainError);
}

TEST_CASE("MLE config keeps defaults for missing keys") {
  const auto cfg = io::mle_config_from_json(json{{"max_iterations", 50}});
  CHECK(cfg.max_iterations == 50);
  CHECK(cfg.cutoff == FockCutoff(10));
  CHECK(cfg.phase_insensitive);
  CHECK_FALSE(cfg.bin_width.has_value());

  MleConfig custom;
  custom.bin_width = 0.05;
  custom.phase_insensitive = false;
  const auto back = io::mle_config_from_json(io::mle_config_to_json(custom));
  CHECK(back.bin_width == 0.05);
  CHECK_FALSE(back.phase_insensitive);

  CHECK_THROWS_AS(io::mle_config_from_json(json{{"max_iterations", 0}}), DomainError);
  CHECK_THROWS_AS(io::mle_config_from_json(json::array()), InputError);
}

TEST_CASE("quadrature CSV round trip") {
  std::vector<QuadratureRecord> rec = {{0.1, 0.0, 1, 3}, {-1.0 / 3.0, 2.5, 2, 0}, {1e-300, 6.2, 0, 5}};
  const auto text = io::quadratures_to_csv(rec);
  CHECK(text.rfind("x,theta,herald_n,slot\n", 0) == 0);
  CHECK(io::quadratures_from_csv(text) == rec);
}

TEST_CASE("quadrature CSV errors name the line") {
  CHECK_THROWS_AS(io::quadratures_from_csv(""), InputError);
  CHECK_THROWS_AS(io::quadratures_from_csv("a,b\n1,2\n"), InputError);
  try {
    io::quadratures_from_csv("x,theta,herald_n,slot\n0.1,0,1,3\nnope,0,1,3\n");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("event JSON lines") {
  std::vector<TraceEvent> events = {{7, {{0, 0.01, 0.2}, {1, 1.0, -0.1}}}, {8, {{0, 0.5, 0.0}}}};
  const auto back = io::events_from_jsonl(io::events_to_jsonl(events));
  REQUIRE(back.size() == 2u);
  CHECK(back[0].trigger_id == 7);
  CHECK(back[0].slots[1].snspd_peak == 1.0);
  CHECK(back[1].slots[0].slot_index == 0);

  CHECK_THROWS_AS(io::events_from_jsonl(""), InputError);
  try {
    io::events_from_jsonl(io::events_to_jsonl(events) + "{\"trigger_id\": 9}\n");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("Wigner grid CSV layout") {
  const auto grid = wigner_grid(DensityMatrix::vacuum(FockCutoff(1)), {-1, 1}, {-2, 2}, 16);
  const auto csv = io::wigner_grid_to_csv(grid);
  CHECK(csv.rfind("x\\p,-2,", 0) == 0);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 17);
  const auto side = io::wigner_sidecar_to_json(grid);
  CHECK(side.at("min_value").get<double>() == grid.min_value);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "hfock_io_test";
  std::filesystem::create_directories(dir);
  io::write_json_file(dir / "a.json", json{{"k", 1.5}});
  CHECK(io::read_json_file(dir / "a.json").at("k") == 1.5);
  io::write_file(dir / "b.txt", "not json");
  CHECK_THROWS_AS(io::read_json_file(dir / "b.txt"), InputError);
  CHECK_THROWS_AS(io::read_file(dir / "missing.txt"), InputError);
  std::filesystem::remove_all(dir);
}
