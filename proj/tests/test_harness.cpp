#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "kam/errors.hpp"
#include "kam/harness.hpp"
#include "kam/serialization.hpp"

using namespace kam;
using json = nlohmann::json;

namespace {

json russmann_config(double eps) {
  return json{{"problem", {{"family", "russmann_1d"}, {"alpha", "golden"}, {"epsilon", eps}, {"normal", 1.5}}},
              {"discretization", {{"modes", 32}, {"degree", 2}}}};
}

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("russmann_1d with epsilon 0 is its own normal form") {
  const auto cfg = parse_config(russmann_config(0.0));
  const auto b = build_map(cfg);
  CHECK(b.Q.max_abs_diff(b.P0.map) == 0.0);
  const auto r = run(cfg, Command::solve);
  CHECK(r.exit_code == exit_pass);
  REQUIRE(r.iterations.size() == 1);
  CHECK(r.iterations[0].residual == 0.0);
}

TEST_CASE("constructed family with identity G0 and zero lambda0 is P0") {
  json j{{"problem", {{"family", "constructed"}, {"alpha", "golden"}, {"g", 0.0}, {"beta0", 0.0}, {"B0", 0.0}}},
         {"discretization", {{"modes", 16}, {"degree", 4}}}};
  const auto b = build_map(parse_config(j));
  REQUIRE(b.constructed);
  CHECK(b.Q.max_abs_diff(b.constructed->P0.map) < 1e-15);
}

TEST_CASE("constructed benchmark passes and reports the recovered counter-term") {
  json j{{"problem", {{"family", "constructed"}, {"alpha", "golden"}}},
         {"discretization", {{"modes", 48}, {"degree", 6}}}};
  const auto r = run(parse_config(j), Command::solve);
  CHECK(r.exit_code == exit_pass);
  CHECK(r.report["recovery"]["lambda_error"].get<double>() < 1e-10);
  CHECK(r.report["recovery"]["G_error"].get<double>() < 1e-9);
  CHECK(r.report["recovery"]["lambda0"]["beta"][0].get<double>() == 3e-3);
}

TEST_CASE("rational alpha stops at the arithmetic gate") {
  auto j = russmann_config(1e-3);
  j["problem"]["alpha"] = "3/7";
  const auto r = run(parse_config(j), Command::solve);
  CHECK(r.exit_code == exit_arithmetic);
  CHECK(r.cause.find("diophantine_gate") != std::string::npos);
  CHECK_FALSE(r.report.contains("solve"));
}

TEST_CASE("explicit map round-trips bit-exactly") {
  const auto Q = build_map(parse_config(russmann_config(1e-3))).Q;
  const json mj = map_to_json(Q);
  json j{{"problem", {{"family", "explicit"}, {"map", mj}, {"A", 1.5}}}};
  const auto cfg = parse_config(j);
  CHECK(cfg.alpha(0) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-15));
  const auto b = build_map(cfg);
  CHECK(b.Q.max_abs_diff(Q) == 0.0);
  CHECK(map_to_json(b.Q) == mj);

  const auto dir = std::filesystem::temp_directory_path() / "kam_harness_map";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "map.json") << mj.dump();
  json jf{{"problem", {{"family", "explicit"}, {"map_file", "map.json"}, {"A", 1.5}, {"alpha", "golden"}}}};
  std::ofstream(dir / "cfg.json") << jf.dump();
  CHECK(build_map(load_config((dir / "cfg.json").string())).Q.max_abs_diff(Q) == 0.0);
}

TEST_CASE("schema violations name the field") {
  auto j = russmann_config(0.0);
  j["problem"]["colour"] = 1;
  CHECK(config_error(j).find("problem.colour") != std::string::npos);

  j = russmann_config(0.0);
  j["problem"].erase("family");
  CHECK(config_error(j).find("problem.family") != std::string::npos);

  j = russmann_config(0.0);
  j["discretization"]["modes"] = "many";
  CHECK(config_error(j).find("discretization.modes") != std::string::npos);

  j = russmann_config(0.0);
  j["problem"]["alpha"] = "pi";
  CHECK(config_error(j).find("problem.alpha") != std::string::npos);

  json d{{"problem", {{"family", "diag_nd"}, {"alpha", {"golden", "silver"}}, {"normal", {{"diag", {0.5, 2.0}}}},
                      {"p1", {{1.0, 0.0, 0.0}}}}}};
  CHECK(config_error(d).find("problem.p1") != std::string::npos);
  d["problem"]["p1"] = {{1.0, 0.0}, {0.0, 1.0}};
  d["problem"]["A"] = 1.0;
  CHECK(config_error(d).find("problem.A") != std::string::npos);
  d["problem"].erase("A");
  d["problem"]["normal_shifted"] = {{"diag", {-0.5, 1.0}}};
  CHECK(config_error(d).find("problem.normal") != std::string::npos);
  d["problem"].erase("normal");
  const auto cfg = parse_config(d);
  CHECK(cfg.A(0, 0) == 0.5);
  CHECK(cfg.A(1, 1) == 2.0);
  CHECK(cfg.diag.terms.size() == 10);

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  const auto r = run(parse_config(russmann_config(0.0)), Command::solve);
  CHECK(r.exit_code == exit_pass);
}

TEST_CASE("solver failure exits with the divergence code") {
  auto j = russmann_config(1e-3);
  j["solver"] = {{"max_iter", 1}};
  const auto r = run(parse_config(j), Command::solve);
  CHECK(r.exit_code == exit_divergence);
  CHECK(r.cause == "solver_max_iter");
}

TEST_CASE("reports are deterministic and written to disk") {
  auto j = russmann_config(1e-3);
  j["problem"]["b0"] = 1e-3;
  j["problem"]["epsilon"] = 5e-4;
  j["solver"] = {{"free_b", true}};
  j["elimination"] = {{"mode", "translate"}};
  j["orbit"] = {{"points", 128}};
  const auto dir = std::filesystem::temp_directory_path() / "kam_harness_out";
  std::filesystem::remove_all(dir);
  j["output"] = {{"dir", dir.string()}, {"report", "csv"}};
  const auto cfg = parse_config(j);
  const auto a = run(cfg, Command::eliminate);
  const auto b = run(cfg, Command::eliminate);
  CHECK(a.exit_code == exit_pass);
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.report["elimination"]["beta_norm"].get<double>() <= 1e-10);
  CHECK(a.report["orbit"]["one_step_max"].get<double>() <= 1e-9);
  CHECK(a.timing["stages"].contains("elimination"));
  write_reports(a, cfg);
  std::ifstream rep(dir / "report.json");
  const json back = json::parse(rep);
  CHECK(back.contains("timing"));
  std::ifstream csv(dir / "iterations.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "iter,residual,dG_norm,dlambda_norm,counterterm_cond");
}

TEST_CASE("diophantine command runs the gate only") {
  const auto r = run(parse_config(russmann_config(1e-3)), Command::diophantine);
  CHECK(r.exit_code == exit_pass);
  CHECK(r.report["diophantine"]["K_check"].get<int>() == 128);
  CHECK(r.report["diophantine"]["tau"].get<double>() == 1.0);
  CHECK_FALSE(r.report.contains("solve"));
  CHECK(command_from_string("orbit") == Command::orbit);
  CHECK_THROWS_AS(command_from_string("fly"), ConfigError);
}
