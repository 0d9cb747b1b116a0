#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "kam/cohomology.hpp"
#include "kam/conjugacy.hpp"
#include "kam/diophantine.hpp"
#include "kam/elimination.hpp"
#include "kam/families.hpp"
#include "kam/newton.hpp"
#include "kam/orbit.hpp"

namespace kam {

/// Problem description read from a JSON config (see schema/config.schema.json).
struct ProblemConfig {
  std::string family;  // russmann_1d, diag_nd, constructed, explicit
  int n = 1;
  int m = 1;
  Eigen::VectorXd alpha;
  /// Ambient normal matrix of the solver; the family's normal matrix by default.
  Eigen::MatrixXd A;
  RussmannParams russmann;
  std::vector<TrigTerm> russmann_terms;  // added to the russmann_1d map
  DiagParams diag;
  ConstructedParams constructed;
  nlohmann::json explicit_map;  // map_to_json layout
  /// 0: family default (32 and 2; 64 and 6 for constructed; the map's own
  /// for explicit).
  int modes = 0;
  int degree = 0;

  NewtonOptions solver;
  /// none, normal (B only), translate (beta and B), twist_translate
  /// (translate after the torsion-flattening conjugation).
  std::string elimination_mode = "none";
  EliminationOptions elimination;

  bool diophantine_gate = true;
  double tau = 0.0;     // 0: n
  int K_check = 0;      // 0: 4 * cutoff
  double gamma_min = 1e-12;

  int orbit_points = 256;
  int orbit_iterations = 0;
  double orbit_tol = 1e-9;

  std::string out_dir;
  std::string report_format = "json";  // json or csv
};

/// Parses and validates; throws ConfigError naming the offending field.
/// A relative problem.map_file is resolved against base_dir.
ProblemConfig parse_config(const nlohmann::json& j, const std::string& base_dir = "");
ProblemConfig load_config(const std::string& path);

struct BuiltMap {
  FourierTaylorMap Q;
  NormalForm P0;  // starting normal form
  SpectralData sd;
  std::optional<Constructed> constructed;
};

BuiltMap build_map(const ProblemConfig& cfg);

enum class Command { solve, eliminate, verify, diophantine, orbit };
Command command_from_string(const std::string& s);

/// Exit codes of run().
enum ExitCode : int { exit_pass = 0, exit_divergence = 2, exit_arithmetic = 3, exit_config = 4 };

struct RunReport {
  int exit_code = exit_pass;
  std::string status = "pass";
  std::string cause;
  /// Deterministic for a given config.
  nlohmann::json report;
  /// Wall-clock data, kept apart from the deterministic report.
  nlohmann::json timing;
  std::vector<IterationRecord> iterations;
};

/// diophantine gate -> solve -> optional elimination -> orbit oracle. Stage
/// failures are reported through exit_code and cause, not exceptions.
RunReport run(const ProblemConfig& cfg, Command cmd = Command::verify);

/// Writes report.json (report plus a separate "timing" field) or
/// iterations.csv, and iterations.jsonl, into cfg.out_dir.
void write_reports(const RunReport& r, const ProblemConfig& cfg);

std::string iterations_csv(const std::vector<IterationRecord>& its);

}  // namespace kam
