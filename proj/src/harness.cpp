#include "kam/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "kam/errors.hpp"
#include "kam/serialization.hpp"

namespace kam {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError("config: " + field + ": " + msg);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "must be an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) fail(path + "." + k, "unknown field");
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

int integer(const json& v, const std::string& field, int lo) {
  if (!v.is_number_integer()) fail(field, "must be an integer");
  const int x = v.get<int>();
  if (x < lo) fail(field, "must be >= " + std::to_string(lo));
  return x;
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "must be a boolean");
  return v.get<bool>();
}

std::string string(const json& v, const std::string& field, const std::set<std::string>& choices = {}) {
  if (!v.is_string()) fail(field, "must be a string");
  const std::string s = v.get<std::string>();
  if (!choices.empty() && !choices.count(s)) {
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
    fail(field, "must be one of " + list);
  }
  return s;
}

// A frequency: a number, "golden", "silver" or "p/q".
double frequency(const json& v, const std::string& field) {
  if (v.is_number()) return number(v, field);
  if (!v.is_string()) fail(field, "must be a number or a string");
  const std::string s = v.get<std::string>();
  if (s == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
  if (s == "silver") return std::sqrt(2.0) - 1.0;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    try {
      std::size_t a = 0, b = 0;
      const long long p = std::stoll(s.substr(0, slash), &a);
      const long long q = std::stoll(s.substr(slash + 1), &b);
      if (a == slash && b == s.size() - slash - 1 && q != 0) return static_cast<double>(p) / q;
    } catch (const std::exception&) {
    }
  }
  fail(field, "unrecognized frequency '" + s + "'");
}

Eigen::VectorXd vector(const json& v, const std::string& field) {
  if (v.is_number()) return Eigen::VectorXd::Constant(1, number(v, field));
  if (!v.is_array() || v.empty()) fail(field, "must be a number or a non-empty array");
  Eigen::VectorXd x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x(i) = number(v[i], field + "[" + std::to_string(i) + "]");
  return x;
}

Eigen::VectorXd alpha_vector(const json& v, const std::string& field) {
  if (!v.is_array()) return Eigen::VectorXd::Constant(1, frequency(v, field));
  if (v.empty()) fail(field, "must not be empty");
  Eigen::VectorXd x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x(i) = frequency(v[i], field + "[" + std::to_string(i) + "]");
  return x;
}

// A number (1 x 1), an array of rows, or {"diag": [...]}.
Eigen::MatrixXd matrix(const json& v, const std::string& field) {
  if (v.is_number()) return Eigen::MatrixXd::Constant(1, 1, number(v, field));
  if (v.is_object()) {
    check_keys(v, field, {"diag"});
    if (!v.contains("diag")) fail(field, "object form needs 'diag'");
    return vector(v["diag"], field + ".diag").asDiagonal();
  }
  if (!v.is_array() || v.empty() || !v[0].is_array()) fail(field, "must be a number, rows or {\"diag\": [...]}");
  const std::size_t cols = v[0].size();
  Eigen::MatrixXd M(v.size(), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols) fail(field, "rows must have equal length");
    for (std::size_t j = 0; j < cols; ++j)
      M(i, j) = number(v[i][j], field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return M;
}

std::vector<int> int_list(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "must be an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) fail(field + "[" + std::to_string(i) + "]", "must be an integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

std::vector<TrigTerm> parse_terms(const json& v, const std::string& field, int n, int m) {
  if (!v.is_array()) fail(field, "must be an array");
  std::vector<TrigTerm> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const json& t = v[i];
    check_keys(t, f, {"target", "index", "k", "r", "a", "b"});
    TrigTerm term;
    term.theta = string(t.value("target", json("r")), f + ".target", {"theta", "r"}) == "theta";
    term.index = integer(t.value("index", json(0)), f + ".index", 0);
    if (term.index >= (term.theta ? n : m)) fail(f + ".index", "out of range");
    if (!t.contains("k")) fail(f + ".k", "required");
    term.k = int_list(t["k"], f + ".k");
    if (static_cast<int>(term.k.size()) != n) fail(f + ".k", "must have n entries");
    if (t.contains("r")) {
      term.r = int_list(t["r"], f + ".r");
      if (static_cast<int>(term.r.size()) != m) fail(f + ".r", "must have m entries");
      for (int e : term.r)
        if (e < 0) fail(f + ".r", "exponents must be >= 0");
    }
    term.a = t.contains("a") ? number(t["a"], f + ".a") : 0.0;
    term.b = t.contains("b") ? number(t["b"], f + ".b") : 0.0;
    out.push_back(term);
  }
  return out;
}

Eigen::VectorXd fill_b0(const json& p, int m) {
  if (!p.contains("b0")) return Eigen::VectorXd::Zero(m);
  const json& v = p["b0"];
  if (v.is_number()) return Eigen::VectorXd::Constant(m, number(v, "problem.b0"));
  Eigen::VectorXd b = vector(v, "problem.b0");
  if (b.size() != m) fail("problem.b0", "must have m entries");
  return b;
}

void parse_problem(const json& p, const std::string& base_dir, ProblemConfig& c) {
  check_keys(p, "problem",
             {"family", "alpha", "A", "epsilon", "b0", "twist", "normal", "normal_shifted", "p1", "terms", "g",
              "beta0", "B0", "map", "map_file"});
  if (!p.contains("family")) fail("problem.family", "required");
  c.family = string(p["family"], "problem.family", {"russmann_1d", "diag_nd", "constructed", "explicit"});
  const bool needs_alpha = c.family != "explicit";
  if (needs_alpha && !p.contains("alpha")) fail("problem.alpha", "required");
  if (p.contains("alpha")) c.alpha = alpha_vector(p["alpha"], "problem.alpha");
  const double eps = p.contains("epsilon") ? number(p["epsilon"], "problem.epsilon") : 0.0;

  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (p.contains(k)) fail(std::string("problem.") + k, "not used by family " + c.family);
  };

  if (c.family == "russmann_1d") {
    forbid({"normal_shifted", "p1", "g", "beta0", "B0", "map", "map_file"});
    if (c.alpha.size() != 1) fail("problem.alpha", "russmann_1d needs n = 1");
    c.n = c.m = 1;
    c.russmann.alpha = c.alpha(0);
    c.russmann.epsilon = eps;
    c.russmann.b0 = fill_b0(p, 1)(0);
    if (p.contains("twist")) c.russmann.twist = number(p["twist"], "problem.twist");
    if (p.contains("normal")) c.russmann.normal = number(p["normal"], "problem.normal");
    if (p.contains("terms")) c.russmann_terms = parse_terms(p["terms"], "problem.terms", 1, 1);
    c.A = Eigen::MatrixXd::Constant(1, 1, c.russmann.normal);
  } else if (c.family == "diag_nd") {
    forbid({"twist", "g", "beta0", "B0", "map", "map_file"});
    c.n = static_cast<int>(c.alpha.size());
    if (p.contains("normal") == p.contains("normal_shifted"))
      fail("problem.normal", "give exactly one of normal, normal_shifted");
    Eigen::MatrixXd N = p.contains("normal") ? matrix(p["normal"], "problem.normal")
                                             : matrix(p["normal_shifted"], "problem.normal_shifted");
    if (N.rows() != N.cols()) fail("problem.normal", "must be square");
    if (p.contains("normal_shifted")) N += Eigen::MatrixXd::Identity(N.rows(), N.cols());
    c.m = static_cast<int>(N.rows());
    c.diag.alpha = c.alpha;
    c.diag.N = N;
    c.diag.p1 = p.contains("p1") ? matrix(p["p1"], "problem.p1") : Eigen::MatrixXd::Identity(c.n, c.m);
    if (c.diag.p1.rows() != c.n || c.diag.p1.cols() != c.m) fail("problem.p1", "must be n x m");
    c.diag.b0 = fill_b0(p, c.m);
    c.diag.epsilon = eps;
    if (p.contains("terms"))
      c.diag.terms = parse_terms(p["terms"], "problem.terms", c.n, c.m);
    else if (c.n == 2 && c.m == 2)
      c.diag.terms = default_diag_terms(2, 2);
    else if (eps != 0.0)
      fail("problem.terms", "required unless n = m = 2 or epsilon = 0");
    c.A = N;
  } else if (c.family == "constructed") {
    forbid({"twist", "normal_shifted", "p1", "terms", "b0", "epsilon", "map", "map_file"});
    if (c.alpha.size() != 1) fail("problem.alpha", "constructed needs n = 1");
    c.n = c.m = 1;
    c.constructed.alpha = c.alpha(0);
    if (p.contains("normal")) c.constructed.A = number(p["normal"], "problem.normal");
    if (p.contains("g")) c.constructed.g = number(p["g"], "problem.g");
    if (p.contains("beta0")) c.constructed.beta0 = number(p["beta0"], "problem.beta0");
    if (p.contains("B0")) c.constructed.B0 = number(p["B0"], "problem.B0");
    if (std::abs(c.constructed.g) > 0.05) fail("problem.g", "must satisfy |g| <= 0.05");
    c.A = Eigen::MatrixXd::Constant(1, 1, c.constructed.A);
  } else {
    forbid({"twist", "normal", "normal_shifted", "p1", "terms", "b0", "epsilon", "g", "beta0", "B0"});
    if (p.contains("map") == p.contains("map_file")) fail("problem.map", "give exactly one of map, map_file");
    if (p.contains("map")) {
      c.explicit_map = p["map"];
    } else {
      std::filesystem::path path = string(p["map_file"], "problem.map_file");
      if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
      std::ifstream in(path);
      if (!in) fail("problem.map_file", "cannot open " + path.string());
      try {
        c.explicit_map = json::parse(in);
      } catch (const json::exception& e) {
        fail("problem.map_file", e.what());
      }
    }
    const FourierTaylorMap Q = map_from_json(c.explicit_map);
    c.n = Q.n();
    c.m = Q.m();
    if (c.alpha.size() == 0) {
      c.alpha.resize(c.n);
      for (int i = 0; i < c.n; ++i) c.alpha(i) = Q.rotation()[i] / (2.0 * std::numbers::pi);
    }
    if (c.alpha.size() != c.n) fail("problem.alpha", "must have n entries");
    if (!p.contains("A")) fail("problem.A", "required for explicit maps");
  }
  if (p.contains("A")) {
    c.A = matrix(p["A"], "problem.A");
    if (c.A.rows() != c.m || c.A.cols() != c.m) fail("problem.A", "must be m x m");
  }
}

}  // namespace

ProblemConfig parse_config(const json& j, const std::string& base_dir) {
  ProblemConfig c;
  check_keys(j, "config", {"problem", "discretization", "solver", "elimination", "diophantine", "orbit", "output"});
  if (!j.contains("problem")) fail("problem", "required");
  parse_problem(j["problem"], base_dir, c);

  if (j.contains("discretization")) {
    const json& d = j["discretization"];
    check_keys(d, "discretization", {"modes", "degree"});
    if (d.contains("modes")) c.modes = integer(d["modes"], "discretization.modes", 1);
    if (d.contains("degree")) c.degree = integer(d["degree"], "discretization.degree", 1);
  }
  if (c.family == "constructed" && c.degree != 0 && c.degree < 2)
    fail("discretization.degree", "constructed needs degree >= 2");
  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, "solver", {"max_iter", "tol", "free_b", "divergence_factor", "max_distance"});
    if (s.contains("max_iter")) c.solver.max_iter = integer(s["max_iter"], "solver.max_iter", 0);
    if (s.contains("tol")) c.solver.residual_tol = number(s["tol"], "solver.tol");
    if (s.contains("free_b")) c.solver.free_b = boolean(s["free_b"], "solver.free_b");
    if (s.contains("divergence_factor"))
      c.solver.divergence_factor = number(s["divergence_factor"], "solver.divergence_factor");
    if (s.contains("max_distance")) c.solver.max_distance = number(s["max_distance"], "solver.max_distance");
    if (c.solver.residual_tol <= 0.0) fail("solver.tol", "must be positive");
  }
  if (j.contains("elimination")) {
    const json& e = j["elimination"];
    check_keys(e, "elimination", {"mode", "tol", "max_outer", "joint", "precondition", "fd_step", "twist_tol"});
    if (e.contains("mode"))
      c.elimination_mode =
          string(e["mode"], "elimination.mode", {"none", "normal", "translate", "twist_translate"});
    if (e.contains("tol")) c.elimination.tol = number(e["tol"], "elimination.tol");
    if (e.contains("max_outer")) c.elimination.max_outer = integer(e["max_outer"], "elimination.max_outer", 0);
    if (e.contains("joint")) c.elimination.joint = boolean(e["joint"], "elimination.joint");
    if (e.contains("precondition"))
      c.elimination.precondition = boolean(e["precondition"], "elimination.precondition");
    if (e.contains("fd_step")) c.elimination.fd_step = number(e["fd_step"], "elimination.fd_step");
    if (e.contains("twist_tol")) c.elimination.twist_tol = number(e["twist_tol"], "elimination.twist_tol");
  }
  if (j.contains("diophantine")) {
    const json& d = j["diophantine"];
    check_keys(d, "diophantine", {"gate", "tau", "K_check", "gamma_min"});
    if (d.contains("gate")) c.diophantine_gate = boolean(d["gate"], "diophantine.gate");
    if (d.contains("tau")) c.tau = number(d["tau"], "diophantine.tau");
    if (d.contains("K_check")) c.K_check = integer(d["K_check"], "diophantine.K_check", 1);
    if (d.contains("gamma_min")) c.gamma_min = number(d["gamma_min"], "diophantine.gamma_min");
  }
  if (j.contains("orbit")) {
    const json& o = j["orbit"];
    check_keys(o, "orbit", {"points", "iterations", "tol"});
    if (o.contains("points")) c.orbit_points = integer(o["points"], "orbit.points", 1);
    if (o.contains("iterations")) c.orbit_iterations = integer(o["iterations"], "orbit.iterations", 0);
    if (o.contains("tol")) c.orbit_tol = number(o["tol"], "orbit.tol");
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"dir", "report"});
    if (o.contains("dir")) c.out_dir = string(o["dir"], "output.dir");
    if (o.contains("report")) c.report_format = string(o["report"], "output.report", {"json", "csv"});
  }
  c.elimination.newton = c.solver;
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(j, std::filesystem::path(path).parent_path().string());
}

BuiltMap build_map(const ProblemConfig& cfg) {
  const bool cons = cfg.family == "constructed";
  const int K = cfg.modes > 0 ? cfg.modes : (cons ? 64 : 32);
  const int d = cfg.degree > 0 ? cfg.degree : (cons ? 6 : 2);
  BuiltMap b;
  FourierTaylorMap unperturbed;
  if (cfg.family == "russmann_1d") {
    b.Q = russmann_1d(cfg.russmann, K, d);
    for (const auto& t : cfg.russmann_terms) add_trig_term(b.Q, t, cfg.russmann.epsilon);
    RussmannParams p0 = cfg.russmann;
    p0.epsilon = 0.0;
    unperturbed = russmann_1d(p0, K, d);
  } else if (cfg.family == "diag_nd") {
    b.Q = diag_nd(cfg.diag, K, d);
    DiagParams p0 = cfg.diag;
    p0.epsilon = 0.0;
    unperturbed = diag_nd(p0, K, d);
  } else if (cons) {
    b.constructed = constructed_1d(cfg.constructed, K, d);
    b.Q = b.constructed->Q;
    unperturbed = b.constructed->P0.map;
  } else {
    b.Q = map_from_json(cfg.explicit_map);
    if (cfg.modes > 0) b.Q = b.Q.with_cutoff(K);
    if (cfg.degree > 0) b.Q = b.Q.with_degree(d);
    unperturbed = b.Q;
  }
  b.sd = SpectralData::make(cfg.alpha, cfg.A);
  b.P0 = NormalForm::project(unperturbed, cfg.alpha, cfg.A);
  return b;
}

Command command_from_string(const std::string& s) {
  if (s == "solve") return Command::solve;
  if (s == "eliminate") return Command::eliminate;
  if (s == "verify") return Command::verify;
  if (s == "diophantine") return Command::diophantine;
  if (s == "orbit") return Command::orbit;
  throw ConfigError("unknown command '" + s + "'");
}

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::eliminate: return "eliminate";
    case Command::verify: return "verify";
    case Command::diophantine: return "diophantine";
    case Command::orbit: return "orbit";
  }
  return "";
}

class Stopwatch {
 public:
  explicit Stopwatch(json& out, const char* name) : out_(out), name_(name), t0_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    out_[name_] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  json& out_;
  const char* name_;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace

RunReport run(const ProblemConfig& cfg, Command cmd) {
  RunReport rr;
  json& rep = rr.report;
  rep["command"] = command_name(cmd);
  rep["family"] = cfg.family;
  rep["n"] = cfg.n;
  rep["m"] = cfg.m;
  rr.timing["stages"] = json::object();
  json& tstages = rr.timing["stages"];

  auto stop = [&](int code, const std::string& status, const std::string& cause) {
    rr.exit_code = code;
    rr.status = status;
    rr.cause = cause;
    rep["exit_code"] = code;
    rep["status"] = status;
    if (!cause.empty()) rep["cause"] = cause;
    return rr;
  };

  std::string stage = "build";
  try {
    BuiltMap b;
    {
      Stopwatch sw(tstages, "build");
      b = build_map(cfg);
    }
    rep["modes"] = b.Q.cutoff();
    rep["degree"] = b.Q.degree();

    stage = "diophantine";
    if (cfg.diophantine_gate || cmd == Command::diophantine) {
      Stopwatch sw(tstages, "diophantine");
      const double tau = cfg.tau > 0.0 ? cfg.tau : static_cast<double>(cfg.n);
      const int Kc = cfg.K_check > 0 ? cfg.K_check : 4 * b.Q.cutoff();
      const DiophantineReport d = verify_conditions(cfg.alpha, cfg.A, tau, Kc);
      rep["diophantine"] = diophantine_to_json(d);
      rep["diophantine"]["gamma_min"] = cfg.gamma_min;
      if (!(d.gamma_emp > cfg.gamma_min)) {
        std::ostringstream os;
        os << "diophantine_gate: gamma_emp = " << d.gamma_emp << " <= " << cfg.gamma_min;
        return stop(exit_arithmetic, "fail", os.str());
      }
    }
    if (cmd == Command::diophantine) return stop(exit_pass, "pass", "");

    stage = "solve";
    NewtonOptions opts = cfg.solver;
    opts.throw_on_failure = false;
    opts.on_iteration = [&](const IterationRecord& r) {
      rr.iterations.push_back(r);
      if (cfg.solver.on_iteration) cfg.solver.on_iteration(r);
    };
    NormalFormResult res;
    {
      Stopwatch sw(tstages, "solve");
      res = solve(b.Q, b.sd, opts);
    }
    rep["solve"] = result_to_json(res);
    if (!res.converged) return stop(exit_divergence, "fail", "solver_" + res.status);
    if (b.constructed) {
      const auto& c = *b.constructed;
      rep["recovery"] = {{"lambda0", translation_to_json(c.lambda0)},
                         {"lambda_error", [&] {
                            Translation d = res.lambda;
                            d += Translation{-c.lambda0.beta, -c.lambda0.b, -c.lambda0.B};
                            return d.norm();
                          }()},
                         {"G_error", res.G.max_abs_diff(c.G0)}};
    }

    std::string mode = cfg.elimination_mode;
    if (cmd == Command::eliminate && mode == "none") mode = "translate";
    if (cmd == Command::solve) mode = "none";

    FourierTaylorMap target = b.Q;
    Conjugacy torus = res.G;
    Translation lam = res.lambda;
    stage = "elimination";
    if (mode != "none") {
      Stopwatch sw(tstages, "elimination");
      EliminationOptions eo = cfg.elimination;
      eo.newton = cfg.solver;
      eo.newton.on_iteration = nullptr;
      if (mode == "normal") {
        const EliminateBResult e = eliminate_B(b.Q, b.sd, eo);
        rep["elimination"] = elimination_report(e);
        torus = e.result.G;
        lam = e.result.lambda;
      } else {
        eo.precondition = eo.precondition || mode == "twist_translate";
        const EliminateBetaResult e = eliminate_beta(b.Q, b.sd, eo);
        rep["elimination"] = elimination_report(e);
        const TranslatedTorus t = translated_torus(e.result, e.c_bar);
        target = e.map;
        torus = t.G;
        lam = Translation{Eigen::VectorXd::Zero(cfg.n), t.translation, e.result.lambda.B};
        const BZeroCheck bz = check_b_zero(e.result, e.sd);
        rep["elimination"]["b_zero"] = bz.applicable ? json(bz.pass) : json("not applicable");
      }
      rep["elimination"]["mode"] = mode;
    }

    stage = "orbit";
    {
      Stopwatch sw(tstages, "orbit");
      const int iters = cmd == Command::orbit || cmd == Command::verify ? cfg.orbit_iterations : 0;
      // A counter-term at the solver tolerance is an invariant torus: iterate it.
      if (iters > 0 && lam.norm() <= cfg.solver.residual_tol) lam = Translation::zero(cfg.n, cfg.m);
      const OrbitStats s = orbit_residual(target, torus, lam, cfg.alpha, cfg.orbit_points, iters);
      rep["orbit"] = orbit_to_json(s);
      rep["orbit"]["tol"] = cfg.orbit_tol;
      if (!(s.one_step_max <= cfg.orbit_tol)) {
        std::ostringstream os;
        os << "orbit_gate: one-step residual " << s.one_step_max << " > " << cfg.orbit_tol;
        return stop(exit_divergence, "fail", os.str());
      }
    }
    return stop(exit_pass, "pass", "");
  } catch (const ConfigError& e) {
    return stop(exit_config, "error", stage + ": " + e.what());
  } catch (const ShapeError& e) {
    return stop(exit_config, "error", stage + ": " + e.what());
  } catch (const ResonanceError& e) {
    return stop(exit_arithmetic, "fail", stage + ": " + e.what());
  } catch (const ConvergenceError& e) {
    return stop(exit_divergence, "fail", stage + ": " + e.what());
  } catch (const DomainError& e) {
    return stop(exit_divergence, "fail", stage + ": " + e.what());
  }
}

}  // namespace kam
