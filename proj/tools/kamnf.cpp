// kamnf: normal-form solver, parameter elimination and verification runs.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "kam/errors.hpp"
#include "kam/harness.hpp"

namespace {

struct Overrides {
  std::string config;
  int modes = 0;
  int degree = 0;
  double tol = 0.0;
  int max_iter = -1;
  std::string report;
  std::string out;
  bool quiet = false;
};

void add_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Problem config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--modes", o.modes, "Fourier cutoff K")->check(CLI::PositiveNumber);
  sub->add_option("--degree", o.degree, "Jet degree in r")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "Newton residual tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", o.max_iter, "Newton iteration limit")->check(CLI::NonNegativeNumber);
  sub->add_option("--report", o.report, "Iteration table format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", o.out, "Report directory");
  sub->add_flag("--quiet", o.quiet, "No iteration log on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal forms of quasi-periodic tori: solve, eliminate, verify, diophantine, orbit"};
  app.require_subcommand(1);
  Overrides o;
  const char* names[][2] = {{"solve", "Newton solve for (G, P, lambda)"},
                            {"eliminate", "Solve and eliminate counter-terms (translate by default)"},
                            {"verify", "Every configured stage and gate"},
                            {"diophantine", "Arithmetic conditions only"},
                            {"orbit", "Solve, then iterate the orbit oracle"}};
  for (const auto& n : names) add_flags(app.add_subcommand(n[0], n[1]), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kam::exit_config;
  }

  const std::string cmd_name = app.get_subcommands().front()->get_name();
  try {
    kam::ProblemConfig cfg = kam::load_config(o.config);
    if (o.modes > 0) cfg.modes = o.modes;
    if (o.degree > 0) cfg.degree = o.degree;
    if (o.tol > 0.0) cfg.solver.residual_tol = o.tol;
    if (o.max_iter >= 0) cfg.solver.max_iter = o.max_iter;
    if (!o.report.empty()) cfg.report_format = o.report;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (!o.quiet)
      cfg.solver.on_iteration = [](const kam::IterationRecord& r) {
        std::cerr << kam::iteration_to_json(r).dump() << '\n';
      };
    const kam::RunReport r = kam::run(cfg, kam::command_from_string(cmd_name));
    kam::write_reports(r, cfg);
    std::cout << r.report.dump(2) << '\n';
    if (r.exit_code != kam::exit_pass) std::cerr << "kamnf: " << r.cause << '\n';
    return r.exit_code;
  } catch (const kam::ConfigError& e) {
    std::cerr << "kamnf: " << e.what() << '\n';
    return kam::exit_config;
  } catch (const kam::Error& e) {
    std::cerr << "kamnf: " << e.what() << '\n';
    return kam::exit_divergence;
  }
}
