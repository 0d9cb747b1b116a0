#include <filesystem>
#include <fstream>
#include <sstream>

#include "kam/errors.hpp"
#include "kam/harness.hpp"

namespace kam {

std::string iterations_csv(const std::vector<IterationRecord>& its) {
  std::ostringstream os;
  os.precision(17);
  os << "iter,residual,dG_norm,dlambda_norm,counterterm_cond\n";
  for (const auto& r : its)
    os << r.iter << ',' << r.residual << ',' << r.dG_norm << ',' << r.dlambda_norm << ',' << r.counterterm_cond
       << '\n';
  return os.str();
}

void write_reports(const RunReport& r, const ProblemConfig& cfg) {
  if (cfg.out_dir.empty()) return;
  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("output.dir: cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) throw ConfigError("output.dir: cannot write " + (dir / name).string());
    out << text;
  };
  nlohmann::json full = r.report;
  full["timing"] = r.timing;
  write("report.json", full.dump(2) + "\n");
  if (cfg.report_format == "csv") {
    write("iterations.csv", iterations_csv(r.iterations));
  } else {
    std::string lines;
    for (const auto& it : r.iterations) lines += iteration_to_json(it).dump() + "\n";
    write("iterations.jsonl", lines);
  }
}

}  // namespace kam
