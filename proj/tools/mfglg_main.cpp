// command line front end: convergence studies and self checks
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfglg/study.hpp"
#include "mfglg/verify.hpp"

namespace {

struct KeyValue {
  std::string key, value;
};

std::string trim_copy(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<KeyValue> slurp_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::vector<KeyValue> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim_copy(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    out.push_back({trim_copy(t.substr(0, eq)), trim_copy(t.substr(eq + 1))});
  }
  return out;
}

int run_command(const std::string& config_path, const std::string& test_flag,
                const std::string& out_dir_flag, const std::string& dx_list_flag,
                const std::string& tau_flag, const std::string& max_outer_flag) {
  std::vector<KeyValue> file_kv;
  if (!config_path.empty()) file_kv = slurp_config(config_path);

  // the test id decides the defaults, so resolve it across all layers first
  std::string test_id = "lq-1d";
  for (const auto& kv : file_kv)
    if (kv.key == "test") test_id = kv.value;
  if (const char* env = std::getenv("MFGLG_TEST")) test_id = env;
  if (!test_flag.empty()) test_id = test_flag;

  mfglg::StudyConfig cfg = mfglg::StudyConfig::defaults_for(test_id);
  for (const auto& kv : file_kv) cfg.apply(kv.key, kv.value);
  cfg.apply_env();
  cfg.apply("test", test_id);
  if (!out_dir_flag.empty()) cfg.apply("out_dir", out_dir_flag);
  if (!dx_list_flag.empty()) cfg.apply("dx_list", dx_list_flag);
  if (!tau_flag.empty()) cfg.apply("tau", tau_flag);
  if (!max_outer_flag.empty()) cfg.apply("max_outer", max_outer_flag);

  std::cout << "study " << cfg.test << " with " << cfg.dx_list.size()
            << " refinement levels\n";
  const mfglg::ConvergenceReport report = mfglg::run_study(cfg);
  mfglg::emit_report(report, cfg);

  bool any_failed = false;
  for (const auto& field : report.field_names) {
    std::cout << "\nfield " << field << "\n";
    std::printf("  %-10s %-12s %-12s %-8s %-8s %s\n", "dx", "e_inf", "e_2", "p_inf", "p_2",
                "iters");
    const mfglg::RunMetrics* prev = nullptr;
    for (const auto& row : report.rows) {
      if (row.failed) {
        std::printf("  %-10g failed: %s\n", row.dx, row.failure.c_str());
        any_failed = true;
        prev = nullptr;
        continue;
      }
      const auto it = row.fields.find(field);
      if (it == row.fields.end()) continue;
      std::string pi = "-", p2 = "-";
      if (prev) {
        const auto& pe = prev->fields.at(field);
        pi = mfglg::format_double(
            mfglg::convergence_rate(pe.e_inf, it->second.e_inf, prev->dx, row.dx));
        p2 = mfglg::format_double(
            mfglg::convergence_rate(pe.e_2, it->second.e_2, prev->dx, row.dx));
      }
      std::printf("  %-10g %-12.4e %-12.4e %-8.8s %-8.8s %d\n", row.dx, it->second.e_inf,
                  it->second.e_2, pi.c_str(), p2.c_str(), row.iterations);
      prev = &row;
    }
  }
  std::cout << "\nreport written to " << cfg.out_dir << "\n";
  return any_failed ? 1 : 0;
}

int verify_command(const std::string& scratch) {
  const auto results = mfglg::verify::run_checks(scratch);
  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail << ")\n";
    if (!r.pass) ++failures;
  }
  std::cout << results.size() - failures << "/" << results.size() << " checks passed\n";
  return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean field game solver with a high-order transport discretization"};
  app.require_subcommand(1);

  std::string config_path, test_flag, out_dir_flag, dx_list_flag, tau_flag, max_outer_flag;
  auto* run = app.add_subcommand("run", "run a convergence study");
  run->add_option("--config", config_path, "key=value configuration file");
  run->add_option("--test", test_flag, "test id: lq-1d | lq-2d | local-1d | fp-only-ou");
  run->add_option("--out-dir", out_dir_flag, "output directory for tables and plot data");
  run->add_option("--dx-list", dx_list_flag, "comma separated mesh widths");
  run->add_option("--tau", tau_flag, "fixed-point stopping tolerance");
  run->add_option("--max-outer", max_outer_flag, "cap on fixed-point sweeps");

  std::string scratch = "verify_scratch";
  auto* verify = app.add_subcommand("verify", "run the built-in self checks");
  verify->add_option("--scratch-dir", scratch, "directory for temporary check output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_command(config_path, test_flag, out_dir_flag, dx_list_flag, tau_flag,
                         max_outer_flag);
    return verify_command(scratch);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}
