#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfglg/metrics.hpp"
#include "mfglg/mfg.hpp"

namespace mfglg {

// flat key=value configuration with per-test defaults; precedence is
// defaults < config file < environment (MFGLG_*) < command-line flags
struct StudyConfig {
  std::string test = "lq-1d"; // lq-1d | lq-2d | local-1d | fp-only-ou
  double sigma2_half = 0.05;
  double T = 0.25;
  double domain_lo = -2.0;
  double domain_hi = 2.0;
  std::vector<double> dx_list{0.2, 0.1, 0.05, 0.025};
  double dt_c = 0.25;      // dt = dt_c * dx^dt_gamma
  double dt_gamma = 4.0 / 3.0;
  double tau = 1e-9;
  int max_outer = 40;
  double damping = 1.0;
  double mu0 = 0.3;        // initial mean, repeated per axis
  double v0_var = 0.0625;  // initial variance per axis
  double control_r = 0.0;  // 0 = derive from the cost data
  int control_coarse = 15;
  int control_rounds = 6;
  int control_refine = 9;
  double ref_dx = 0.0;     // local-1d reference spacing
  std::string fp_mode = "simpson"; // simpson | exact
  std::string out_dir = "results";
  std::string cache_dir;   // defaults to <out_dir>/cache

  std::map<std::string, std::string> as_map() const;
  static StudyConfig defaults_for(const std::string& test_id);
  void apply(const std::string& key, const std::string& value); // throws on unknown key
  void apply_file(const std::string& path);
  void apply_env();
};

struct RunMetrics {
  double dx = 0.0, dt = 0.0;
  int iterations = 0;
  bool converged = true;
  bool failed = false;
  std::string failure;
  double positivity = 0.0;
  double mass_drift = 0.0;
  double wall_s = 0.0;
  double l2_init = 0.0, l2_max = 0.0;
  double max_abs_alpha = 0.0;
  std::map<std::string, ErrorPair> fields; // keyed m, v, dxv / dx1v, dx2v
};

struct PlotData {
  std::vector<Point> x;
  std::vector<double> m_T, m_exact_T, v_0, v_exact_0;
};

struct ConvergenceReport {
  std::string test;
  std::vector<std::string> field_names;
  std::vector<RunMetrics> rows;
  PlotData finest;
  // mass drift of the reference solve when one was needed; negative when
  // no reference was involved in this study
  double reference_mass_drift = -1.0;
};

ConvergenceReport run_study(const StudyConfig& cfg);
void emit_report(const ConvergenceReport& report, const StudyConfig& cfg);

// shortest decimal text that round-trips the value exactly
std::string format_double(double v);
std::optional<double> parse_double(const std::string& s);

// stable hash of the key=value lines that define a solve (for the reference cache)
std::uint64_t config_hash(const std::map<std::string, std::string>& kv);

// solve one refinement row of a study; exposed for calibration and tests
MFGSolution solve_row(const StudyConfig& cfg, double dx, MFGProblem* problem_out = nullptr);

} // namespace mfglg
