// Acceptance harness: runs the four benchmark studies plus the property
// suites and prints one PASS/FAIL line per criterion. Exit code is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mfglg/study.hpp"
#include "mfglg/verify.hpp"

using namespace mfglg;
namespace fs = std::filesystem;

namespace {

struct Gate {
  std::string what;
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<Gate> gates;
  bool pass() const {
    for (const auto& g : gates)
      if (!g.pass) return false;
    return !gates.empty();
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double factor_of(double measured, double target) {
  if (measured <= 0.0 || target <= 0.0) return 1e9;
  return std::max(measured / target, target / measured);
}

void gate_factor(Criterion& c, const std::string& what, double measured, double target,
                 double limit) {
  const double f = factor_of(measured, target);
  c.gates.push_back({what, f <= limit,
                     num(measured) + " vs " + num(target) + " (factor " + num(f) + ", limit " +
                         num(limit) + ")"});
}

void gate_band(Criterion& c, const std::string& what, double measured, double center,
               double halfwidth) {
  const bool ok = std::abs(measured - center) <= halfwidth;
  c.gates.push_back({what, ok,
                     num(measured) + " vs " + num(center) + " +- " + num(halfwidth)});
}

void gate_min(Criterion& c, const std::string& what, double measured, double floor_value) {
  c.gates.push_back({what, measured >= floor_value,
                     num(measured) + " (floor " + num(floor_value) + ")"});
}

void gate_flag(Criterion& c, const std::string& what, bool ok, const std::string& detail) {
  c.gates.push_back({what, ok, detail});
}

bool rows_usable(const ConvergenceReport& rep, std::size_t expected, Criterion& c) {
  if (rep.rows.size() != expected) {
    gate_flag(c, "row count", false,
              std::to_string(rep.rows.size()) + " rows, expected " + std::to_string(expected));
    return false;
  }
  bool ok = true;
  for (const auto& r : rep.rows) {
    if (r.failed) {
      gate_flag(c, "row dx=" + num(r.dx), false, "failed: " + r.failure);
      ok = false;
    } else if (!r.converged) {
      gate_flag(c, "row dx=" + num(r.dx), false, "fixed point hit the iteration cap");
      ok = false;
    }
  }
  return ok;
}

double rate_between(const RunMetrics& coarse, const RunMetrics& fine, const std::string& field) {
  return convergence_rate(coarse.fields.at(field).e_2, fine.fields.at(field).e_2, coarse.dx,
                          fine.dx);
}

ConvergenceReport run_and_emit(StudyConfig cfg, const fs::path& out) {
  cfg.out_dir = out.string();
  std::cout << ".. running " << cfg.test << " study (" << cfg.dx_list.size() << " rows) -> "
            << out.string() << std::endl;
  const ConvergenceReport rep = run_study(cfg);
  emit_report(rep, cfg);
  return rep;
}

// --- published benchmark values the gates compare against ------------------

// high-noise one-dimensional benchmark
const double kHiV_inf[4] = {6.20e-5, 1.09e-5, 2.13e-6, 5.42e-7};
const double kHiV_2[4] = {7.40e-5, 1.43e-5, 3.41e-6, 1.00e-6};
const double kHiM_2[4] = {2.32e-2, 5.10e-3, 8.90e-4, 1.26e-4};
const double kHiM_p2[3] = {2.19, 2.52, 2.82};

// low-noise one-dimensional benchmark
const double kLoV_inf[4] = {1.68e-4, 3.56e-5, 5.86e-6, 1.06e-6};
const double kLoV_2[4] = {1.70e-4, 3.48e-5, 5.75e-6, 1.04e-6};
const double kLoM_2[4] = {1.01e-2, 2.53e-3, 5.56e-4, 1.14e-4};
const double kLoM_p2[3] = {2.00, 2.19, 2.29};

// two-dimensional benchmark, three coarsest rows
const double k2dM_2[3] = {1.40e-1, 3.53e-2, 3.75e-3};
const double k2dG_inf[3] = {4.64e-1, 1.65e-2, 4.45e-4};
const double k2dG_2[3] = {1.41e-1, 3.52e-3, 1.04e-4};

// local-coupling benchmark
const double kLocV_inf[4] = {5.38e-2, 1.43e-2, 4.25e-3, 8.84e-4};
const double kLocV_2[4] = {3.80e-2, 1.29e-2, 3.24e-3, 7.99e-4};
const double kLocG_inf[4] = {8.09e-2, 1.37e-2, 3.94e-3, 8.34e-4};
const double kLocG_2[4] = {4.96e-2, 1.19e-2, 2.79e-3, 7.07e-4};
const double kLocM_inf[4] = {9.07e-2, 1.81e-2, 4.81e-3, 7.64e-4};
const double kLocM_2[4] = {4.82e-2, 6.79e-3, 1.36e-3, 2.06e-4};

void lq1d_protocol_gates(Criterion& c, const ConvergenceReport& rep, const double v_inf[4],
                         const double v_2[4], const double m_2[4], const double m_p2[3]) {
  if (!rows_usable(rep, 4, c)) return;
  for (int i = 0; i < 4; ++i) {
    const auto& r = rep.rows[i];
    gate_factor(c, "E2(m) row " + std::to_string(i + 1), r.fields.at("m").e_2, m_2[i], 3.0);
    gate_factor(c, "Einf(v) row " + std::to_string(i + 1), r.fields.at("v").e_inf, v_inf[i],
                3.0);
    gate_factor(c, "E2(v) row " + std::to_string(i + 1), r.fields.at("v").e_2, v_2[i], 3.0);
  }
  for (int i = 0; i < 3; ++i) {
    gate_band(c, "p2(m) pair " + std::to_string(i + 1),
              rate_between(rep.rows[i], rep.rows[i + 1], "m"), m_p2[i], 0.4);
  }
}

} // namespace

int main(int argc, char** argv) {
  fs::path out = "acceptance_out";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--out-dir") out = argv[i + 1];
  fs::create_directories(out);

  std::vector<Criterion> criteria;
  std::vector<const ConvergenceReport*> drift_reports;

  // ---- criterion 1: one-dimensional high-noise benchmark ----
  Criterion c1{1, "high-noise 1-D benchmark: errors and rates against published tables"};
  const auto t1_start = std::chrono::steady_clock::now();
  const ConvergenceReport rep_hi =
      run_and_emit(StudyConfig::defaults_for("lq-1d"), out / "lq1d_hi");
  const double t1_wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t1_start).count();
  lq1d_protocol_gates(c1, rep_hi, kHiV_inf, kHiV_2, kHiM_2, kHiM_p2);
  gate_flag(c1, "runtime under 10 minutes", t1_wall < 600.0, num(t1_wall) + " s");
  criteria.push_back(c1);
  drift_reports.push_back(&rep_hi);

  // ---- criterion 2: one-dimensional low-noise benchmark ----
  Criterion c2{2, "low-noise 1-D benchmark: errors, rates, and positivity pattern"};
  StudyConfig lo = StudyConfig::defaults_for("lq-1d");
  lo.sigma2_half = 0.005;
  const ConvergenceReport rep_lo = run_and_emit(lo, out / "lq1d_lo");
  lq1d_protocol_gates(c2, rep_lo, kLoV_inf, kLoV_2, kLoM_2, kLoM_p2);
  if (rep_lo.rows.size() == 4 && !rep_lo.rows[0].failed && !rep_lo.rows[1].failed &&
      !rep_lo.rows[2].failed && !rep_lo.rows[3].failed) {
    const double p0 = rep_lo.rows[0].positivity, p1 = rep_lo.rows[1].positivity;
    const double p2 = rep_lo.rows[2].positivity, p3 = rep_lo.rows[3].positivity;
    gate_flag(c2, "positivity error decreases then vanishes",
              p0 > p1 && p1 > p2 && p2 == 0.0 && p3 == 0.0,
              num(p0) + " > " + num(p1) + " > " + num(p2) + " = " + num(p3));
  }
  criteria.push_back(c2);
  drift_reports.push_back(&rep_lo);

  // ---- criterion 3: two-dimensional benchmark ----
  Criterion c3{3, "2-D benchmark: density and gradient errors on the three coarsest grids"};
  const auto t3_start = std::chrono::steady_clock::now();
  const ConvergenceReport rep_2d =
      run_and_emit(StudyConfig::defaults_for("lq-2d"), out / "lq2d");
  const double t3_wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t3_start).count();
  if (rows_usable(rep_2d, 3, c3)) {
    for (int i = 0; i < 3; ++i) {
      const auto& r = rep_2d.rows[i];
      gate_factor(c3, "E2(m) row " + std::to_string(i + 1), r.fields.at("m").e_2, k2dM_2[i],
                  5.0);
      for (const char* gfield : {"dx1v", "dx2v"}) {
        gate_factor(c3, std::string("Einf(") + gfield + ") row " + std::to_string(i + 1),
                    r.fields.at(gfield).e_inf, k2dG_inf[i], 5.0);
        gate_factor(c3, std::string("E2(") + gfield + ") row " + std::to_string(i + 1),
                    r.fields.at(gfield).e_2, k2dG_2[i], 5.0);
      }
    }
    gate_min(c3, "p2(m) finest pair", rate_between(rep_2d.rows[1], rep_2d.rows[2], "m"), 1.8);
  }
  gate_flag(c3, "runtime under 2 hours", t3_wall < 7200.0, num(t3_wall) + " s");
  criteria.push_back(c3);
  drift_reports.push_back(&rep_2d);

  // ---- criterion 4: local-coupling benchmark against a fine reference ----
  Criterion c4{4, "local-coupling 1-D benchmark: rates against a fine reference"};
  StudyConfig loc = StudyConfig::defaults_for("local-1d");
  loc.cache_dir = (out / "cache").string();
  const ConvergenceReport rep_loc = run_and_emit(loc, out / "local1d");
  if (rows_usable(rep_loc, 4, c4)) {
    const double* tables[6] = {kLocV_inf, kLocV_2, kLocG_inf, kLocG_2, kLocM_inf, kLocM_2};
    const char* fields[3] = {"v", "dxv", "m"};
    for (int fi = 0; fi < 3; ++fi) {
      for (int i = 0; i < 4; ++i) {
        const auto& e = rep_loc.rows[i].fields.at(fields[fi]);
        gate_factor(c4, std::string("Einf(") + fields[fi] + ") row " + std::to_string(i + 1),
                    e.e_inf, tables[2 * fi][i], 3.0);
        gate_factor(c4, std::string("E2(") + fields[fi] + ") row " + std::to_string(i + 1),
                    e.e_2, tables[2 * fi + 1][i], 3.0);
      }
      for (int i = 0; i < 3; ++i) {
        const double rate = rate_between(rep_loc.rows[i], rep_loc.rows[i + 1], fields[fi]);
        gate_min(c4, std::string("p2(") + fields[fi] + ") pair " + std::to_string(i + 1), rate,
                 i == 2 ? 2.0 : 1.5);
      }
    }
  }
  criteria.push_back(c4);
  drift_reports.push_back(&rep_loc);

  // ---- criterion 5: conservation across every solve above ----
  Criterion c5{5, "mass conservation: nodal-sum drift at most 1e-12 in every solve"};
  {
    double worst = 0.0;
    int solves = 0;
    for (const auto* rep : drift_reports) {
      for (const auto& r : rep->rows) {
        if (r.failed) continue;
        worst = std::max(worst, r.mass_drift);
        ++solves;
      }
      if (rep->reference_mass_drift >= 0.0) {
        worst = std::max(worst, rep->reference_mass_drift);
        ++solves;
      }
    }
    gate_flag(c5, "drift over " + std::to_string(solves) + " solves", worst <= 1e-12,
              "worst " + num(worst));
  }
  criteria.push_back(c5);

  // ---- criterion 6: mean-square stability across refinements ----
  Criterion c6{6, "mean-square stability of the density across refinements"};
  if (rep_hi.rows.size() == 4) {
    for (int i = 0; i < 4; ++i) {
      const auto& r = rep_hi.rows[i];
      if (r.failed) continue;
      gate_flag(c6, "row " + std::to_string(i + 1) + " peak within 3x of start",
                r.l2_max <= 3.0 * r.l2_init,
                "peak " + num(r.l2_max) + ", start " + num(r.l2_init));
    }
    for (int i = 0; i + 1 < 4; ++i) {
      const auto& a = rep_hi.rows[i];
      const auto& b = rep_hi.rows[i + 1];
      if (a.failed || b.failed) continue;
      const double rel = std::abs(b.l2_max - a.l2_max) / a.l2_max;
      gate_flag(c6, "peak varies <20% between rows " + std::to_string(i + 1) + "," +
                        std::to_string(i + 2),
                rel < 0.2, num(100.0 * rel) + "%");
    }
  }
  criteria.push_back(c6);

  // ---- criteria 7 and 8: property suites ----
  std::cout << ".. running self checks" << std::endl;
  const auto t78_start = std::chrono::steady_clock::now();
  const auto checks = verify::run_checks((out / "verify_scratch").string());
  const double t78_wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t78_start).count();

  Criterion c7{7, "oracle independence: closed forms validated without the solver"};
  const std::set<std::string> oracle_names = {
      "oracle-riccati-residual", "oracle-value-identities", "oracle-density-pde",
      "oracle-density-mass",     "oracle-variance-ode",     "fp-ou-convergence"};
  for (const auto& r : checks)
    if (oracle_names.count(r.name)) gate_flag(c7, r.name, r.pass, r.detail);
  gate_flag(c7, "all oracle checks present", c7.gates.size() == oracle_names.size(),
            std::to_string(c7.gates.size()) + " of " + std::to_string(oracle_names.size()));
  criteria.push_back(c7);

  Criterion c8{8, "unit-level property suite passes in under a minute"};
  {
    int failed = 0;
    for (const auto& r : checks)
      if (!r.pass) {
        gate_flag(c8, r.name, false, r.detail);
        ++failed;
      }
    gate_flag(c8, "all " + std::to_string(checks.size()) + " checks pass", failed == 0,
              std::to_string(failed) + " failed");
    gate_flag(c8, "suite runtime under 60 s", t78_wall < 60.0, num(t78_wall) + " s");
  }
  criteria.push_back(c8);

  // ---- summary ----
  std::ostringstream summary;
  int failures = 0;
  for (const auto& c : criteria) {
    const bool ok = c.pass();
    if (!ok) ++failures;
    summary << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.title << "\n";
    for (const auto& g : c.gates)
      if (!g.pass) summary << "       failed gate: " << g.what << " -- " << g.detail << "\n";
  }
  summary << failures << " of " << criteria.size() << " criteria failed\n";

  std::cout << "\n" << summary.str();
  std::ofstream(out / "acceptance_summary.txt") << summary.str();

  // full gate-by-gate record for inspection
  std::ofstream detail(out / "acceptance_gates.txt");
  for (const auto& c : criteria) {
    detail << "criterion " << c.id << ": " << c.title << "\n";
    for (const auto& g : c.gates)
      detail << "  " << (g.pass ? "pass" : "FAIL") << "  " << g.what << "  " << g.detail
             << "\n";
  }
  return failures;
}
