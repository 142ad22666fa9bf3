#include "mfglg/study.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mfglg/lq.hpp"

namespace mfglg {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc()) return std::nullopt;
  return v;
}

std::uint64_t config_hash(const std::map<std::string, std::string>& kv) {
  std::uint64_t h = 1469598103934665603ull; // FNV-1a
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : kv) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  return h;
}

namespace {

std::string join_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v[i]);
  }
  return s;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string tok;
  std::stringstream ss(s);
  while (std::getline(ss, tok, ',')) {
    const auto v = parse_double(tok);
    if (!v) throw std::invalid_argument("bad numeric list entry: " + tok);
    out.push_back(*v);
  }
  if (out.empty()) throw std::invalid_argument("empty numeric list");
  return out;
}

double need_double(const std::string& key, const std::string& value) {
  const auto v = parse_double(value);
  if (!v) throw std::invalid_argument("bad numeric value for " + key + ": " + value);
  return *v;
}

int need_int(const std::string& key, const std::string& value) {
  const auto v = parse_double(value);
  if (!v || *v != std::floor(*v))
    throw std::invalid_argument("bad integer value for " + key + ": " + value);
  return static_cast<int>(*v);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// initial density of the congestion test: a normalized squared-sine bump
double bump_density(double x) {
  if (x < 0.25 || x > 0.75) return 0.0;
  const double s = std::sin(2.0 * M_PI * (x - 0.25));
  return 4.0 * s * s;
}

struct OuTruth {
  double mu = 0.0, var = 0.0;
  double operator()(double x) const {
    return std::exp(-(x - mu) * (x - mu) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
  }
};

OuTruth ou_at(double t, double mu0, double v0, double sigma2) {
  OuTruth o;
  o.mu = mu0 * std::exp(-t);
  o.var = v0 * std::exp(-2.0 * t) + 0.5 * sigma2 * (1.0 - std::exp(-2.0 * t));
  return o;
}

int steps_for(double T, double c, double gamma, double dx) {
  const double rule = c * std::pow(dx, gamma);
  return static_cast<int>(std::ceil(T / rule - 1e-12));
}

// control radius from the slope of the initial running cost: a sampled bound
// on |grad F(0,.)| (plus the terminal slope, zero in all shipped tests),
// scaled by the horizon with a half-again safety margin
double auto_radius(const StudyConfig& cfg) {
  if (cfg.control_r > 0.0) return cfg.control_r;
  double sup_slope = 0.0;
  if (cfg.test == "lq-1d" || cfg.test == "lq-2d") {
    // quadratic cost around the initial mean: slope peaks at a box corner
    const double span = std::max(std::abs(cfg.domain_lo - cfg.mu0),
                                 std::abs(cfg.domain_hi - cfg.mu0));
    sup_slope = cfg.test == "lq-2d" ? span * std::sqrt(2.0) : span;
  } else if (cfg.test == "local-1d") {
    const int ns = 4000;
    const double h = (cfg.domain_hi - cfg.domain_lo) / ns;
    auto f0 = [&](double x) {
      const double m = bump_density(x);
      return 3.0 * bump_density(x) - std::min(4.0, m);
    };
    for (int i = 1; i < ns; ++i) {
      const double x = cfg.domain_lo + i * h;
      sup_slope = std::max(sup_slope, std::abs(f0(x + h) - f0(x - h)) / (2.0 * h));
    }
  }
  return std::max(0.5, 1.5 * cfg.T * sup_slope);
}

} // namespace

StudyConfig StudyConfig::defaults_for(const std::string& test_id) {
  StudyConfig c;
  c.test = test_id;
  if (test_id == "lq-1d") {
    // struct defaults already describe this study
  } else if (test_id == "lq-2d") {
    c.dx_list = {0.2, 0.1, 0.05};
    c.mu0 = 0.3;
    // narrower initial spread than the one-dimensional study: the planar
    // case exercises the under-resolved coarse regime on purpose
    c.v0_var = 0.0075;
  } else if (test_id == "local-1d") {
    c.T = 0.05;
    c.domain_lo = 0.0;
    c.domain_hi = 1.0;
    c.dx_list = {0.05, 0.025, 0.0125, 0.00625};
    c.dt_c = 1.0 / 3.0;
    c.dt_gamma = 1.5;
    c.ref_dx = 1.0 / 1500.0;
  } else if (test_id == "fp-only-ou") {
    // pure transport-diffusion study, no control problem
  } else {
    throw std::invalid_argument("unknown test id: " + test_id);
  }
  return c;
}

std::map<std::string, std::string> StudyConfig::as_map() const {
  std::map<std::string, std::string> m;
  m["test"] = test;
  m["sigma2_half"] = format_double(sigma2_half);
  m["T"] = format_double(T);
  m["domain_lo"] = format_double(domain_lo);
  m["domain_hi"] = format_double(domain_hi);
  m["dx_list"] = join_list(dx_list);
  m["dt_c"] = format_double(dt_c);
  m["dt_gamma"] = format_double(dt_gamma);
  m["tau"] = format_double(tau);
  m["max_outer"] = std::to_string(max_outer);
  m["damping"] = format_double(damping);
  m["mu0"] = format_double(mu0);
  m["v0_var"] = format_double(v0_var);
  m["control_r"] = format_double(control_r);
  m["control_coarse"] = std::to_string(control_coarse);
  m["control_rounds"] = std::to_string(control_rounds);
  m["control_refine"] = std::to_string(control_refine);
  m["ref_dx"] = format_double(ref_dx);
  m["fp_mode"] = fp_mode;
  m["out_dir"] = out_dir;
  m["cache_dir"] = cache_dir;
  return m;
}

void StudyConfig::apply(const std::string& key, const std::string& value) {
  if (key == "test") test = value;
  else if (key == "sigma2_half") sigma2_half = need_double(key, value);
  else if (key == "T") T = need_double(key, value);
  else if (key == "domain_lo") domain_lo = need_double(key, value);
  else if (key == "domain_hi") domain_hi = need_double(key, value);
  else if (key == "dx_list") dx_list = parse_list(value);
  else if (key == "dt_c") dt_c = need_double(key, value);
  else if (key == "dt_gamma") dt_gamma = need_double(key, value);
  else if (key == "tau") tau = need_double(key, value);
  else if (key == "max_outer") max_outer = need_int(key, value);
  else if (key == "damping") damping = need_double(key, value);
  else if (key == "mu0") mu0 = need_double(key, value);
  else if (key == "v0_var") v0_var = need_double(key, value);
  else if (key == "control_r") control_r = need_double(key, value);
  else if (key == "control_coarse") control_coarse = need_int(key, value);
  else if (key == "control_rounds") control_rounds = need_int(key, value);
  else if (key == "control_refine") control_refine = need_int(key, value);
  else if (key == "ref_dx") ref_dx = need_double(key, value);
  else if (key == "fp_mode") {
    if (value != "simpson" && value != "exact")
      throw std::invalid_argument("fp_mode must be simpson or exact");
    fp_mode = value;
  } else if (key == "out_dir") out_dir = value;
  else if (key == "cache_dir") cache_dir = value;
  else throw std::invalid_argument("unknown config key: " + key);
}

void StudyConfig::apply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void StudyConfig::apply_env() {
  for (const auto& [key, unused] : as_map()) {
    (void)unused;
    std::string env = "MFGLG_";
    for (char c : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(env.c_str())) apply(key, v);
  }
}

MFGSolution solve_row(const StudyConfig& cfg, double dx, MFGProblem* problem_out) {
  const int dim = cfg.test == "lq-2d" ? 2 : 1;
  const double sigma2 = 2.0 * cfg.sigma2_half;
  const UniformGrid grid = UniformGrid::from_dx(
      dim, {cfg.domain_lo, cfg.domain_lo}, {cfg.domain_hi, cfg.domain_hi}, dx);
  const int nsteps = steps_for(cfg.T, cfg.dt_c, cfg.dt_gamma, dx);
  const double dt = cfg.T / nsteps;

  if (cfg.test == "fp-only-ou") {
    FpProblem fp;
    fp.grid = &grid;
    fp.sigma = std::sqrt(sigma2);
    fp.dt = dt;
    fp.nsteps = nsteps;
    fp.bc = Boundary::Dirichlet;
    fp.mode = cfg.fp_mode == "exact" ? FpMode::ExactGalerkin : FpMode::Simpson;
    const OuTruth init = ou_at(0.0, cfg.mu0, cfg.v0_var, sigma2);
    const DriftFn b = [](double, const Point& x) { return Point{-x[0], 0.0}; };
    const auto m0_fn = [&init](const Point& x) { return init(x[0]); };
    DensityField f = fp.mode == FpMode::ExactGalerkin ? fp_solve_projected(fp, m0_fn, b)
                                                      : [&] {
                                                          std::vector<double> m0(grid.size());
                                                          for (std::int64_t i = 0; i < grid.size(); ++i)
                                                            m0[i] = init(grid.node(i)[0]);
                                                          return fp_solve(fp, m0, b);
                                                        }();
    MFGSolution sol;
    sol.m = std::move(f.m);
    sol.iterations = 1;
    sol.converged = true;
    sol.mass_drift = f.mass_drift;
    sol.l2_init = f.l2_init;
    sol.l2_max = f.l2_max;
    sol.guard_hits = f.guard_hits;
    if (problem_out) {
      problem_out->grid = grid;
      problem_out->dt = dt;
      problem_out->nsteps = nsteps;
      problem_out->T = cfg.T;
    }
    return sol;
  }

  MFGProblem p;
  p.grid = grid;
  p.sigma = std::sqrt(sigma2);
  p.T = cfg.T;
  p.dt = dt;
  p.nsteps = nsteps;
  p.tau = cfg.tau;
  p.max_outer = cfg.max_outer;
  p.damping = cfg.damping;
  p.controls.radius = auto_radius(cfg);
  p.controls.coarse = cfg.control_coarse;
  p.controls.rounds = cfg.control_rounds;
  p.controls.refine_points = cfg.control_refine;

  if (cfg.test == "lq-1d" || cfg.test == "lq-2d") {
    LqParams lp;
    lp.T = cfg.T;
    lp.sigma2 = sigma2;
    lp.dim = dim;
    lp.mu0 = {cfg.mu0, dim == 2 ? cfg.mu0 : 0.0};
    lp.V0 = cfg.v0_var;
    p.bc = Boundary::Dirichlet;
    p.coupling = Coupling::Kind::MeanQuadratic;
    p.m0 = [lp](const Point& x) { return lq_density(0.0, x, lp); };
    p.terminal = [lp](const Point& x) { return lq_value(lp.T, x, lp); };
    p.dirichlet_v = [lp, dt](int k, const Point& x) { return lq_value(k * dt, x, lp); };
  } else if (cfg.test == "local-1d") {
    p.bc = Boundary::Neumann;
    p.coupling = Coupling::Kind::LocalCongestion;
    p.m0 = [](const Point& x) { return bump_density(x[0]); };
    p.m0_formula = [](const Point& x) { return bump_density(x[0]); };
    p.terminal = [](const Point&) { return 0.0; };
  } else {
    throw std::invalid_argument("unknown test id: " + cfg.test);
  }

  if (problem_out) *problem_out = p;
  return mfg_solve(p);
}

namespace {

struct Reference {
  UniformGrid grid{1, {0.0, 0.0}, {1.0, 0.0}, {5, 1}};
  std::vector<double> m_T, v_0, dxv_0;
  double mass_drift = -1.0;
};

std::map<std::string, std::string> reference_key(const StudyConfig& cfg) {
  auto m = cfg.as_map();
  // only what determines the reference solve participates in the key
  m.erase("dx_list");
  m.erase("out_dir");
  m.erase("cache_dir");
  m.erase("control_r");
  m["control_radius_resolved"] = format_double(auto_radius(cfg));
  return m;
}

Reference compute_reference(const StudyConfig& cfg) {
  MFGProblem prob;
  MFGSolution sol = solve_row(cfg, cfg.ref_dx, &prob);
  Reference ref;
  ref.grid = prob.grid;
  ref.m_T = std::move(sol.m.back());
  ref.v_0 = std::move(sol.v0);
  ref.dxv_0 = std::move(sol.grad_v0[0]);
  ref.mass_drift = sol.mass_drift;
  return ref;
}

Reference load_or_compute_reference(const StudyConfig& cfg) {
  const std::uint64_t h = config_hash(reference_key(cfg));
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  const fs::path dir = cfg.cache_dir.empty() ? fs::path(cfg.out_dir) / "cache"

                                             : fs::path(cfg.cache_dir);
  const fs::path file = dir / (std::string("reference-") + hex + ".dat");
  const UniformGrid rg = UniformGrid::from_dx(
      1, {cfg.domain_lo, 0.0}, {cfg.domain_hi, 0.0}, cfg.ref_dx);
  if (fs::exists(file)) {
    std::ifstream in(file);
    std::string header;
    std::getline(in, header);
    std::int64_t n = 0;
    std::string drift_text;
    in >> n >> drift_text;
    if (n == rg.size()) {
      Reference ref;
      ref.grid = rg;
      if (const auto d = parse_double(drift_text)) ref.mass_drift = *d;
      ref.m_T.resize(n);
      ref.v_0.resize(n);
      ref.dxv_0.resize(n);
      bool ok = true;
      for (std::int64_t i = 0; i < n && ok; ++i) {
        std::string a, b, c;
        if (!(in >> a >> b >> c)) { ok = false; break; }
        const auto va = parse_double(a), vb = parse_double(b), vc = parse_double(c);
        if (!va || !vb || !vc) { ok = false; break; }
        ref.m_T[i] = *va;
        ref.v_0[i] = *vb;
        ref.dxv_0[i] = *vc;
      }
      if (ok) return ref;
    }
  }
  Reference ref = compute_reference(cfg);
  fs::create_directories(dir);
  std::ofstream out(file);
  out << "# cached reference solution " << hex << "\n"
      << ref.grid.size() << " " << format_double(ref.mass_drift) << "\n";
  for (std::int64_t i = 0; i < ref.grid.size(); ++i)
    out << format_double(ref.m_T[i]) << " " << format_double(ref.v_0[i]) << " "
        << format_double(ref.dxv_0[i]) << "\n";
  return ref;
}

} // namespace

ConvergenceReport run_study(const StudyConfig& cfg) {
  ConvergenceReport report;
  report.test = cfg.test;
  const int dim = cfg.test == "lq-2d" ? 2 : 1;
  if (cfg.test == "fp-only-ou") report.field_names = {"m"};
  else if (cfg.test == "lq-1d") report.field_names = {"m", "v"};
  else if (cfg.test == "lq-2d") report.field_names = {"m", "v", "dx1v", "dx2v"};
  else report.field_names = {"m", "v", "dxv"};

  Reference ref;
  if (cfg.test == "local-1d") {
    ref = load_or_compute_reference(cfg);
    report.reference_mass_drift = ref.mass_drift;
  }

  LqParams lp;
  lp.T = cfg.T;
  lp.sigma2 = 2.0 * cfg.sigma2_half;
  lp.dim = dim;
  lp.mu0 = {cfg.mu0, dim == 2 ? cfg.mu0 : 0.0};
  lp.V0 = cfg.v0_var;

  for (std::size_t row = 0; row < cfg.dx_list.size(); ++row) {
    const double dx = cfg.dx_list[row];
    RunMetrics rm;
    rm.dx = dx;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      MFGProblem prob;
      MFGSolution sol = solve_row(cfg, dx, &prob);
      rm.dt = prob.dt;
      rm.iterations = sol.iterations;
      rm.converged = sol.converged;
      rm.positivity = positivity_error(sol.m);
      rm.mass_drift = sol.mass_drift;
      rm.l2_init = sol.l2_init;
      rm.l2_max = sol.l2_max;
      rm.max_abs_alpha = sol.max_abs_alpha;
      const UniformGrid& g = prob.grid;

      std::vector<double> truth_m(g.size()), truth_v, truth_g0, truth_g1;
      if (cfg.test == "fp-only-ou") {
        const OuTruth tr = ou_at(cfg.T, cfg.mu0, cfg.v0_var, 2.0 * cfg.sigma2_half);
        for (std::int64_t i = 0; i < g.size(); ++i) truth_m[i] = tr(g.node(i)[0]);
      } else if (cfg.test == "local-1d") {
        truth_v.resize(g.size());
        truth_g0.resize(g.size());
        for (std::int64_t i = 0; i < g.size(); ++i) {
          const Point x = g.node(i);
          truth_m[i] = interpolate(ref.grid, ref.m_T, x, Extension::Reflect);
          truth_v[i] = interpolate(ref.grid, ref.v_0, x, Extension::Reflect);
          truth_g0[i] = interpolate(ref.grid, ref.dxv_0, x, Extension::Reflect);
        }
      } else {
        truth_v.resize(g.size());
        truth_g0.resize(g.size());
        if (dim == 2) truth_g1.resize(g.size());
        for (std::int64_t i = 0; i < g.size(); ++i) {
          const Point x = g.node(i);
          truth_m[i] = lq_density(cfg.T, x, lp);
          truth_v[i] = lq_value(0.0, x, lp);
          const Point gr = lq_gradient(0.0, x, lp);
          truth_g0[i] = gr[0];
          if (dim == 2) truth_g1[i] = gr[1];
        }
      }

      rm.fields["m"] = error_metrics(sol.m.back(), truth_m, g);
      if (cfg.test != "fp-only-ou") rm.fields["v"] = error_metrics(sol.v0, truth_v, g);
      if (cfg.test == "local-1d")
        rm.fields["dxv"] = error_metrics(sol.grad_v0[0], truth_g0, g);
      if (cfg.test == "lq-2d") {
        rm.fields["dx1v"] = error_metrics(sol.grad_v0[0], truth_g0, g);
        rm.fields["dx2v"] = error_metrics(sol.grad_v0[1], truth_g1, g);
      }

      if (row + 1 == cfg.dx_list.size()) {
        PlotData& pd = report.finest;
        for (std::int64_t i = 0; i < g.size(); ++i) pd.x.push_back(g.node(i));
        pd.m_T = sol.m.back();
        pd.m_exact_T = truth_m;
        if (cfg.test == "fp-only-ou") {
          pd.v_0.assign(g.size(), 0.0);
          pd.v_exact_0.assign(g.size(), 0.0);
        } else {
          pd.v_0 = sol.v0;
          pd.v_exact_0 = truth_v;
        }
      }
    } catch (const std::exception& ex) {
      rm.failed = true;
      rm.failure = ex.what();
    }
    rm.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back(std::move(rm));
  }
  return report;
}

void emit_report(const ConvergenceReport& report, const StudyConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  for (const auto& field : report.field_names) {
    std::ofstream csv(dir / ("errors_" + field + ".csv"));
    csv << "dx,dt,e_inf,e_2,p_inf,p_2,positivity_error,iterations,wall_time_s\n";
    const RunMetrics* prev = nullptr;
    for (const auto& row : report.rows) {
      if (row.failed) { prev = nullptr; continue; }
      const auto it = row.fields.find(field);
      if (it == row.fields.end()) continue;
      std::string p_inf, p_2;
      if (prev) {
        const auto& pe = prev->fields.at(field);
        p_inf = format_double(convergence_rate(pe.e_inf, it->second.e_inf, prev->dx, row.dx));
        p_2 = format_double(convergence_rate(pe.e_2, it->second.e_2, prev->dx, row.dx));
      }
      csv << format_double(row.dx) << "," << format_double(row.dt) << ","
          << format_double(it->second.e_inf) << "," << format_double(it->second.e_2) << ","
          << p_inf << "," << p_2 << "," << format_double(row.positivity) << ","
          << row.iterations << "," << format_double(row.wall_s) << "\n";
      prev = &row;
    }
  }

  if (!report.finest.x.empty()) {
    std::ofstream plot(dir / "plot_finest.dat");
    const bool two_d = report.test == "lq-2d";
    plot << (two_d ? "# x0 x1 m_T m_exact_T v_0 v_exact_0\n"
                   : "# x m_T m_exact_T v_0 v_exact_0\n");
    const auto& pd = report.finest;
    for (std::size_t i = 0; i < pd.x.size(); ++i) {
      plot << format_double(pd.x[i][0]);
      if (two_d) plot << " " << format_double(pd.x[i][1]);
      plot << " " << format_double(pd.m_T[i]) << " " << format_double(pd.m_exact_T[i]) << " "
           << format_double(pd.v_0[i]) << " " << format_double(pd.v_exact_0[i]) << "\n";
    }
  }

  std::ofstream manifest(dir / "run_manifest.txt");
  for (const auto& [k, v] : cfg.as_map()) manifest << k << "=" << v << "\n";
  manifest << "control_radius_resolved=" << format_double(auto_radius(cfg)) << "\n";
  if (report.reference_mass_drift >= 0.0)
    manifest << "reference_mass_drift=" << format_double(report.reference_mass_drift) << "\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    manifest << "row" << i << "_status="
             << (row.failed ? "failed: " + row.failure
                            : (row.converged ? "converged" : "max-iterations"))
             << "\n";
    if (!row.failed) {
      manifest << "row" << i << "_mass_drift=" << format_double(row.mass_drift) << "\n";
      manifest << "row" << i << "_l2_init=" << format_double(row.l2_init) << "\n";
      manifest << "row" << i << "_l2_max=" << format_double(row.l2_max) << "\n";
      manifest << "row" << i << "_max_abs_control=" << format_double(row.max_abs_alpha) << "\n";
    }
  }
}

} // namespace mfglg
