#include "mfglg/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfglg/metrics.hpp"

namespace mfglg {

DriftFn drift_from_gradients(const UniformGrid& g,
                             const std::vector<std::vector<double>>* gx,
                             const std::vector<std::vector<double>>* gy,
                             double dt, Extension ext) {
  const double lo0 = g.lo(0), hi0 = g.hi(0);
  const double lo1 = g.dim() == 2 ? g.lo(1) : 0.0, hi1 = g.dim() == 2 ? g.hi(1) : 0.0;
  const UniformGrid* grid = &g;
  return [grid, gx, gy, dt, ext, lo0, hi0, lo1, hi1](double t, const Point& x) -> Point {
    const auto k = static_cast<std::size_t>(std::llround(t / dt));
    const Point xc{std::clamp(x[0], lo0, hi0),
                   gy ? std::clamp(x[1], lo1, hi1) : 0.0};
    Point b{-interpolate(*grid, (*gx)[k], xc, ext), 0.0};
    if (gy) b[1] = -interpolate(*grid, (*gy)[k], xc, ext);
    return b;
  };
}

MFGSolution mfg_solve(const MFGProblem& p) {
  const UniformGrid& g = p.grid;
  const int dim = g.dim();
  const std::int64_t n = g.size();
  const int ns = p.nsteps;

  MFGSolution sol;
  std::vector<double> m0(n);
  for (std::int64_t i = 0; i < n; ++i) m0[i] = p.m0(g.node(i));

  FpProblem fp;
  fp.grid = &g;
  fp.sigma = p.sigma;
  fp.dt = p.dt;
  fp.nsteps = ns;
  fp.bc = p.bc;
  fp.mode = FpMode::Simpson;

  const DriftFn zero_drift = [](double, const Point&) { return Point{0.0, 0.0}; };
  DensityField field = fp_solve(fp, m0, zero_drift);

  const auto sw = g.simpson();
  std::vector<Point> nodes(n);
  for (std::int64_t i = 0; i < n; ++i) nodes[i] = g.node(i);

  const Extension ext = p.bc == Boundary::Neumann ? Extension::Reflect : Extension::ClampStencil;

  std::vector<std::vector<double>> gx(ns + 1), gy;
  if (dim == 2) gy.assign(ns + 1, {});

  HjbProblem hjb;
  hjb.grid = &g;
  hjb.sigma = p.sigma;
  hjb.dt = p.dt;
  hjb.nsteps = ns;
  hjb.terminal = p.terminal;
  hjb.bc.kind = p.bc;
  hjb.bc.value = p.dirichlet_v;
  hjb.controls = p.controls;

  for (int it = 1; it <= p.max_outer; ++it) {
    sol.iterations = it;
    // cost functional built from the current density iterate
    Coupling cpl;
    cpl.dim = dim;
    cpl.kind = p.coupling;
    if (p.coupling == Coupling::Kind::MeanQuadratic) {
      cpl.means.assign(ns + 1, Point{0.0, 0.0});
      for (int k = 0; k <= ns; ++k) {
        double m0x = 0.0, m0y = 0.0;
        const auto& mk = field.m[k];
        for (std::int64_t i = 0; i < n; ++i) {
          const double wmi = sw[i] * mk[i];
          m0x += wmi * nodes[i][0];
          m0y += wmi * nodes[i][1];
        }
        cpl.means[k] = {m0x, m0y};
      }
    } else if (p.coupling == Coupling::Kind::LocalCongestion) {
      cpl.grid = &g;
      cpl.density = &field.m;
      cpl.m0 = p.m0_formula;
    }
    hjb.coupling = cpl;

    std::vector<double> v0;
    const auto sink = [&](int k, const std::vector<double>& vk) {
      gx[k] = numerical_gradient(vk, g, 0, p.bc);
      if (dim == 2) gy[k] = numerical_gradient(vk, g, 1, p.bc);
      if (k == 0) v0 = vk;
    };
    const HjbResult hr = hjb_solve(hjb, sink);
    sol.max_abs_alpha = std::max(sol.max_abs_alpha, hr.max_abs_alpha);
    sol.v0 = std::move(v0);

    const DriftFn b = drift_from_gradients(g, &gx, dim == 2 ? &gy : nullptr, p.dt, ext);
    DensityField next = fp_solve(fp, m0, b);

    double inc = 0.0;
    for (int k = 0; k <= ns; ++k) {
      double s = 0.0;
      const auto& a = next.m[k];
      const auto& o = field.m[k];
      for (std::int64_t i = 0; i < n; ++i) s += sw[i] * std::abs(a[i] - o[i]);
      inc = std::max(inc, s);
    }
    sol.increments.push_back(inc);

    if (p.damping == 1.0) {
      field = std::move(next);
    } else {
      for (int k = 0; k <= ns; ++k)
        for (std::int64_t i = 0; i < n; ++i)
          field.m[k][i] += p.damping * (next.m[k][i] - field.m[k][i]);
      field.mass_drift = next.mass_drift;
      field.l2_init = next.l2_init;
      field.l2_max = next.l2_max;
      field.guard_hits = next.guard_hits;
    }

    if (inc < p.tau) {
      sol.converged = true;
      break;
    }
  }

  sol.grad_v0.push_back(gx[0]);
  if (dim == 2) sol.grad_v0.push_back(gy[0]);
  sol.mass_drift = field.mass_drift;
  sol.l2_init = field.l2_init;
  sol.l2_max = field.l2_max;
  sol.guard_hits = field.guard_hits;
  sol.m = std::move(field.m);
  return sol;
}

} // namespace mfglg
