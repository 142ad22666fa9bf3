#include "mfglg/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfglg {

namespace {

struct NodeBest {
  double value = 0.0;
  Point argmin{0.0, 0.0};
};

// objective at one control candidate: stencil average of interpolated value
// plus half-step running cost at the feet, plus the control penalty
inline double candidate_value_1d(const UniformGrid& g, const std::vector<double>& f,
                                 const Coupling& cpl, int k1, double x, double a, double dt,
                                 double sq, Extension ext) {
  constexpr double kE[3] = {-1.7320508075688772, 0.0, 1.7320508075688772};
  constexpr double kW[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
  double acc = 0.0;
  for (int l = 0; l < 3; ++l) {
    const Point y{x - dt * a + sq * kE[l], 0.0};
    acc += kW[l] * (interpolate(g, f, y, ext) + 0.5 * dt * cpl.F(k1, y));
  }
  return acc + 0.5 * dt * a * a;
}

inline double candidate_value_2d(const UniformGrid& g, const std::vector<double>& f,
                                 const Coupling& cpl, int k1, const Point& x, double a0,
                                 double a1, double dt, double sq, Extension ext) {
  constexpr double kE[3] = {-1.7320508075688772, 0.0, 1.7320508075688772};
  constexpr double kW[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
  const double bx = x[0] - dt * a0, by = x[1] - dt * a1;
  double acc = 0.0;
  for (int q = 0; q < 3; ++q)
    for (int r = 0; r < 3; ++r) {
      const Point y{bx + sq * kE[r], by + sq * kE[q]};
      acc += kW[r] * kW[q] * (interpolate(g, f, y, ext) + 0.5 * dt * cpl.F(k1, y));
    }
  return acc + 0.5 * dt * (a0 * a0 + a1 * a1);
}

NodeBest minimize_1d(const UniformGrid& g, const std::vector<double>& f, const Coupling& cpl,
                     int k1, double x, const ControlSet& cs, double dt, double sq,
                     Extension ext) {
  const double R = cs.radius;
  NodeBest best;
  bool have = false;
  // coarse pass over the whole admissible interval
  const int nc = cs.coarse;
  for (int i = 0; i < nc; ++i) {
    const double a = -R + 2.0 * R * i / (nc - 1);
    const double v = candidate_value_1d(g, f, cpl, k1, x, a, dt, sq, ext);
    if (!have || v < best.value) {
      best.value = v;
      best.argmin[0] = a;
      have = true;
    }
  }
  // shrinking local grids around the incumbent
  double w = 2.0 * R / (nc - 1);
  const int np = cs.refine_points;
  for (int round = 0; round < cs.rounds; ++round) {
    const double center = best.argmin[0];
    for (int i = 0; i < np; ++i) {
      double a = center - w + 2.0 * w * i / (np - 1);
      a = std::clamp(a, -R, R);
      const double v = candidate_value_1d(g, f, cpl, k1, x, a, dt, sq, ext);
      if (v < best.value) {
        best.value = v;
        best.argmin[0] = a;
      }
    }
    w = 2.0 * w / (np - 1);
  }
  return best;
}

NodeBest minimize_2d(const UniformGrid& g, const std::vector<double>& f, const Coupling& cpl,
                     int k1, const Point& x, const ControlSet& cs, double dt, double sq,
                     Extension ext) {
  const double R = cs.radius, R2 = R * R;
  NodeBest best;
  bool have = false;
  const int nc = cs.coarse;
  for (int j = 0; j < nc; ++j) {
    const double a1 = -R + 2.0 * R * j / (nc - 1);
    for (int i = 0; i < nc; ++i) {
      const double a0 = -R + 2.0 * R * i / (nc - 1);
      if (a0 * a0 + a1 * a1 > R2) continue;
      const double v = candidate_value_2d(g, f, cpl, k1, x, a0, a1, dt, sq, ext);
      if (!have || v < best.value) {
        best.value = v;
        best.argmin = {a0, a1};
        have = true;
      }
    }
  }
  double w = 2.0 * R / (nc - 1);
  const int np = cs.refine_points;
  for (int round = 0; round < cs.rounds; ++round) {
    const Point center = best.argmin;
    for (int j = 0; j < np; ++j) {
      double a1 = std::clamp(center[1] - w + 2.0 * w * j / (np - 1), -R, R);
      for (int i = 0; i < np; ++i) {
        double a0 = std::clamp(center[0] - w + 2.0 * w * i / (np - 1), -R, R);
        if (a0 * a0 + a1 * a1 > R2) continue;
        const double v = candidate_value_2d(g, f, cpl, k1, x, a0, a1, dt, sq, ext);
        if (v < best.value) {
          best.value = v;
          best.argmin = {a0, a1};
        }
      }
    }
    w = 2.0 * w / (np - 1);
  }
  return best;
}

} // namespace

double sl_operator(const UniformGrid& g, const std::vector<double>& f, int k, std::int64_t i,
                   const Coupling& coupling, const ControlSet& controls,
                   const StochasticStencil& s, double dt, double sigma, Extension ext,
                   Point* argmin) {
  (void)s; // the three-point-per-axis stencil is baked into the candidate evaluation
  const double sq = std::sqrt(dt) * sigma;
  const Point x = g.node(i);
  const NodeBest nb = g.dim() == 1
                          ? minimize_1d(g, f, coupling, k + 1, x[0], controls, dt, sq, ext)
                          : minimize_2d(g, f, coupling, k + 1, x, controls, dt, sq, ext);
  if (argmin) *argmin = nb.argmin;
  return nb.value + 0.5 * dt * coupling.F(k, x);
}

HjbResult hjb_solve(const HjbProblem& p,
                    const std::function<void(int, const std::vector<double>&)>& slice_sink) {
  const UniformGrid& g = *p.grid;
  const std::int64_t n = g.size();
  const Extension ext =
      p.bc.kind == Boundary::Neumann ? Extension::Reflect : Extension::ClampStencil;
  const double sq = std::sqrt(p.dt) * p.sigma;

  HjbResult res;
  std::vector<double> cur(n), next(n);
  for (std::int64_t i = 0; i < n; ++i) cur[i] = p.terminal(g.node(i));
  if (slice_sink)
    slice_sink(p.nsteps, cur);
  else
    res.v.assign(p.nsteps + 1, std::vector<double>());
  if (!slice_sink) res.v[p.nsteps] = cur;

  for (int k = p.nsteps - 1; k >= 0; --k) {
    double worst = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : worst)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
      const Point x = g.node(i);
      const NodeBest nb =
          g.dim() == 1 ? minimize_1d(g, cur, p.coupling, k + 1, x[0], p.controls, p.dt, sq, ext)
                       : minimize_2d(g, cur, p.coupling, k + 1, x, p.controls, p.dt, sq, ext);
      next[i] = nb.value + 0.5 * p.dt * p.coupling.F(k, x);
      const double an = std::sqrt(nb.argmin[0] * nb.argmin[0] + nb.argmin[1] * nb.argmin[1]);
      worst = std::max(worst, an);
    }
    res.max_abs_alpha = std::max(res.max_abs_alpha, worst);
    if (p.bc.kind == Boundary::Dirichlet) {
      const int nx = g.nodes(0);
      if (g.dim() == 1) {
        next[0] = p.bc.value(k, g.node(0));
        next[nx - 1] = p.bc.value(k, g.node(nx - 1));
      } else {
        const int ny = g.nodes(1);
        for (int i = 0; i < nx; ++i) {
          next[g.index(i, 0)] = p.bc.value(k, g.node(g.index(i, 0)));
          next[g.index(i, ny - 1)] = p.bc.value(k, g.node(g.index(i, ny - 1)));
        }
        for (int j = 1; j < ny - 1; ++j) {
          next[g.index(0, j)] = p.bc.value(k, g.node(g.index(0, j)));
          next[g.index(nx - 1, j)] = p.bc.value(k, g.node(g.index(nx - 1, j)));
        }
      }
    }
    cur.swap(next);
    if (slice_sink) slice_sink(k, cur);
    else res.v[k] = cur;
  }
  if (slice_sink) res.v.assign(1, cur);
  return res;
}

namespace {

// fourth-order first derivative of one line of data
void grad_line(const double* f, std::int64_t stride, int n, double dx, Boundary bc, double* out,
               std::int64_t out_stride) {
  const double inv = 1.0 / (12.0 * dx);
  auto F = [&](int i) { return f[stride * i]; };
  for (int i = 2; i < n - 2; ++i)
    out[out_stride * i] = (F(i - 2) - 8.0 * F(i - 1) + 8.0 * F(i + 1) - F(i + 2)) * inv;
  if (bc == Boundary::Neumann) {
    // even extension across both ends
    out[0] = 0.0;
    out[out_stride] = (F(1) - 8.0 * F(0) + 8.0 * F(2) - F(3)) * inv;
    out[out_stride * (n - 2)] = (F(n - 4) - 8.0 * F(n - 3) + 8.0 * F(n - 1) - F(n - 2)) * inv;
    out[out_stride * (n - 1)] = 0.0;
  } else {
    out[0] = (-25.0 * F(0) + 48.0 * F(1) - 36.0 * F(2) + 16.0 * F(3) - 3.0 * F(4)) * inv;
    out[out_stride] = (-3.0 * F(0) - 10.0 * F(1) + 18.0 * F(2) - 6.0 * F(3) + F(4)) * inv;
    out[out_stride * (n - 2)] =
        (3.0 * F(n - 1) + 10.0 * F(n - 2) - 18.0 * F(n - 3) + 6.0 * F(n - 4) - F(n - 5)) * inv;
    out[out_stride * (n - 1)] =
        (25.0 * F(n - 1) - 48.0 * F(n - 2) + 36.0 * F(n - 3) - 16.0 * F(n - 4) + 3.0 * F(n - 5)) *
        inv;
  }
}

} // namespace

std::vector<double> numerical_gradient(const std::vector<double>& f, const UniformGrid& g,
                                       int axis, Boundary bc) {
  std::vector<double> out(f.size());
  const int nx = g.nodes(0);
  if (g.dim() == 1) {
    grad_line(f.data(), 1, nx, g.dx(), bc, out.data(), 1);
    return out;
  }
  const int ny = g.nodes(1);
  if (axis == 0) {
    for (int j = 0; j < ny; ++j)
      grad_line(f.data() + static_cast<std::int64_t>(j) * nx, 1, nx, g.dx(), bc,
                out.data() + static_cast<std::int64_t>(j) * nx, 1);
  } else {
    for (int i = 0; i < nx; ++i)
      grad_line(f.data() + i, nx, ny, g.dx(), bc, out.data() + i, nx);
  }
  return out;
}

} // namespace mfglg
