#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "mfglg/grid.hpp"
#include "mfglg/stencil.hpp"

namespace mfglg {

using DriftFn = std::function<Point(double, const Point&)>;

struct CnOptions {
  double tol = 1e-13;
  int max_iter = 60;
};

// One step of the trapezoidal (Crank-Nicolson) characteristic map with an
// additive noise shift: solves y = x + (dt/2)(b(t,x) + b(t+dt,y)) + shift by
// fixed-point iteration from the explicit Euler predictor. The drift callable
// is responsible for being well defined slightly outside the box (clamp).
template <class Drift>
inline Point cn_step_impl(const Drift& b, double t, double dt, const Point& x,
                          const Point& shift, int dim, const CnOptions& opt = {}) {
  const Point bx = b(t, x);
  Point base{x[0] + 0.5 * dt * bx[0] + shift[0], x[1] + 0.5 * dt * bx[1] + shift[1]};
  Point y{x[0] + dt * bx[0] + shift[0], x[1] + dt * bx[1] + shift[1]};
  for (int it = 0; it < opt.max_iter; ++it) {
    const Point by = b(t + dt, y);
    Point yn{base[0] + 0.5 * dt * by[0], base[1] + 0.5 * dt * by[1]};
    double d = std::abs(yn[0] - y[0]);
    if (dim == 2) d = std::max(d, std::abs(yn[1] - y[1]));
    y = yn;
    if (d <= opt.tol) return y;
  }
  throw std::runtime_error("cn_step: fixed point did not converge; reduce dt");
}

// convenience wrapper: noise shift assembled from sigma and a stencil point
inline Point cn_step(const DriftFn& b, double t, double dt, double sigma,
                     const Point& x, const Point& e, int dim, const CnOptions& opt = {}) {
  const double sq = std::sqrt(dt) * sigma;
  return cn_step_impl(b, t, dt, x, Point{sq * e[0], sq * e[1]}, dim, opt);
}

// weak one-step functional: stencil-weighted average of phi at the feet
inline double weak_expectation(const DriftFn& b, double t, double dt, double sigma,
                               const Point& x, const std::function<double(const Point&)>& phi,
                               const StochasticStencil& s, const CnOptions& opt = {}) {
  double acc = 0.0;
  for (std::size_t l = 0; l < s.points.size(); ++l)
    acc += s.weights[l] * phi(cn_step(b, t, dt, sigma, x, s.points[l], s.dim, opt));
  return acc;
}

} // namespace mfglg
