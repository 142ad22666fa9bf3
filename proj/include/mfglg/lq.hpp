#pragma once

#include <cmath>

#include "mfglg/grid.hpp"

namespace mfglg {

// Linear-quadratic test problem with quadratic Hamiltonian and a cost that
// penalizes distance to the population mean. Closed-form solution: the value
// function is a quadratic polynomial driven by a scalar Riccati factor and the
// density stays Gaussian with constant mean and a known variance profile.
struct LqParams {
  double T = 0.25;
  double sigma2 = 0.1; // diffusion coefficient squared
  int dim = 1;
  Point mu0{0.0, 0.0}; // initial mean
  double V0 = 0.1;     // initial per-axis variance (isotropic)
};

// scalar Riccati factor, zero at the horizon
inline double riccati_pi(double t, double T) {
  const double ea = std::exp(2.0 * T - t), eb = std::exp(t);
  return (ea - eb) / (ea + eb);
}

inline double lq_constant(double t, const LqParams& p) {
  double mu2 = p.mu0[0] * p.mu0[0];
  if (p.dim == 2) mu2 += p.mu0[1] * p.mu0[1];
  const double logterm =
      std::log(2.0 * std::exp(p.T) / (std::exp(2.0 * p.T - t) + std::exp(t)));
  return 0.5 * riccati_pi(t, p.T) * mu2 - 0.5 * p.sigma2 * p.dim * logterm;
}

inline double lq_value(double t, const Point& x, const LqParams& p) {
  const double pi = riccati_pi(t, p.T);
  double quad = x[0] * x[0], lin = p.mu0[0] * x[0];
  if (p.dim == 2) {
    quad += x[1] * x[1];
    lin += p.mu0[1] * x[1];
  }
  return 0.5 * pi * quad - pi * lin + lq_constant(t, p);
}

inline Point lq_gradient(double t, const Point& x, const LqParams& p) {
  const double pi = riccati_pi(t, p.T);
  return {pi * (x[0] - p.mu0[0]), p.dim == 2 ? pi * (x[1] - p.mu0[1]) : 0.0};
}

// per-axis variance of the exact density (isotropic initial covariance)
inline double lq_variance(double t, const LqParams& p) {
  const double e2T = std::exp(2.0 * p.T);
  const double a = std::exp(2.0 * p.T - t) + std::exp(t);
  const double first = (2.0 * p.V0 + p.sigma2 * (e2T + 1.0)) / (2.0 * (e2T + 1.0) * (e2T + 1.0));
  const double second = p.sigma2 / (2.0 * (e2T + std::exp(2.0 * t)));
  return a * a * (first - second);
}

inline double lq_density(double t, const Point& x, const LqParams& p) {
  const double var = lq_variance(t, p);
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * var);
  const double d0 = x[0] - p.mu0[0];
  double v = norm * std::exp(-d0 * d0 / (2.0 * var));
  if (p.dim == 2) {
    const double d1 = x[1] - p.mu0[1];
    v *= norm * std::exp(-d1 * d1 / (2.0 * var));
  }
  return v;
}

// independent check oracle: integrate the second-moment ODE
//   M' = -2 pi(t) M - 2 mu0 s(t) + sigma2,  s(t) = -pi(t) mu0
// with classical RK4 and return the resulting variance at time t.
double lq_variance_by_ode(double t, const LqParams& p, int steps = 200000);

} // namespace mfglg
