#include "mfglg/lq.hpp"

namespace mfglg {

double lq_variance_by_ode(double t, const LqParams& p, int steps) {
  // second moment M(t) of one axis: M' = -2 pi M - 2 mu0 s + sigma2, s = -pi mu0
  const double mu = p.mu0[0];
  const double h = t / steps;
  double M = p.V0 + mu * mu;
  auto rhs = [&](double tt, double MM) {
    const double pi = riccati_pi(tt, p.T);
    return -2.0 * pi * MM + 2.0 * mu * mu * pi + p.sigma2;
  };
  double tt = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = rhs(tt, M);
    const double k2 = rhs(tt + 0.5 * h, M + 0.5 * h * k1);
    const double k3 = rhs(tt + 0.5 * h, M + 0.5 * h * k2);
    const double k4 = rhs(tt + h, M + h * k3);
    M += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tt += h;
  }
  return M - mu * mu;
}

} // namespace mfglg
