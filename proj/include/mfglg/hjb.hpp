#pragma once

#include <functional>
#include <vector>

#include "mfglg/basis.hpp"
#include "mfglg/fp.hpp"
#include "mfglg/grid.hpp"
#include "mfglg/stencil.hpp"

namespace mfglg {

// nested direct search over the control ball |a| <= radius
struct ControlSet {
  double radius = 1.0;
  int coarse = 15;       // coarse candidates per axis on [-radius, radius]
  int rounds = 6;        // shrinking refinement rounds around the incumbent
  int refine_points = 9; // candidates per axis per round
};

// running cost F(t_k, x) in its three flavours
struct Coupling {
  enum class Kind { Zero, MeanQuadratic, LocalCongestion };
  Kind kind = Kind::Zero;
  int dim = 1;
  // MeanQuadratic: 0.5 * |x - mean(t_k)|^2
  std::vector<Point> means;
  // LocalCongestion: 3*m0(x) - min(cap, I[m(t_k)](x)), reflecting interpolant
  const std::vector<std::vector<double>>* density = nullptr;
  const UniformGrid* grid = nullptr;
  double cap = 4.0;
  std::function<double(const Point&)> m0;

  double F(int k, const Point& x) const {
    switch (kind) {
      case Kind::Zero: return 0.0;
      case Kind::MeanQuadratic: {
        const double d0 = x[0] - means[k][0];
        double s = d0 * d0;
        if (dim == 2) {
          const double d1 = x[1] - means[k][1];
          s += d1 * d1;
        }
        return 0.5 * s;
      }
      case Kind::LocalCongestion: {
        const double mv = interpolate(*grid, (*density)[k], x, Extension::Reflect);
        return 3.0 * m0(x) - (mv < cap ? mv : cap);
      }
    }
    return 0.0;
  }
};

struct HjbBoundary {
  Boundary kind = Boundary::Dirichlet;
  std::function<double(int, const Point&)> value; // Dirichlet data per slice
};

struct HjbProblem {
  const UniformGrid* grid = nullptr;
  double sigma = 0.0;
  double dt = 0.0;
  int nsteps = 0;
  Coupling coupling;
  std::function<double(const Point&)> terminal;
  HjbBoundary bc;
  ControlSet controls;
};

struct HjbResult {
  std::vector<std::vector<double>> v; // all slices (empty except v[0] when a sink is used)
  double max_abs_alpha = 0.0;         // largest optimizer argmin norm seen
};

// one application of the dynamic-programming operator at node i using the
// slice f at t_{k+1}; optionally reports the minimizing control
double sl_operator(const UniformGrid& g, const std::vector<double>& f, int k,
                   std::int64_t i, const Coupling& coupling, const ControlSet& controls,
                   const StochasticStencil& s, double dt, double sigma, Extension ext,
                   Point* argmin = nullptr);

// backward sweep; if slice_sink is set it is called once per finished slice
// (k from nsteps down to 0) and only slice 0 is retained in the result
HjbResult hjb_solve(const HjbProblem& p,
                    const std::function<void(int, const std::vector<double>&)>& slice_sink = {});

// fourth-order finite-difference gradient along one axis; Neumann folds the
// stencil across the ends (even extension), otherwise one-sided closures
std::vector<double> numerical_gradient(const std::vector<double>& f, const UniformGrid& g,
                                       int axis, Boundary bc);

} // namespace mfglg
