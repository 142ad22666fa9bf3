#pragma once

#include <functional>
#include <vector>

#include "mfglg/fp.hpp"
#include "mfglg/hjb.hpp"
#include "mfglg/grid.hpp"

namespace mfglg {

struct MFGProblem {
  UniformGrid grid{1, {0.0, 0.0}, {1.0, 0.0}, {5, 1}};
  double sigma = 0.0;
  double T = 0.0;
  double dt = 0.0;
  int nsteps = 0;
  Boundary bc = Boundary::Dirichlet; // shared by both equations
  Coupling::Kind coupling = Coupling::Kind::MeanQuadratic;
  std::function<double(const Point&)> m0;          // initial density samples
  std::function<double(const Point&)> m0_formula;  // closed form used by the local cost
  std::function<double(int, const Point&)> dirichlet_v; // value data per slice (Dirichlet only)
  std::function<double(const Point&)> terminal;    // terminal cost at nodes
  ControlSet controls;
  double tau = 1e-9;
  int max_outer = 40;
  double damping = 1.0;
};

struct MFGSolution {
  std::vector<std::vector<double>> m;              // density slices
  std::vector<double> v0;                          // value at t = 0
  std::vector<std::vector<double>> grad_v0;        // per-axis gradient at t = 0
  int iterations = 0;
  bool converged = false;
  std::vector<double> increments;                  // per-iteration L1 increments
  double max_abs_alpha = 0.0;
  double mass_drift = 0.0;
  double l2_init = 0.0, l2_max = 0.0;
  std::int64_t guard_hits = 0;
};

MFGSolution mfg_solve(const MFGProblem& p);

// drift callable -I[grad v] built from per-axis gradient slices; spatial
// argument is clamped into the grid box before interpolation
DriftFn drift_from_gradients(const UniformGrid& g,
                             const std::vector<std::vector<double>>* gx,
                             const std::vector<std::vector<double>>* gy,
                             double dt, Extension ext);

} // namespace mfglg
