#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mfglg/grid.hpp"

namespace mfglg {

// Discrete surrogate of a standard Gaussian increment: per axis the values
// {-sqrt(3), 0, sqrt(3)} with probabilities {1/6, 2/3, 1/6}, tensorized over
// axes. Matches Gaussian moments through order five exactly.
struct StochasticStencil {
  int dim = 1;
  std::vector<Point> points;
  std::vector<double> weights;
};

inline StochasticStencil build_stencil(int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("stencil: dim must be 1 or 2");
  const double r = std::sqrt(3.0);
  const double e1[3] = {-r, 0.0, r};
  const double w1[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
  StochasticStencil s;
  s.dim = dim;
  if (dim == 1) {
    for (int a = 0; a < 3; ++a) {
      s.points.push_back({e1[a], 0.0});
      s.weights.push_back(w1[a]);
    }
  } else {
    for (int b = 0; b < 3; ++b)
      for (int a = 0; a < 3; ++a) {
        s.points.push_back({e1[a], e1[b]});
        s.weights.push_back(w1[a] * w1[b]);
      }
  }
  return s;
}

} // namespace mfglg
