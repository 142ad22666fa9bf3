#pragma once

#include <cmath>
#include <vector>

#include "mfglg/grid.hpp"

namespace mfglg {

struct ErrorPair {
  double e_inf = 0.0;
  double e_2 = 0.0;
  bool absolute = false; // set when the truth vanishes and relative norms are undefined
};

// relative sup and Simpson-L2 distances between nodal fields
ErrorPair error_metrics(const std::vector<double>& approx,
                        const std::vector<double>& truth, const UniformGrid& g);

// largest negative excursion over all slices of a time-indexed field
double positivity_error(const std::vector<std::vector<double>>& slices);

// observed order between two refinement rows
inline double convergence_rate(double e_coarse, double e_fine, double dx_coarse, double dx_fine) {
  return std::log(e_coarse / e_fine) / std::log(dx_coarse / dx_fine);
}

inline double l2_simpson(const std::vector<double>& f, const UniformGrid& g) {
  const auto w = g.simpson();
  double s = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i) s += w[i] * f[i] * f[i];
  return std::sqrt(s);
}

} // namespace mfglg
