#include "mfglg/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mfglg {

ErrorPair error_metrics(const std::vector<double>& approx, const std::vector<double>& truth,
                        const UniformGrid& g) {
  const auto w = g.simpson();
  double max_diff = 0.0, max_truth = 0.0, num = 0.0, den = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const double d = approx[i] - truth[i];
    max_diff = std::max(max_diff, std::abs(d));
    max_truth = std::max(max_truth, std::abs(truth[i]));
    num += w[i] * d * d;
    den += w[i] * truth[i] * truth[i];
  }
  ErrorPair e;
  if (max_truth == 0.0 || den == 0.0) {
    e.absolute = true;
    e.e_inf = max_diff;
    e.e_2 = std::sqrt(num);
  } else {
    e.e_inf = max_diff / max_truth;
    e.e_2 = std::sqrt(num / den);
  }
  return e;
}

double positivity_error(const std::vector<std::vector<double>>& slices) {
  double worst = 0.0;
  for (const auto& s : slices)
    for (double v : s) worst = std::max(worst, -v);
  return std::max(worst, 0.0);
}

} // namespace mfglg
