#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "mfglg/grid.hpp"

namespace mfglg {

// Cardinal function of cubic Lagrange interpolation on a unit-spaced lattice:
// even, supported on [-2,2], equal to delta_{0k} at the integers.
inline double reference_basis(double s) {
  s = std::abs(s);
  if (s >= 2.0) return 0.0;
  if (s <= 1.0) return (s + 1.0) * (1.0 - s) * (2.0 - s) * 0.5;
  return -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
}

// weights on four consecutive nodes j0..j0+3 for a query at local offset
// t = u - j0 (cubic Lagrange; t in [1,2] when the stencil is centered)
inline std::array<double, 4> lagrange_weights(double t) {
  const double t1 = t - 1.0, t2 = t - 2.0, t3 = t - 3.0;
  return {-t1 * t2 * t3 / 6.0, t * t2 * t3 * 0.5, -t * t1 * t3 * 0.5, t * t1 * t2 / 6.0};
}

// how interpolation stencils treat the region outside the node range
enum class Extension {
  ZeroPad,       // out-of-range nodes contribute nothing
  ClampStencil,  // shift to the nearest fully interior four-node stencil
  Reflect,       // even reflection of indices across the ends
};

struct AxisWindow {
  std::array<std::int32_t, 4> idx; // -1 marks a dropped node (ZeroPad only)
  std::array<double, 4> w;
};

inline int reflect_index(int i, int n) {
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i <= n - 1 ? i : period - i;
}

inline AxisWindow axis_window(double x, double lo, double dx, int n, Extension ext) {
  const double u = (x - lo) / dx;
  int j0 = static_cast<int>(std::floor(u)) - 1;
  if (ext == Extension::ClampStencil) {
    if (j0 < 0) j0 = 0;
    if (j0 > n - 4) j0 = n - 4;
  }
  AxisWindow win;
  win.w = lagrange_weights(u - j0);
  for (int r = 0; r < 4; ++r) {
    int j = j0 + r;
    if (ext == Extension::Reflect) {
      j = reflect_index(j, n);
    } else if (ext == Extension::ZeroPad && (j < 0 || j >= n)) {
      j = -1;
    }
    win.idx[r] = j;
  }
  return win;
}

// value of the nodal basis function centered at multi-index i, at point x
inline double basis_value(const UniformGrid& g, int i0, int i1, const Point& x) {
  double v = reference_basis((x[0] - g.lo(0)) / g.dx() - i0);
  if (g.dim() == 2) v *= reference_basis((x[1] - g.lo(1)) / g.dx() - i1);
  return v;
}

// cubic interpolation of nodal data at an arbitrary point
inline double interpolate(const UniformGrid& g, const std::vector<double>& f,
                          const Point& x, Extension ext) {
  const AxisWindow wx = axis_window(x[0], g.lo(0), g.dx(), g.nodes(0), ext);
  if (g.dim() == 1) {
    double s = 0.0;
    for (int r = 0; r < 4; ++r)
      if (wx.idx[r] >= 0) s += wx.w[r] * f[wx.idx[r]];
    return s;
  }
  const AxisWindow wy = axis_window(x[1], g.lo(1), g.dx(), g.nodes(1), ext);
  const int nx = g.nodes(0);
  double s = 0.0;
  for (int q = 0; q < 4; ++q) {
    if (wy.idx[q] < 0) continue;
    const std::int64_t row = static_cast<std::int64_t>(wy.idx[q]) * nx;
    double sr = 0.0;
    for (int r = 0; r < 4; ++r)
      if (wx.idx[r] >= 0) sr += wx.w[r] * f[row + wx.idx[r]];
    s += wy.w[q] * sr;
  }
  return s;
}

} // namespace mfglg
