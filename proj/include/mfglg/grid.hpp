#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mfglg {

// a spatial point; component 1 is ignored when dim == 1
using Point = std::array<double, 2>;

// Uniform tensor-product grid on a box, equal spacing on every axis.
// Node counts are odd so composite Simpson quadrature applies directly.
class UniformGrid {
public:
  UniformGrid(int dim, Point lo, Point hi, std::array<int, 2> nodes_per_axis)
      : dim_(dim), lo_(lo), hi_(hi), n_(nodes_per_axis) {
    if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
    if (dim_ == 1) { n_[1] = 1; lo_[1] = 0.0; hi_[1] = 0.0; }
    for (int a = 0; a < dim_; ++a) {
      if (n_[a] < 5) throw std::invalid_argument("grid: need at least 5 nodes per axis");
      if ((n_[a] - 1) % 2 != 0) throw std::invalid_argument("grid: node count per axis must be odd");
      if (!(hi_[a] > lo_[a])) throw std::invalid_argument("grid: empty box");
    }
    dx_ = (hi_[0] - lo_[0]) / (n_[0] - 1);
    if (dim_ == 2) {
      const double dx1 = (hi_[1] - lo_[1]) / (n_[1] - 1);
      if (std::abs(dx1 - dx_) > 1e-12 * dx_)
        throw std::invalid_argument("grid: spacing must match on both axes");
    }
    size_ = static_cast<std::int64_t>(n_[0]) * (dim_ == 2 ? n_[1] : 1);
  }

  // build from a target spacing; (hi-lo)/dx must be an even integer
  static UniformGrid from_dx(int dim, Point lo, Point hi, double dx) {
    std::array<int, 2> n{1, 1};
    for (int a = 0; a < dim; ++a) {
      const double cells = (hi[a] - lo[a]) / dx;
      const auto c = static_cast<std::int64_t>(std::llround(cells));
      if (std::abs(cells - static_cast<double>(c)) > 1e-9 * cells || c < 4 || c % 2 != 0)
        throw std::invalid_argument("grid: dx must split the box into an even cell count");
      n[a] = static_cast<int>(c) + 1;
    }
    return UniformGrid(dim, lo, hi, n);
  }

  int dim() const { return dim_; }
  double dx() const { return dx_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  int nodes(int axis) const { return n_[axis]; }
  std::int64_t size() const { return size_; }

  std::int64_t index(int i0, int i1 = 0) const {
    return static_cast<std::int64_t>(i1) * n_[0] + i0;
  }
  Point node(std::int64_t flat) const {
    const int i0 = static_cast<int>(flat % n_[0]);
    const int i1 = static_cast<int>(flat / n_[0]);
    return {lo_[0] + dx_ * i0, dim_ == 2 ? lo_[1] + dx_ * i1 : 0.0};
  }
  double coord(int axis, int i) const { return lo_[axis] + dx_ * i; }

  // composite Simpson weights along one axis
  std::vector<double> simpson_axis(int axis) const {
    std::vector<double> w(n_[axis], 2.0 * dx_ / 3.0);
    for (int i = 1; i < n_[axis]; i += 2) w[i] = 4.0 * dx_ / 3.0;
    w.front() = dx_ / 3.0;
    w.back() = dx_ / 3.0;
    return w;
  }
  // full tensor weight vector over all nodes
  std::vector<double> simpson() const {
    const auto w0 = simpson_axis(0);
    if (dim_ == 1) return w0;
    const auto w1 = simpson_axis(1);
    std::vector<double> w(size_);
    for (int j = 0; j < n_[1]; ++j)
      for (int i = 0; i < n_[0]; ++i) w[index(i, j)] = w0[i] * w1[j];
    return w;
  }

private:
  int dim_;
  Point lo_, hi_;
  std::array<int, 2> n_;
  double dx_ = 0.0;
  std::int64_t size_ = 0;
};

// composite Simpson integral of nodal data
inline double simpson_integrate(const std::vector<double>& f, const UniformGrid& g) {
  const auto w = g.simpson();
  double s = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i) s += w[i] * f[i];
  return s;
}

} // namespace mfglg
