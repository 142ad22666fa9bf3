#include "mfglg/fp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfglg/metrics.hpp"

namespace mfglg {

namespace {

// 6-point Gauss-Legendre rule on [-1, 1], used for the exact-mode integrals
constexpr double kGx6[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                            0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr double kGw6[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                            0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
constexpr double kGx4[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                            0.8611363115940526};
constexpr double kGw4[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                            0.3478548451374538};

// column threshold under which truncated deposits fall back to the nearest
// retained node instead of being renormalized (keeps mass exact without
// amplifying a nearly-vanished stencil)
constexpr double kRenormGuard = 0.25;

inline int clamp_int(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// deposit weights of one foot coordinate along one axis
struct DepositAxis {
  int idx[4];
  double w[4];
  int n_in = 0; // count of retained entries
};

inline DepositAxis deposit_axis(double y, double lo, double dx, int n, Boundary bc) {
  const double u = (y - lo) / dx;
  const int j0 = static_cast<int>(std::floor(u)) - 1;
  const auto lw = lagrange_weights(u - j0);
  DepositAxis d;
  for (int r = 0; r < 4; ++r) {
    int j = j0 + r;
    if (bc == Boundary::Neumann) {
      j = reflect_index(j, n);
    } else if (j < 0 || j >= n) {
      j = -1;
    }
    d.idx[r] = j;
    d.w[r] = lw[r];
    if (j >= 0) ++d.n_in;
  }
  return d;
}

} // namespace

void TransportMatrix::apply_add(const std::vector<double>& x, double scale,
                                std::vector<double>& y) const {
  for (std::int64_t j = 0; j < n; ++j) {
    const double mj = scale * x[j];
    if (mj == 0.0) continue;
    const std::size_t base = static_cast<std::size_t>(j) * width;
    for (int r = 0; r < width; ++r) {
      const std::int32_t i = idx[base + r];
      if (i >= 0) y[i] += w[base + r] * mj;
    }
  }
}

std::vector<double> TransportMatrix::column_sums() const {
  std::vector<double> s(n, 0.0);
  for (std::int64_t j = 0; j < n; ++j) {
    const std::size_t base = static_cast<std::size_t>(j) * width;
    double acc = 0.0;
    for (int r = 0; r < width; ++r)
      if (idx[base + r] >= 0) acc += w[base + r];
    s[j] = acc;
  }
  return s;
}

void BandedSPD::cholesky() {
  for (int j = 0; j < n; ++j) {
    double d = at(0, j);
    for (int k = std::max(0, j - bw); k < j; ++k) {
      const double l = at(j - k, k);
      d -= l * l;
    }
    if (d <= 0.0) throw std::runtime_error("banded cholesky: matrix not positive definite");
    d = std::sqrt(d);
    at(0, j) = d;
    for (int i = j + 1; i <= std::min(n - 1, j + bw); ++i) {
      double s = at(i - j, j);
      for (int k = std::max(0, i - bw); k < j; ++k)
        s -= at(i - k, k) * at(j - k, k);
      at(i - j, j) = s / d;
    }
  }
}

void BandedSPD::solve(std::vector<double>& rhs) const {
  // L y = rhs
  for (int i = 0; i < n; ++i) {
    double s = rhs[i];
    for (int k = std::max(0, i - bw); k < i; ++k) s -= at(i - k, k) * rhs[k];
    rhs[i] = s / at(0, i);
  }
  // L^T x = y
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int k = i + 1; k <= std::min(n - 1, i + bw); ++k) s -= at(k - i, i) * rhs[k];
    rhs[i] = s / at(0, i);
  }
}

BandedSPD mass_matrix_bands(const UniformGrid& g, int gauss_points) {
  if (g.dim() != 1)
    throw std::invalid_argument("exact mass matrix is implemented for one dimension");
  if (gauss_points != 4 && gauss_points != 6)
    throw std::invalid_argument("mass matrix quadrature: 4 or 6 points per cell");
  const int n = g.nodes(0);
  const double dx = g.dx(), lo = g.lo(0);
  BandedSPD A;
  A.n = n;
  A.bw = 3;
  A.band.assign(4 * static_cast<std::size_t>(n), 0.0);
  const double* gx = gauss_points == 4 ? kGx4 : kGx6;
  const double* gw = gauss_points == 4 ? kGw4 : kGw6;
  // integrate over the full supports, two cells of margin beyond each end
  for (int c = -2; c <= n; ++c) {
    const double xa = lo + c * dx;
    for (int q = 0; q < gauss_points; ++q) {
      const double x = xa + 0.5 * dx * (1.0 + gx[q]);
      const double wq = 0.5 * dx * gw[q];
      const double u = (x - lo) / dx;
      const int j0 = static_cast<int>(std::floor(u)) - 1;
      const auto lw = lagrange_weights(u - j0);
      for (int r = 0; r < 4; ++r) {
        const int i = j0 + r;
        if (i < 0 || i >= n) continue;
        for (int s = r; s < 4; ++s) {
          const int j = j0 + s;
          if (j < 0 || j >= n) continue;
          A.at(j - i, i) += wq * lw[r] * lw[s];
        }
      }
    }
  }
  return A;
}

MassMatrix assemble_mass_matrix(const UniformGrid& g, FpMode mode, int gauss_points) {
  MassMatrix m;
  m.mode = mode;
  if (mode == FpMode::Simpson) {
    m.lumped = 2.0 * g.dx() / 3.0;
    if (g.dim() == 2) m.lumped *= m.lumped;
    return m;
  }
  m.exact = mass_matrix_bands(g, gauss_points);
  m.exact.cholesky();
  return m;
}

std::vector<TransportMatrix> assemble_transport(const UniformGrid& g, const DriftFn& b,
                                                double t, double dt, double sigma,
                                                const StochasticStencil& s, Boundary bc) {
  const int dim = g.dim();
  const int width = dim == 1 ? 4 : 16;
  const double sq = std::sqrt(dt) * sigma;
  std::vector<TransportMatrix> out(s.points.size());
  for (std::size_t l = 0; l < s.points.size(); ++l) {
    TransportMatrix& tm = out[l];
    tm.n = g.size();
    tm.width = width;
    tm.idx.assign(static_cast<std::size_t>(tm.n) * width, -1);
    tm.w.assign(static_cast<std::size_t>(tm.n) * width, 0.0);
    const Point shift{sq * s.points[l][0], sq * s.points[l][1]};
    for (std::int64_t j = 0; j < tm.n; ++j) {
      const Point y = cn_step_impl(b, t, dt, g.node(j), shift, dim);
      const std::size_t base = static_cast<std::size_t>(j) * width;
      const DepositAxis dx0 = deposit_axis(y[0], g.lo(0), g.dx(), g.nodes(0), bc);
      if (dim == 1) {
        double cs = 0.0;
        for (int r = 0; r < 4; ++r)
          if (dx0.idx[r] >= 0) cs += dx0.w[r];
        if (cs <= kRenormGuard) {
          // nearly everything truncated: place the whole branch on the nearest node
          const double u = (y[0] - g.lo(0)) / g.dx();
          tm.idx[base] = clamp_int(static_cast<int>(std::lround(u)), 0, g.nodes(0) - 1);
          tm.w[base] = 1.0;
          continue;
        }
        int last = -1;
        double acc = 0.0;
        for (int r = 0; r < 4; ++r) {
          if (dx0.idx[r] < 0) continue;
          tm.idx[base + r] = dx0.idx[r];
          tm.w[base + r] = dx0.w[r] / cs;
          acc += tm.w[base + r];
          last = r;
        }
        tm.w[base + last] += 1.0 - acc; // column sums to one up to final rounding
      } else {
        const DepositAxis dx1 = deposit_axis(y[1], g.lo(1), g.dx(), g.nodes(1), bc);
        double cs = 0.0;
        for (int q = 0; q < 4; ++q)
          for (int r = 0; r < 4; ++r)
            if (dx0.idx[r] >= 0 && dx1.idx[q] >= 0) cs += dx0.w[r] * dx1.w[q];
        if (cs <= kRenormGuard) {
          const double u0 = (y[0] - g.lo(0)) / g.dx();
          const double u1 = (y[1] - g.lo(1)) / g.dx();
          const int i0 = clamp_int(static_cast<int>(std::lround(u0)), 0, g.nodes(0) - 1);
          const int i1 = clamp_int(static_cast<int>(std::lround(u1)), 0, g.nodes(1) - 1);
          tm.idx[base] = static_cast<std::int32_t>(g.index(i0, i1));
          tm.w[base] = 1.0;
          continue;
        }
        int last = -1;
        double acc = 0.0;
        for (int q = 0; q < 4; ++q) {
          for (int r = 0; r < 4; ++r) {
            const int slot = 4 * q + r;
            if (dx0.idx[r] < 0 || dx1.idx[q] < 0) continue;
            tm.idx[base + slot] = static_cast<std::int32_t>(g.index(dx0.idx[r], dx1.idx[q]));
            tm.w[base + slot] = dx0.w[r] * dx1.w[q] / cs;
            acc += tm.w[base + slot];
            last = slot;
          }
        }
        tm.w[base + last] += 1.0 - acc;
      }
    }
    // fold duplicate targets produced by reflection so columns stay clean
    if (bc == Boundary::Neumann) {
      for (std::int64_t j = 0; j < tm.n; ++j) {
        const std::size_t base = static_cast<std::size_t>(j) * width;
        for (int r = 0; r < width; ++r)
          for (int q = r + 1; q < width; ++q)
            if (tm.idx[base + r] >= 0 && tm.idx[base + q] == tm.idx[base + r]) {
              tm.w[base + r] += tm.w[base + q];
              tm.idx[base + q] = -1;
              tm.w[base + q] = 0.0;
            }
      }
    }
  }
  return out;
}

std::vector<double> fp_step(const std::vector<double>& m,
                            const std::vector<TransportMatrix>& transports,
                            const StochasticStencil& s) {
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t l = 0; l < transports.size(); ++l)
    transports[l].apply_add(m, s.weights[l], out);
  return out;
}

namespace {

// fused assembly + deposit for one step of the nodal scheme (no matrix kept)
template <class Drift>
void simpson_step(const UniformGrid& g, const Drift& b, double t, double dt, double sigma,
                  const StochasticStencil& st, Boundary bc, const std::vector<double>& m,
                  std::vector<double>& out, std::int64_t& guard_hits) {
  const int dim = g.dim();
  const double sq = std::sqrt(dt) * sigma;
  std::fill(out.begin(), out.end(), 0.0);
  const std::int64_t n = g.size();
  for (std::size_t l = 0; l < st.points.size(); ++l) {
    const double wl = st.weights[l];
    const Point shift{sq * st.points[l][0], sq * st.points[l][1]};
    for (std::int64_t j = 0; j < n; ++j) {
      const double mj = m[j];
      if (mj == 0.0) continue;
      const Point y = cn_step_impl(b, t, dt, g.node(j), shift, dim);
      const double amount = wl * mj;
      const DepositAxis d0 = deposit_axis(y[0], g.lo(0), g.dx(), g.nodes(0), bc);
      if (dim == 1) {
        if (d0.n_in == 4) {
          for (int r = 0; r < 4; ++r) out[d0.idx[r]] += d0.w[r] * amount;
        } else {
          double cs = 0.0;
          for (int r = 0; r < 4; ++r)
            if (d0.idx[r] >= 0) cs += d0.w[r];
          if (cs <= kRenormGuard) {
            ++guard_hits;
            const double u = (y[0] - g.lo(0)) / g.dx();
            out[clamp_int(static_cast<int>(std::lround(u)), 0, g.nodes(0) - 1)] += amount;
          } else {
            for (int r = 0; r < 4; ++r)
              if (d0.idx[r] >= 0) out[d0.idx[r]] += d0.w[r] / cs * amount;
          }
        }
      } else {
        const DepositAxis d1 = deposit_axis(y[1], g.lo(1), g.dx(), g.nodes(1), bc);
        const int nx = g.nodes(0);
        if (d0.n_in == 4 && d1.n_in == 4) {
          for (int q = 0; q < 4; ++q) {
            const double wq = d1.w[q] * amount;
            const std::int64_t row = static_cast<std::int64_t>(d1.idx[q]) * nx;
            for (int r = 0; r < 4; ++r) out[row + d0.idx[r]] += d0.w[r] * wq;
          }
        } else {
          double cs = 0.0;
          for (int q = 0; q < 4; ++q)
            for (int r = 0; r < 4; ++r)
              if (d0.idx[r] >= 0 && d1.idx[q] >= 0) cs += d0.w[r] * d1.w[q];
          if (cs <= kRenormGuard) {
            ++guard_hits;
            const double u0 = (y[0] - g.lo(0)) / g.dx();
            const double u1 = (y[1] - g.lo(1)) / g.dx();
            const int i0 = clamp_int(static_cast<int>(std::lround(u0)), 0, g.nodes(0) - 1);
            const int i1 = clamp_int(static_cast<int>(std::lround(u1)), 0, g.nodes(1) - 1);
            out[g.index(i0, i1)] += amount;
          } else {
            const double inv = amount / cs;
            for (int q = 0; q < 4; ++q) {
              if (d1.idx[q] < 0) continue;
              const std::int64_t row = static_cast<std::int64_t>(d1.idx[q]) * nx;
              const double wq = d1.w[q] * inv;
              for (int r = 0; r < 4; ++r)
                if (d0.idx[r] >= 0) out[row + d0.idx[r]] += d0.w[r] * wq;
            }
          }
        }
      }
    }
  }
}

// one exact-Galerkin step in one dimension: per-cell Gauss integration of the
// transported interpolant against every basis function, then a mass solve
void exact_step(const UniformGrid& g, const DriftFn& b, double t, double dt, double sigma,
                const StochasticStencil& st, const MassMatrix& A,
                const std::vector<double>& m, std::vector<double>& out) {
  const int n = g.nodes(0);
  const double dx = g.dx(), lo = g.lo(0);
  const double sq = std::sqrt(dt) * sigma;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t l = 0; l < st.points.size(); ++l) {
    const double wl = st.weights[l];
    const Point shift{sq * st.points[l][0], 0.0};
    for (int c = -2; c <= n; ++c) {
      const double xa = lo + c * dx;
      for (int q = 0; q < 6; ++q) {
        const double x = xa + 0.5 * dx * (1.0 + kGx6[q]);
        const double wq = 0.5 * dx * kGw6[q];
        // interpolant of the current coefficients, zero outside the range
        const double u = (x - lo) / dx;
        const int j0 = static_cast<int>(std::floor(u)) - 1;
        const auto lw = lagrange_weights(u - j0);
        double mval = 0.0;
        for (int r = 0; r < 4; ++r) {
          const int j = j0 + r;
          if (j >= 0 && j < n) mval += lw[r] * m[j];
        }
        if (mval == 0.0) continue;
        const Point y = cn_step_impl(b, t, dt, Point{x, 0.0}, shift, 1);
        const double uy = (y[0] - lo) / dx;
        const int k0 = static_cast<int>(std::floor(uy)) - 1;
        const auto wy = lagrange_weights(uy - k0);
        const double amount = wq * wl * mval;
        for (int r = 0; r < 4; ++r) {
          const int i = k0 + r;
          if (i >= 0 && i < n) out[i] += wy[r] * amount;
        }
      }
    }
  }
  A.exact.solve(out);
}

DensityField fp_run(const FpProblem& p, std::vector<double> m0, const DriftFn& b) {
  const UniformGrid& g = *p.grid;
  const auto st = build_stencil(g.dim());
  DensityField field;
  field.m.reserve(p.nsteps + 1);
  field.m.push_back(std::move(m0));
  MassMatrix A;
  if (p.mode == FpMode::ExactGalerkin) {
    if (g.dim() != 1)
      throw std::invalid_argument("exact transport mode is implemented for one dimension");
    A = assemble_mass_matrix(g, FpMode::ExactGalerkin, 4);
  }
  double sum0 = 0.0;
  for (double v : field.m[0]) sum0 += v;
  field.l2_init = l2_simpson(field.m[0], g);
  field.l2_max = field.l2_init;
  std::vector<double> next(g.size());
  for (int k = 0; k < p.nsteps; ++k) {
    const double t = k * p.dt;
    if (p.mode == FpMode::Simpson)
      simpson_step(g, b, t, p.dt, p.sigma, st, p.bc, field.m.back(), next, field.guard_hits);
    else
      exact_step(g, b, t, p.dt, p.sigma, st, A, field.m.back(), next);
    field.m.push_back(next);
    if (p.mode == FpMode::Simpson) {
      double s = 0.0;
      for (double v : next) s += v;
      field.mass_drift = std::max(field.mass_drift, std::abs(s - sum0) / std::abs(sum0));
    }
    field.l2_max = std::max(field.l2_max, l2_simpson(next, g));
  }
  return field;
}

} // namespace

DensityField fp_solve(const FpProblem& p, const std::vector<double>& m0_values,
                      const DriftFn& b) {
  return fp_run(p, m0_values, b);
}

DensityField fp_solve_projected(const FpProblem& p,
                                const std::function<double(const Point&)>& m0_formula,
                                const DriftFn& b) {
  const UniformGrid& g = *p.grid;
  std::vector<double> m0(g.size());
  if (p.mode == FpMode::Simpson) {
    for (std::int64_t i = 0; i < g.size(); ++i) m0[i] = m0_formula(g.node(i));
  } else {
    // L2 projection: solve A c = (integral of m0 against each basis function)
    if (g.dim() != 1)
      throw std::invalid_argument("exact transport mode is implemented for one dimension");
    const int n = g.nodes(0);
    const double dx = g.dx(), lo = g.lo(0);
    std::fill(m0.begin(), m0.end(), 0.0);
    for (int c = -2; c <= n; ++c) {
      const double xa = lo + c * dx;
      for (int q = 0; q < 6; ++q) {
        const double x = xa + 0.5 * dx * (1.0 + kGx6[q]);
        const double wq = 0.5 * dx * kGw6[q];
        const double f = m0_formula(Point{x, 0.0});
        if (f == 0.0) continue;
        const double u = (x - lo) / dx;
        const int j0 = static_cast<int>(std::floor(u)) - 1;
        const auto lw = lagrange_weights(u - j0);
        for (int r = 0; r < 4; ++r) {
          const int j = j0 + r;
          if (j >= 0 && j < n) m0[j] += wq * f * lw[r];
        }
      }
    }
    auto A = assemble_mass_matrix(g, FpMode::ExactGalerkin, 4);
    A.exact.solve(m0);
  }
  return fp_run(p, std::move(m0), b);
}

} // namespace mfglg
