#pragma once

#include <cstdint>
#include <vector>

#include "mfglg/basis.hpp"
#include "mfglg/characteristics.hpp"
#include "mfglg/grid.hpp"
#include "mfglg/stencil.hpp"

namespace mfglg {

enum class Boundary { Dirichlet, Neumann };

// quadrature mode for the transport scheme: nodal collocation (mass matrix
// lumps to a scalar) or exact Galerkin integrals with a banded mass matrix
enum class FpMode { Simpson, ExactGalerkin };

// deposit pattern of one noise branch: for each source node, up to 4^d target
// nodes with weights that sum to one per column
struct TransportMatrix {
  std::int64_t n = 0;
  int width = 0;
  std::vector<std::int32_t> idx; // n*width, -1 where truncated away
  std::vector<double> w;         // n*width
  // y += scale * (B x) with B[i][j] read column-wise from the pattern
  void apply_add(const std::vector<double>& x, double scale, std::vector<double>& y) const;
  std::vector<double> column_sums() const;
};

// symmetric positive definite banded matrix, lower-triangle storage
struct BandedSPD {
  int n = 0;
  int bw = 0;
  std::vector<double> band; // (bw+1) rows of length n: band[d][i] = A(i+d, i)
  double& at(int d, int i) { return band[static_cast<std::size_t>(d) * n + i]; }
  double at(int d, int i) const { return band[static_cast<std::size_t>(d) * n + i]; }
  void cholesky();                          // in place, throws if not SPD
  void solve(std::vector<double>& rhs) const; // after cholesky()
};

struct MassMatrix {
  FpMode mode = FpMode::Simpson;
  double lumped = 0.0; // (2 dx / 3)^d in Simpson mode
  BandedSPD exact;     // factored, 1-D exact mode only
};

MassMatrix assemble_mass_matrix(const UniformGrid& g, FpMode mode, int gauss_points = 4);

// raw (unfactored) band values of the exact 1-D mass matrix, for inspection
BandedSPD mass_matrix_bands(const UniformGrid& g, int gauss_points = 4);

std::vector<TransportMatrix> assemble_transport(const UniformGrid& g, const DriftFn& b,
                                                double t, double dt, double sigma,
                                                const StochasticStencil& s, Boundary bc);

std::vector<double> fp_step(const std::vector<double>& m,
                            const std::vector<TransportMatrix>& transports,
                            const StochasticStencil& s);

struct FpProblem {
  const UniformGrid* grid = nullptr;
  double sigma = 0.0;
  double dt = 0.0;
  int nsteps = 0;
  Boundary bc = Boundary::Dirichlet;
  FpMode mode = FpMode::Simpson;
};

struct DensityField {
  std::vector<std::vector<double>> m; // nsteps+1 slices
  double mass_drift = 0.0;            // max relative nodal-sum deviation
  double l2_init = 0.0, l2_max = 0.0; // Simpson-L2 stability record
  std::int64_t guard_hits = 0;        // truncation-guard activations (diagnostic)
};

// m0_values: nodal samples in Simpson mode; in exact mode the initial
// coefficients are obtained by mass-matrix projection of m0_formula.
DensityField fp_solve(const FpProblem& p, const std::vector<double>& m0_values,
                      const DriftFn& b);

DensityField fp_solve_projected(const FpProblem& p,
                                const std::function<double(const Point&)>& m0_formula,
                                const DriftFn& b);

} // namespace mfglg
