#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfglg/basis.hpp"
#include "mfglg/grid.hpp"

using namespace mfglg;

TEST_CASE("grid geometry and indexing") {
  const UniformGrid g(1, {-2.0, 0.0}, {2.0, 0.0}, {21, 1});
  CHECK(g.dim() == 1);
  CHECK(g.dx() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(g.size() == 21);
  CHECK(g.node(0)[0] == doctest::Approx(-2.0));
  CHECK(g.node(20)[0] == doctest::Approx(2.0));
  CHECK(g.coord(0, 10) == doctest::Approx(0.0));

  const UniformGrid g2(2, {0.0, -1.0}, {1.0, 0.0}, {5, 5});
  CHECK(g2.size() == 25);
  CHECK(g2.index(3, 2) == 2 * 5 + 3);
  const Point p = g2.node(g2.index(3, 2));
  CHECK(p[0] == doctest::Approx(0.75));
  CHECK(p[1] == doctest::Approx(-0.5));
}

TEST_CASE("grid construction rejects bad shapes") {
  CHECK_THROWS(UniformGrid(1, {0.0, 0.0}, {1.0, 0.0}, {4, 1}));   // even node count
  CHECK_THROWS(UniformGrid(1, {0.0, 0.0}, {1.0, 0.0}, {3, 1}));   // too small
  CHECK_THROWS(UniformGrid(2, {0.0, 0.0}, {1.0, 2.0}, {5, 7}));   // anisotropic spacing
  CHECK_NOTHROW(UniformGrid::from_dx(1, {-2.0, 0.0}, {2.0, 0.0}, 0.2));
  CHECK_THROWS(UniformGrid::from_dx(1, {-2.0, 0.0}, {2.0, 0.0}, 0.3)); // does not tile
}

TEST_CASE("composite quadrature integrates cubics exactly") {
  const UniformGrid g(1, {0.0, 0.0}, {1.0, 0.0}, {9, 1});
  std::vector<double> f(g.size());
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i)[0];
    f[i] = 4.0 * x * x * x - x + 2.0;
  }
  CHECK(simpson_integrate(f, g) == doctest::Approx(2.5).epsilon(1e-14));

  const UniformGrid g2(2, {0.0, 0.0}, {1.0, 1.0}, {5, 5});
  std::vector<double> f2(g2.size());
  for (std::int64_t i = 0; i < g2.size(); ++i) {
    const Point p = g2.node(i);
    f2[i] = p[0] * p[0] * p[1];
  }
  CHECK(simpson_integrate(f2, g2) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("reference basis: cardinality and fixed half-node values") {
  CHECK(reference_basis(0.0) == doctest::Approx(1.0).epsilon(1e-16));
  for (int k = 1; k <= 3; ++k) {
    CHECK(reference_basis(static_cast<double>(k)) == doctest::Approx(0.0));
    CHECK(reference_basis(static_cast<double>(-k)) == doctest::Approx(0.0));
  }
  CHECK(reference_basis(0.5) == doctest::Approx(0.5625).epsilon(1e-16));
  CHECK(reference_basis(1.5) == doctest::Approx(-0.0625).epsilon(1e-16));
  CHECK(reference_basis(2.5) == 0.0);
  CHECK(reference_basis(-0.5) == doctest::Approx(0.5625).epsilon(1e-16));
}

TEST_CASE("stencil weights sum to one") {
  for (double t : {1.0, 1.25, 1.5, 1.83, 2.0}) {
    const auto w = lagrange_weights(t);
    CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(1.0).epsilon(1e-14));
  }
  // interpolating property at the stencil nodes
  const auto w = lagrange_weights(2.0);
  CHECK(w[2] == doctest::Approx(1.0));
  CHECK(std::abs(w[0]) + std::abs(w[1]) + std::abs(w[3]) < 1e-14);
}

TEST_CASE("interpolation reproduces cubic polynomials") {
  const UniformGrid g(1, {-1.5, 0.0}, {2.5, 0.0}, {17, 1});
  auto poly = [](double x) { return ((x - 2.0) * x + 1.0) * x - 0.5; };
  std::vector<double> f(g.size());
  for (std::int64_t i = 0; i < g.size(); ++i) f[i] = poly(g.node(i)[0]);
  for (double x : {-1.5, -1.49, -0.73, 0.0, 0.411, 1.999, 2.5}) {
    CHECK(interpolate(g, f, {x, 0.0}, Extension::ClampStencil) ==
          doctest::Approx(poly(x)).epsilon(1e-12));
  }
}

TEST_CASE("two-dimensional interpolation is the tensor product") {
  const UniformGrid g(2, {-1.0, -1.0}, {1.0, 1.0}, {9, 9});
  auto poly = [](double x, double y) { return x * x * x - 2.0 * y * y * x + y - 0.25; };
  std::vector<double> f(g.size());
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const Point p = g.node(i);
    f[i] = poly(p[0], p[1]);
  }
  for (double x : {-0.99, -0.2, 0.63}) {
    for (double y : {-0.77, 0.11, 0.98}) {
      CHECK(interpolate(g, f, {x, y}, Extension::ClampStencil) ==
            doctest::Approx(poly(x, y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("reflection indexing folds with period twice the span") {
  const int n = 5; // nodes 0..4, period 8
  CHECK(reflect_index(-1, n) == 1);
  CHECK(reflect_index(-2, n) == 2);
  CHECK(reflect_index(5, n) == 3);
  CHECK(reflect_index(6, n) == 2);
  CHECK(reflect_index(8, n) == 0);
  CHECK(reflect_index(9, n) == 1);
  CHECK(reflect_index(3, n) == 3);
}

TEST_CASE("out-of-range queries honor the extension rule") {
  const UniformGrid g(1, {0.0, 0.0}, {1.0, 0.0}, {9, 1});
  std::vector<double> f(g.size());
  for (std::int64_t i = 0; i < g.size(); ++i) f[i] = g.node(i)[0];
  // zero padding drops contributions outside the domain
  CHECK(interpolate(g, f, {-0.4, 0.0}, Extension::ZeroPad) == doctest::Approx(0.0));
  // clamped stencils extrapolate with the boundary cubic: exact for linear data
  CHECK(interpolate(g, f, {-0.05, 0.0}, Extension::ClampStencil) ==
        doctest::Approx(-0.05).epsilon(1e-13));
  // reflection produces the even extension, so queries mirror across the
  // edge even when the stencil straddles it ...
  CHECK(interpolate(g, f, {-0.1, 0.0}, Extension::Reflect) ==
        doctest::Approx(interpolate(g, f, {0.1, 0.0}, Extension::Reflect)).epsilon(1e-13));
  // ... and once the stencil sits inside the smooth reflected branch the
  // mirrored value is reproduced exactly
  CHECK(interpolate(g, f, {-0.3, 0.0}, Extension::Reflect) ==
        doctest::Approx(0.3).epsilon(1e-13));
}
