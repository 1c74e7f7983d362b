#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mcf/kernels.hpp"

using namespace mcf;

namespace {

CartesianPatch noisy_cart(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  CartesianPatch p(0.4, n, n + 2);
  for (int i = 0; i < p.nx; ++i)
    for (int k = 0; k < p.ny; ++k)
      p.z(i, k) = std::hypot(p.x(i), p.y(k)) * 1.7 + 0.3 * p.x(i) * p.y(k) + u(rng);
  return p;
}

CylindricalPatch noisy_cyl(int nz, int nt, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  CylindricalPatch p(0.2, 1.5, nz, nt);
  for (int i = 0; i < nz; ++i)
    for (int k = 0; k < nt; ++k)
      p.r(i, k) = 0.1 + 0.05 * p.z(i) * (1.0 + 0.2 * std::cos(2.0 * p.theta(k))) + u(rng);
  return p;
}

}  // namespace

TEST_CASE("parallel kernels agree bitwise with the serial reference") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto c = noisy_cart(37, seed);
    Grid2D a = c.z, b = c.z;
    kernels::advance_cartesian_serial(c, 1e-6, a);
    kernels::advance_cartesian_parallel(c, 1e-6, b);
    CHECK(a == b);

    const auto y = noisy_cyl(45, 32, seed);
    Grid2D ra = y.r, rb = y.r;
    kernels::advance_cylindrical_serial(y, 1e-6, ra);
    kernels::advance_cylindrical_parallel(y, 1e-6, rb);
    CHECK(ra == rb);
    CHECK(kernels::min_value_serial(y.r) == kernels::min_value_parallel(y.r));
  }
}

TEST_CASE("kernels leave boundary entries of the output untouched") {
  const auto c = noisy_cart(15, 7);
  Grid2D out(c.nx, c.ny, -99.0);
  kernels::advance_cartesian_serial(c, 1e-6, out);
  CHECK(out(0, 3) == -99.0);
  CHECK(out(c.nx - 1, 3) == -99.0);
  CHECK(out(3, 0) == -99.0);
  CHECK(out(3, c.ny - 1) == -99.0);
  CHECK(out(3, 3) != -99.0);

  const auto y = noisy_cyl(11, 8, 7);
  Grid2D r(y.nz, y.ntheta, -99.0);
  kernels::advance_cylindrical_parallel(y, 1e-6, r);
  for (int k = 0; k < y.ntheta; ++k) {
    CHECK(r(0, k) == -99.0);
    CHECK(r(y.nz - 1, k) == -99.0);
    CHECK(r(1, k) != -99.0);
  }
}

TEST_CASE("rate formulas reduce correctly") {
  CHECK(kernels::cylindrical_rate(CylDerivs{}, 2.0) == -0.5);
  CylDerivs d;
  d.r_z = 0.5;
  d.r_zz = 0.8;
  // Rotationally symmetric reduction r_zz / (1 + r_z^2) - 1/r.
  CHECK(kernels::cylindrical_rate(d, 0.25) == doctest::Approx(0.8 / 1.25 - 4.0));
  CartDerivs c;
  c.z_xx = 1.0;
  c.z_yy = 1.0;
  CHECK(kernels::cartesian_rate(c) == 2.0);
  c = CartDerivs{3.0, 4.0, 0.0, 0.0, 0.0};
  CHECK(kernels::cartesian_rate(c) == 0.0);
}

TEST_CASE("non-finite scan reports the first offending entry") {
  Grid2D g(4, 5, 1.0);
  CHECK(kernels::first_non_finite(g) == -1);
  g(2, 3) = std::numeric_limits<double>::quiet_NaN();
  g(3, 1) = std::numeric_limits<double>::infinity();
  CHECK(kernels::first_non_finite(g) == 13);
  CHECK(kernels::thread_count() >= 1);
}
