#include "mcf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mcf::kernels {
namespace {

inline void cartesian_row(const CartesianPatch& in, double dt, Grid2D& out, int i, double dx,
                          double dy) noexcept {
  const double* lo = in.z.row(i - 1).data();
  const double* mid = in.z.row(i).data();
  const double* hi = in.z.row(i + 1).data();
  double* o = out.row(i).data();
  for (int k = 1; k < in.ny - 1; ++k) {
    const CartDerivs d = detail::cart_derivs_rows(lo, mid, hi, k, dx, dy);
    o[k] = mid[k] + dt * cartesian_rate(d);
  }
}

inline void cylindrical_row(const CylindricalPatch& in, double dt, Grid2D& out, int i, double dz,
                            double dth) noexcept {
  const double* lo = in.r.row(i - 1).data();
  const double* mid = in.r.row(i).data();
  const double* hi = in.r.row(i + 1).data();
  double* o = out.row(i).data();
  const int n = in.ntheta;
  for (int k = 0; k < n; ++k) {
    const int km = k == 0 ? n - 1 : k - 1;
    const int kp = k == n - 1 ? 0 : k + 1;
    const CylDerivs d = detail::cyl_derivs_rows(lo, mid, hi, k, km, kp, dz, dth);
    o[k] = mid[k] + dt * cylindrical_rate(d, mid[k]);
  }
}

}  // namespace

void advance_cartesian_serial(const CartesianPatch& in, double dt, Grid2D& out) {
  const double dx = in.dx();
  const double dy = in.dy();
  for (int i = 1; i < in.nx - 1; ++i) cartesian_row(in, dt, out, i, dx, dy);
}

void advance_cartesian_parallel(const CartesianPatch& in, double dt, Grid2D& out) {
  const double dx = in.dx();
  const double dy = in.dy();
#pragma omp parallel for schedule(static)
  for (int i = 1; i < in.nx - 1; ++i) cartesian_row(in, dt, out, i, dx, dy);
}

void advance_cylindrical_serial(const CylindricalPatch& in, double dt, Grid2D& out) {
  const double dz = in.dz();
  const double dth = in.dtheta();
  for (int i = 1; i < in.nz - 1; ++i) cylindrical_row(in, dt, out, i, dz, dth);
}

void advance_cylindrical_parallel(const CylindricalPatch& in, double dt, Grid2D& out) {
  const double dz = in.dz();
  const double dth = in.dtheta();
#pragma omp parallel for schedule(static)
  for (int i = 1; i < in.nz - 1; ++i) cylindrical_row(in, dt, out, i, dz, dth);
}

double min_value_serial(const Grid2D& g) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : g.values()) m = std::min(m, v);
  return m;
}

double min_value_parallel(const Grid2D& g) {
  double m = std::numeric_limits<double>::infinity();
  const double* p = g.data();
  const long n = static_cast<long>(g.size());
#pragma omp parallel for reduction(min : m) schedule(static)
  for (long j = 0; j < n; ++j) m = std::min(m, p[j]);
  return m;
}

long first_non_finite(const Grid2D& g) {
  const auto v = g.values();
  const auto it = std::find_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); });
  return it == v.end() ? -1 : static_cast<long>(it - v.begin());
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace mcf::kernels
