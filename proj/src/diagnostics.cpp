#include "mcf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "mcf/errors.hpp"
#include "mcf/grids.hpp"
#include "mcf/stencils.hpp"

namespace mcf {

CurvatureSample curvature_cartesian(const CartesianPatch& patch, int i, int k) {
  const CartDerivs d = cart_derivs(patch, i, k);
  const double zx2 = d.z_x * d.z_x;
  const double zy2 = d.z_y * d.z_y;
  const double W2 = 1.0 + zx2 + zy2;
  const double W = std::sqrt(W2);
  CurvatureSample s;
  s.H = ((1.0 + zy2) * d.z_xx - 2.0 * d.z_x * d.z_y * d.z_xy + (1.0 + zx2) * d.z_yy) / (W2 * W);
  s.K_gauss = (d.z_xx * d.z_yy - d.z_xy * d.z_xy) / (W2 * W2);
  s.A_norm = std::sqrt(std::max(0.0, s.H * s.H - 2.0 * s.K_gauss));
  return s;
}

TipCurvature tip_curvature(const CartesianPatch& patch) {
  TipCurvature best{-1.0, 0, 0};
  for (int i = 1; i < patch.nx - 1; ++i)
    for (int k = 1; k < patch.ny - 1; ++k) {
      const double a = curvature_cartesian(patch, i, k).A_norm;
      if (a > best.value) best = {a, i, k};
    }
  return best;
}

NeckScan neck_scan(const CylindricalPatch& patch, double z_lo, double z_hi) {
  NeckScan best{0.0, std::numeric_limits<double>::infinity(), -1, 0};
  for (int i = 0; i < patch.nz; ++i) {
    const double z = patch.z(i);
    if (z < z_lo || z > z_hi) continue;
    for (int k = 0; k < patch.ntheta; ++k)
      if (patch.r(i, k) < best.r_min) best = {z, patch.r(i, k), i, k};
  }
  if (best.i < 0)
    throw ConfigError("neck_scan: no rows in the window [" + std::to_string(z_lo) + ", " +
                      std::to_string(z_hi) + "]");
  return best;
}

namespace {

void check_modes(const CylindricalPatch& patch, int M) {
  if (M < 0 || patch.ntheta < 2 * M + 2)
    throw ConfigError("mode_amplitudes: M = " + std::to_string(M) + " needs ntheta >= " +
                      std::to_string(2 * M + 2) + ", have " + std::to_string(patch.ntheta));
}

ModeAmplitudes row_modes(const CylindricalPatch& patch, int i, int M) {
  const int n = patch.ntheta;
  ModeAmplitudes out{std::vector<double>(M + 1, 0.0), std::vector<double>(M + 1, 0.0)};
  for (int m = 0; m <= M; ++m) {
    double sc = 0.0;
    double ss = 0.0;
    for (int k = 0; k < n; ++k) {
      // m*k reduced mod n keeps the phase exact for large m*k.
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((m * k) % n) / n;
      sc += patch.r(i, k) * std::cos(phase);
      ss += patch.r(i, k) * std::sin(phase);
    }
    out.a[m] = 2.0 * sc / n;
    out.b[m] = 2.0 * ss / n;
  }
  out.a[0] *= 0.5;
  out.b[0] = 0.0;
  return out;
}

double row_min(const CylindricalPatch& patch, int i) {
  const auto row = patch.r.row(i);
  return *std::min_element(row.begin(), row.end());
}

}  // namespace

ModeAmplitudes mode_amplitudes(const CylindricalPatch& patch, double z, int M) {
  check_modes(patch, M);
  const int i = std::clamp(static_cast<int>(std::lround((z - patch.z_min) / patch.dz())), 0,
                           patch.nz - 1);
  return row_modes(patch, i, M);
}

ModeAmplitudes mode_amplitudes_interpolated(const CylindricalPatch& patch, double z, int M) {
  check_modes(patch, M);
  const double u = std::clamp((z - patch.z_min) / patch.dz(), 0.0, patch.nz - 1.0);
  if (patch.nz < 4) {
    const int i = std::min(static_cast<int>(u), patch.nz - 2);
    const double w = u - i;
    ModeAmplitudes lo = row_modes(patch, i, M);
    const ModeAmplitudes hi = row_modes(patch, i + 1, M);
    for (int m = 0; m <= M; ++m) {
      lo.a[m] = std::lerp(lo.a[m], hi.a[m], w);
      lo.b[m] = std::lerp(lo.b[m], hi.b[m], w);
    }
    return lo;
  }
  // Four-row Lagrange stencil, shifted inside the patch at the ends.
  const int i = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, patch.nz - 4);
  const double s = u - i;
  const double w[4] = {-(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0, s * (s - 2.0) * (s - 3.0) / 2.0,
                       -s * (s - 1.0) * (s - 3.0) / 2.0, s * (s - 1.0) * (s - 2.0) / 6.0};
  ModeAmplitudes out{std::vector<double>(M + 1, 0.0), std::vector<double>(M + 1, 0.0)};
  for (int j = 0; j < 4; ++j) {
    const ModeAmplitudes row = row_modes(patch, i + j, M);
    for (int m = 0; m <= M; ++m) {
      out.a[m] += w[j] * row.a[m];
      out.b[m] += w[j] * row.b[m];
    }
  }
  return out;
}

double refine_neck(const CylindricalPatch& patch, const NeckScan& neck) {
  const int i = neck.i;
  if (i <= 0 || i >= patch.nz - 1) return neck.z_neck;
  const double m0 = row_min(patch, i - 1), m1 = row_min(patch, i), m2 = row_min(patch, i + 1);
  const double curv = m0 - 2.0 * m1 + m2;
  if (!(curv > 0.0)) return neck.z_neck;
  const double shift = std::clamp(0.5 * (m0 - m2) / curv, -0.5, 0.5);
  return neck.z_neck + shift * patch.dz();
}

DiagnosticsSeries::DiagnosticsSeries(int modes) : modes_(modes) {
  if (modes < 0) throw ConfigError("series mode count must be non-negative");
}

void DiagnosticsSeries::append(SeriesRow row) {
  if (static_cast<int>(row.a.size()) != modes_ + 1 || static_cast<int>(row.b.size()) != modes_)
    throw ConfigError("series row has the wrong number of mode amplitudes");
  if (!rows_.empty() && !(row.t > rows_.back().t))
    throw ConfigError("series times must increase strictly: " + std::to_string(row.t) +
                      " after " + std::to_string(rows_.back().t));
  rows_.push_back(std::move(row));
}

SeriesRow record_row(const CartesianPatch& cart, const CylindricalPatch& cyl, double t, double dt,
                     const RecordOptions& options) {
  SeriesRow row;
  row.t = t;
  row.dt = dt;
  row.a.assign(options.modes + 1, 0.0);
  row.b.assign(options.modes, 0.0);
  if (options.with_cartesian) row.tip_A = tip_curvature(cart).value;
  if (options.with_cylindrical) {
    const NeckScan neck = neck_scan(cyl, options.neck_z_lo, options.neck_z_hi);
    row.r_min = neck.r_min;
    row.z_neck = refine_neck(cyl, neck);
    const ModeAmplitudes m = mode_amplitudes_interpolated(cyl, row.z_neck, options.modes);
    row.a = m.a;
    row.b.assign(m.b.begin() + 1, m.b.end());
  }
  if (options.with_cartesian && options.with_cylindrical)
    row.mismatch = measure_overlap_mismatch(cart, cyl, options.mismatch_samples);
  return row;
}

namespace {

struct Line {
  double slope;
  double intercept;
  double rms;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    mx += x[j];
    my += y[j];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    sxx += (x[j] - mx) * (x[j] - mx);
    sxy += (x[j] - mx) * (y[j] - my);
  }
  Line l{sxy / sxx, 0.0, 0.0};
  l.intercept = my - l.slope * mx;
  double ss = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double e = y[j] - (l.intercept + l.slope * x[j]);
    ss += e * e;
  }
  l.rms = std::sqrt(ss / n);
  return l;
}

double channel_value(const SeriesRow& r, Channel c) { return c == Channel::Tip ? r.tip_A : r.r_min; }

// Indices [first, last) of the rows within `decades` of T - t above the last usable row.
std::pair<std::size_t, std::size_t> select_window(const DiagnosticsSeries& s, double T,
                                                  const FitOptions& o) {
  const std::size_t n = s.size();
  const std::size_t last = n > static_cast<std::size_t>(o.exclude_last) ? n - o.exclude_last : 0;
  if (last == 0) return {0, 0};
  const double tau_end = T - s.rows()[last - 1].t;
  if (!(tau_end > 0.0)) return {0, 0};
  const double tau_lo = tau_end * std::pow(10.0, o.decades);
  std::size_t first = last - 1;
  while (first > 0 && T - s.rows()[first - 1].t <= tau_lo) --first;
  if (first > 0) --first;  // the window reaches at least the requested span
  return {first, last};
}

void require_window(const DiagnosticsSeries& s, Channel c, std::size_t first, std::size_t last,
                    const FitOptions& o) {
  if (last - first < static_cast<std::size_t>(o.min_rows))
    throw FitRejected("fit window holds " + std::to_string(last - first) + " rows, need " +
                      std::to_string(o.min_rows));
  for (std::size_t j = first + 1; j < last; ++j) {
    const double prev = channel_value(s.rows()[j - 1], c);
    const double cur = channel_value(s.rows()[j], c);
    const bool bad = !(cur > 0.0) || (c == Channel::Tip ? cur < prev * (1.0 - o.monotone_tolerance)
                                                        : cur > prev * (1.0 + o.monotone_tolerance));
    if (bad)
      throw FitRejected(std::string(c == Channel::Tip ? "tip curvature" : "neck radius") +
                        " is not monotone in the fit window at t = " +
                        std::to_string(s.rows()[j].t));
  }
}

Line loglog(const DiagnosticsSeries& s, Channel c, double T, std::size_t first, std::size_t last) {
  std::vector<double> x, y;
  for (std::size_t j = first; j < last; ++j) {
    x.push_back(std::log(T - s.rows()[j].t));
    y.push_back(std::log(channel_value(s.rows()[j], c)));
  }
  return least_squares(x, y);
}

BlowupFit finish(const DiagnosticsSeries& s, Channel c, double T, std::size_t first,
                 std::size_t last) {
  const Line l = loglog(s, c, T, first, last);
  BlowupFit f;
  f.channel = c;
  f.T_est = T;
  f.exponent = c == Channel::Tip ? -l.slope : l.slope;
  f.residual = l.rms;
  f.t_lo = s.rows()[first].t;
  f.t_hi = s.rows()[last - 1].t;
  f.rows_used = static_cast<int>(last - first);
  return f;
}

double neck_T(const DiagnosticsSeries& s, std::size_t first, std::size_t last) {
  std::vector<double> t, r2;
  for (std::size_t j = first; j < last; ++j) {
    t.push_back(s.rows()[j].t);
    r2.push_back(s.rows()[j].r_min * s.rows()[j].r_min);
  }
  const Line l = least_squares(t, r2);
  if (!(l.slope < 0.0)) throw FitRejected("neck radius squared is not decreasing");
  return -l.intercept / l.slope;
}

double tip_T(const DiagnosticsSeries& s, double T_guess, std::size_t first, std::size_t last,
             const FitOptions& o) {
  // Search over u = log(T - t_end) so the tolerance is relative to T - t_end.
  const double t_end = s.rows()[last - 1].t;
  const double span = std::max(T_guess - t_end, 1e-3 * (t_end - s.rows()[first].t));
  const double lo = std::log(1e-9 * span);
  const double hi = std::log(span / o.bracket_factor);
  auto cost = [&](double u) { return loglog(s, Channel::Tip, t_end + std::exp(u), first, last).rms; };
  std::uintmax_t iters = 500;
  const double u = boost::math::tools::brent_find_minima(cost, lo, hi, std::numeric_limits<double>::digits / 2, iters).first;
  return t_end + std::exp(u);
}

}  // namespace

BlowupFit fit_blowup(const DiagnosticsSeries& series, Channel channel, double T_hint,
                     const FitOptions& options) {
  const std::size_t n = series.size();
  if (n < static_cast<std::size_t>(options.min_rows + options.exclude_last))
    throw FitRejected("series holds " + std::to_string(n) + " rows, too few to fit");
  const std::size_t usable = n - options.exclude_last;

  std::size_t first = 0, last = usable;
  double T = T_hint;
  if (channel == Channel::Neck) {
    // Seed from the trailing rows, where r^2 is closest to linear in t.
    first = usable - static_cast<std::size_t>(options.min_rows);
    require_window(series, channel, first, last, options);
    T = neck_T(series, first, last);
  } else if (!(T > series.rows()[usable - 1].t)) {
    T = series.rows()[usable - 1].t + 1e-3 * (series.rows()[usable - 1].t - series.rows()[0].t);
  }

  for (int iter = 0; iter < 50; ++iter) {
    const auto [f2, l2] = select_window(series, T, options);
    require_window(series, channel, f2, l2, options);
    const double T2 = channel == Channel::Neck ? neck_T(series, f2, l2) : tip_T(series, T, f2, l2, options);
    const bool same = f2 == first && l2 == last;
    first = f2;
    last = l2;
    T = T2;
    if (same && iter > 0) break;
  }
  if (!(T > series.rows()[last - 1].t))
    throw FitRejected("estimated singular time does not lie beyond the fit window");
  return finish(series, channel, T, first, last);
}

std::string_view to_string(SingularityType type) {
  switch (type) {
    case SingularityType::TypeI: return "type-I";
    case SingularityType::TypeII: return "type-II";
    case SingularityType::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Classification classify(const DiagnosticsSeries& series, const BlowupFit& fit) {
  std::vector<double> x, y;
  for (const SeriesRow& r : series.rows()) {
    if (r.t < fit.t_lo || r.t > fit.t_hi) continue;
    double sup_a = r.tip_A;
    if (r.r_min > 0.0) sup_a = std::max(sup_a, std::numbers::sqrt2 / r.r_min);
    const double tau = fit.T_est - r.t;
    if (!(tau > 0.0 && sup_a > 0.0)) continue;
    x.push_back(std::log(tau));
    y.push_back(std::log(tau * sup_a));
  }
  Classification c;
  if (x.size() < 2) return c;
  c.slope = least_squares(x, y).slope;
  if (c.slope >= -0.05)
    c.type = SingularityType::TypeI;
  else if (c.slope <= -0.2)
    c.type = SingularityType::TypeII;
  return c;
}

}  // namespace mcf
