#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "mcf/diagnostics.hpp"
#include "mcf/errors.hpp"
#include "mcf/initial_data.hpp"

using namespace mcf;

namespace {

CartesianPatch sphere_cap(double R, double L, int n) {
  CartesianPatch p(L, n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) p.z(i, k) = -std::sqrt(R * R - p.x(i) * p.x(i) - p.y(k) * p.y(k));
  return p;
}

SeriesRow row(double t, double tip, double rmin) {
  return SeriesRow{t, 1e-6, tip, rmin, 0.5, 0.0, {rmin}, {}};
}

DiagnosticsSeries series_of(int n, double T, double t_end,
                            const std::function<SeriesRow(double)>& make) {
  // Geometric spacing in T - t from 0.5 T down to T - t_end.
  DiagnosticsSeries s(0);
  const double tau0 = 0.5 * T, tau1 = T - t_end;
  for (int j = 0; j < n; ++j) {
    const double tau = tau0 * std::pow(tau1 / tau0, static_cast<double>(j) / (n - 1));
    s.append(make(T - tau));
  }
  return s;
}

}  // namespace

TEST_CASE("curvature of a plane vanishes") {
  CartesianPatch p(1.0, 9, 9);
  for (int i = 0; i < 9; ++i)
    for (int k = 0; k < 9; ++k) p.z(i, k) = 0.3 * p.x(i) - 0.2 * p.y(k);
  const CurvatureSample c = curvature_cartesian(p, 4, 4);
  CHECK(std::abs(c.H) <= 1e-13);
  CHECK(std::abs(c.K_gauss) <= 1e-13);
  CHECK(c.A_norm <= 1e-6);
}

TEST_CASE("curvature of sphere caps converges at second order") {
  for (double R : {0.5, 1.0, 2.0}) {
    CAPTURE(R);
    auto errs = [&](int n) {
      const auto p = sphere_cap(R, 0.8 * R, n);
      double eH = 0.0, eA = 0.0;
      for (int i = 1; i < n - 1; ++i)
        for (int k = 1; k < n - 1; ++k) {
          const CurvatureSample c = curvature_cartesian(p, i, k);
          eH = std::max(eH, std::abs(c.H - 2.0 / R));
          eA = std::max(eA, std::abs(c.A_norm - std::sqrt(2.0) / R));
        }
      return std::pair{eH, eA};
    };
    const auto [h1, a1] = errs(41);
    const auto [h2, a2] = errs(81);
    CHECK(h1 / h2 >= 3.5);
    CHECK(h1 / h2 <= 4.5);
    CHECK(a1 / a2 >= 3.5);
    CHECK(a1 / a2 <= 4.5);
    const auto p = sphere_cap(R, 0.8 * R, 81);
    const CurvatureSample c = curvature_cartesian(p, 40, 40);
    CHECK(c.H == doctest::Approx(2.0 / R).epsilon(1e-3));
    CHECK(c.K_gauss == doctest::Approx(1.0 / (R * R)).epsilon(1e-3));
    CHECK(c.A_norm == doctest::Approx(std::sqrt(2.0) / R).epsilon(1e-3));
  }
}

TEST_CASE("tip curvature of a unit sphere cap sits at the origin") {
  const auto p = sphere_cap(1.0, 0.5, 51);
  const TipCurvature t = tip_curvature(p);
  // |A| is constant on a sphere, so only the value is meaningful.
  CHECK(t.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("curvature at the bowl tip is beta over root two") {
  const FlowParams params = derive_params(0.75, 1.0, 4.0);
  const InitialSurface s = build_patches(params, 129, 129, 64, 16);
  const CurvatureSample c = curvature_cartesian(s.cart, 64, 64);
  CHECK(c.A_norm == doctest::Approx(params.beta / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(c.H == doctest::Approx(params.beta).epsilon(1e-3));
}

TEST_CASE("neck_scan takes the first minimising row") {
  CylindricalPatch c(0.0, 1.0, 11, 8);
  c.r.fill(0.19);
  NeckScan n = neck_scan(c);
  CHECK(n.r_min == 0.19);
  CHECK(n.z_neck == 0.0);
  c.r(6, 3) = 0.1;
  c.r(8, 1) = 0.1;
  n = neck_scan(c);
  CHECK(n.z_neck == doctest::Approx(0.6));
  n = neck_scan(c, 0.65, 1.0);
  CHECK(n.z_neck == doctest::Approx(0.8));
  CHECK_THROWS_AS(neck_scan(c, 2.0, 3.0), ConfigError);
}

TEST_CASE("neck_scan finds the far dimple at its midpoint") {
  const FlowParams params = derive_params(0.75, 1.0, 4.0);
  CylindricalPatch c(0.0, 2.0, 129, 32);
  c.r.fill(params.r0);
  const double z_a = c.z(40), z_b = c.z(80);
  apply_far(c, FarPerturbation{0.1, z_a, z_b, 2});
  const NeckScan n = neck_scan(c);
  CHECK(n.z_neck == doctest::Approx(c.z(60)).epsilon(1e-12));
  CHECK(n.k == 0);
  CHECK(n.r_min == doctest::Approx(0.84375 * params.r0).epsilon(1e-12));
}

TEST_CASE("mode amplitudes of simple circles") {
  CylindricalPatch c(0.0, 1.0, 5, 32);
  c.r.fill(5.0);
  ModeAmplitudes m = mode_amplitudes(c, 0.5, 8);
  CHECK(m.a[0] == doctest::Approx(5.0).epsilon(1e-15));
  for (int j = 1; j <= 8; ++j) {
    CHECK(std::abs(m.a[j]) <= 1e-14);
    CHECK(std::abs(m.b[j]) <= 1e-14);
  }
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 32; ++k) c.r(i, k) = 1.0 + 0.25 * std::cos(4 * c.theta(k));
  m = mode_amplitudes(c, 0.5, 8);
  CHECK(m.a[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.a[4] == doctest::Approx(0.25).epsilon(1e-14));
  for (int j = 1; j <= 8; ++j)
    if (j != 4) CHECK(std::abs(m.a[j]) <= 1e-14);
  CHECK_THROWS_AS(mode_amplitudes(c, 0.5, 16), ConfigError);
  CHECK_NOTHROW(mode_amplitudes(c, 0.5, 15));
}

TEST_CASE("mode amplitudes of an n = 2 far perturbation occupy modes 0, 2, 4") {
  CylindricalPatch c(0.0, 1.0, 21, 32);
  c.r.fill(1.0);
  apply_far(c, FarPerturbation{0.1, 0.05, 0.95, 2});
  const ModeAmplitudes m = mode_amplitudes(c, 0.5, 10);
  // (1 + cos(2t)/4)^2 = 33/32 + cos(2t)/2 + cos(4t)/32 at the sine peak.
  CHECK(m.a[0] == doctest::Approx(1.0 - 0.1 * 33.0 / 32.0).epsilon(1e-13));
  CHECK(m.a[2] == doctest::Approx(-0.1 * 0.5).epsilon(1e-13));
  CHECK(m.a[4] == doctest::Approx(-0.1 / 32.0).epsilon(1e-13));
  for (int j : {1, 3, 5, 6, 7, 8, 9, 10}) CHECK(std::abs(m.a[j]) <= 1e-14);
}

TEST_CASE("mode amplitudes satisfy Parseval on band-limited data") {
  CylindricalPatch c(0.0, 1.0, 5, 64);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  double ac[11], bc[11];
  for (int j = 0; j <= 10; ++j) {
    ac[j] = u(rng);
    bc[j] = u(rng);
  }
  ac[0] = 1.0;
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 64; ++k) {
      double v = ac[0];
      for (int j = 1; j <= 10; ++j) v += ac[j] * std::cos(j * c.theta(k)) + bc[j] * std::sin(j * c.theta(k));
      c.r(i, k) = v;
    }
  const ModeAmplitudes m = mode_amplitudes(c, 0.5, 31);
  double lhs = m.a[0] * m.a[0], mean_sq = 0.0;
  for (int j = 1; j <= 31; ++j) lhs += 0.5 * (m.a[j] * m.a[j] + m.b[j] * m.b[j]);
  for (int k = 0; k < 64; ++k) mean_sq += c.r(2, k) * c.r(2, k) / 64.0;
  CHECK(lhs == doctest::Approx(mean_sq).epsilon(1e-10));
  for (int j = 1; j <= 10; ++j) {
    CHECK(m.a[j] == doctest::Approx(ac[j]).epsilon(1e-12));
    CHECK(m.b[j] == doctest::Approx(bc[j]).epsilon(1e-12));
  }
}

TEST_CASE("interpolated mode amplitudes are exact for cubic profiles in z") {
  CylindricalPatch p(0.0, 1.0, 21, 16);
  auto a0 = [](double z) { return 1.0 + 0.2 * z - 0.3 * z * z + 0.1 * z * z * z; };
  auto a2 = [](double z) { return 0.05 - 0.04 * z * z * z; };
  for (int i = 0; i < p.nz; ++i)
    for (int k = 0; k < p.ntheta; ++k)
      p.r(i, k) = a0(p.z(i)) + a2(p.z(i)) * std::cos(2.0 * p.theta(k));
  for (double z : {0.0, 0.013, 0.37, 0.5, 0.981, 1.0}) {
    CAPTURE(z);
    const ModeAmplitudes m = mode_amplitudes_interpolated(p, z, 3);
    CHECK(m.a[0] == doctest::Approx(a0(z)).epsilon(1e-12));
    CHECK(m.a[2] == doctest::Approx(a2(z)).epsilon(1e-12));
    CHECK(std::abs(m.a[1]) <= 1e-13);
    CHECK(std::abs(m.b[2]) <= 1e-13);
    CHECK(m.b[0] == 0.0);
  }
  const ModeAmplitudes node = mode_amplitudes(p, p.z(7), 3);
  const ModeAmplitudes interp = mode_amplitudes_interpolated(p, p.z(7), 3);
  CHECK(interp.a[2] == doctest::Approx(node.a[2]).epsilon(1e-13));
}

TEST_CASE("refine_neck lands on the vertex of a parabolic neck") {
  CylindricalPatch p(0.0, 1.0, 41, 8);
  const double z_star = 0.4137;
  for (int i = 0; i < p.nz; ++i)
    for (int k = 0; k < p.ntheta; ++k) p.r(i, k) = 0.2 + 3.0 * (p.z(i) - z_star) * (p.z(i) - z_star);
  const NeckScan n = neck_scan(p);
  CHECK(std::abs(n.z_neck - z_star) <= 0.5 * p.dz());
  CHECK(refine_neck(p, n) == doctest::Approx(z_star).epsilon(1e-12));
  NeckScan end{p.z(0), p.r(0, 0), 0, 0};
  CHECK(refine_neck(p, end) == p.z(0));
}

TEST_CASE("fit window spans at least the requested decades") {
  const double T = 0.018316;
  const auto s = series_of(300, T, T - 2e-6, [&](double t) { return row(t, std::pow(T - t, -1.25), 0.19); });
  for (double d : {0.5, 1.0, 1.5}) {
    CAPTURE(d);
    FitOptions o;
    o.decades = d;
    const BlowupFit f = fit_blowup(s, Channel::Tip, T, o);
    CHECK(std::log10((f.T_est - f.t_lo) / (f.T_est - f.t_hi)) >= d - 1e-9);
  }
}

TEST_CASE("series rows must increase in time") {
  DiagnosticsSeries s(1);
  s.append(SeriesRow{0.0, 0.0, 1.0, 1.0, 0.0, 0.0, {1.0, 0.0}, {0.0}});
  CHECK_THROWS_AS(s.append(SeriesRow{0.0, 0.0, 1.0, 1.0, 0.0, 0.0, {1.0, 0.0}, {0.0}}), ConfigError);
  CHECK_THROWS_AS(s.append(SeriesRow{1.0, 0.0, 1.0, 1.0, 0.0, 0.0, {1.0}, {}}), ConfigError);
  CHECK(s.size() == 1);
}

TEST_CASE("neck fit recovers the cylinder law exactly") {
  const double T = 0.018316;
  const auto s = series_of(200, T, T - 1e-6, [&](double t) { return row(t, 1.0, std::sqrt(2 * (T - t))); });
  const BlowupFit f = fit_blowup(s, Channel::Neck, T);
  CHECK(f.exponent == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(f.T_est == doctest::Approx(T).epsilon(1e-6));
  CHECK(f.residual <= 1e-8);
  CHECK(f.t_lo < f.t_hi);
  CHECK(f.t_hi <= f.T_est);
  CHECK(classify(s, f).type == SingularityType::TypeI);
}

TEST_CASE("tip fit recovers an exact power law and its singular time") {
  const double T = 0.018316;
  const auto s = series_of(300, T, T - 2e-6, [&](double t) { return row(t, std::pow(T - t, -1.25), 0.19); });
  const BlowupFit f = fit_blowup(s, Channel::Tip, 1.02 * T);
  CHECK(f.exponent == doctest::Approx(1.25).epsilon(1e-6));
  CHECK(f.T_est == doctest::Approx(T).epsilon(1e-6));
  const Classification c = classify(s, f);
  CHECK(c.slope == doctest::Approx(-0.25).epsilon(1e-4));
  CHECK(c.type == SingularityType::TypeII);
}

TEST_CASE("tip fit tolerates one percent multiplicative noise") {
  const double T = 0.018316;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.01);
  int trials = 0, good = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = series_of(400, T, T - 2e-6, [&](double t) {
      return row(t, std::pow(T - t, -1.25) * (1.0 + noise(rng)), 0.19);
    });
    FitOptions o;
    o.monotone_tolerance = 0.1;
    const BlowupFit f = fit_blowup(s, Channel::Tip, T, o);
    ++trials;
    if (std::abs(f.exponent - 1.25) <= 0.03 * 1.25) ++good;
  }
  CHECK(good == trials);
}

TEST_CASE("classify follows the band rule") {
  const double T = 1.0;
  auto make = [&](double p) {
    return series_of(100, T, T - 1e-4, [&, p](double t) { return row(t, std::pow(T - t, -p), 1e9); });
  };
  auto fit_for = [&](const DiagnosticsSeries& s) {
    BlowupFit f;
    f.T_est = T;
    f.t_lo = s.rows().front().t;
    f.t_hi = s.rows().back().t;
    return f;
  };
  const auto s1 = make(1.0);
  CHECK(classify(s1, fit_for(s1)).type == SingularityType::TypeI);
  const auto s2 = make(1.25);
  CHECK(classify(s2, fit_for(s2)).type == SingularityType::TypeII);
  const auto s3 = make(1.1);
  const Classification c3 = classify(s3, fit_for(s3));
  CHECK(c3.slope == doctest::Approx(-0.1).epsilon(1e-9));
  CHECK(c3.type == SingularityType::Inconclusive);
  CHECK(classify(s3, fit_for(s3)).slope == c3.slope);
  CHECK(to_string(SingularityType::TypeII) == "type-II");
}

TEST_CASE("fit rejects short or non-monotone windows") {
  const double T = 0.02;
  const auto few = series_of(15, T, T - 1e-5, [&](double t) { return row(t, 1.0, std::sqrt(2 * (T - t))); });
  CHECK_THROWS_AS(fit_blowup(few, Channel::Neck, T), FitRejected);
  int j = 0;
  const auto bumpy = series_of(100, T, T - 1e-6, [&](double t) {
    ++j;
    return row(t, std::pow(T - t, -1.25) * (j % 10 == 0 ? 0.5 : 1.0), 0.1);
  });
  CHECK_THROWS_AS(fit_blowup(bumpy, Channel::Tip, T), FitRejected);
}
