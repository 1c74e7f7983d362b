#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "mcf/patches.hpp"

namespace mcf {

struct CurvatureSample {
  double H = 0.0;        // mean curvature; positive on a shrinking sphere cap z = -sqrt(R^2 - rho^2)
  double K_gauss = 0.0;
  double A_norm = 0.0;   // |A| = sqrt(H^2 - 2K), clamped at zero under the root
};

/// Graph curvature at an interior node from the centered stencils.
CurvatureSample curvature_cartesian(const CartesianPatch& patch, int i, int k);

struct TipCurvature {
  double value = 0.0;
  int i = 0;
  int k = 0;
};

/// Largest |A| over interior nodes, with its location.
TipCurvature tip_curvature(const CartesianPatch& patch);

struct NeckScan {
  double z_neck = 0.0;
  double r_min = 0.0;
  int i = 0;
  int k = 0;
};

/// Minimum radius over rows whose z lies in [z_lo, z_hi] (the whole patch by
/// default). Ties go to the smaller z.
NeckScan neck_scan(const CylindricalPatch& patch,
                   double z_lo = -std::numeric_limits<double>::infinity(),
                   double z_hi = std::numeric_limits<double>::infinity());

struct ModeAmplitudes {
  std::vector<double> a;  // a[0] is the mean radius
  std::vector<double> b;  // b[0] is always 0
};

/// Discrete Fourier coefficients of r on the row nearest z, modes 0..M.
/// Throws ConfigError unless ntheta >= 2M + 2.
ModeAmplitudes mode_amplitudes(const CylindricalPatch& patch, double z, int M);

/// Same sums, interpolated in z with a four-row cubic (linear below four rows).
ModeAmplitudes mode_amplitudes_interpolated(const CylindricalPatch& patch, double z, int M);

/// Sub-cell neck position: vertex of the parabola through the per-row minimum
/// radius at the neck row and its two neighbours. Falls back to the node z at
/// the patch ends or where the rows do not bracket a minimum.
double refine_neck(const CylindricalPatch& patch, const NeckScan& neck);

struct SeriesRow {
  double t = 0.0;
  double dt = 0.0;
  double tip_A = 0.0;
  double r_min = 0.0;
  double z_neck = 0.0;
  double mismatch = 0.0;
  std::vector<double> a;  // modes 0..M
  std::vector<double> b;  // modes 1..M
};

/// Time-ordered diagnostic records. Rows must arrive with strictly increasing t.
class DiagnosticsSeries {
 public:
  explicit DiagnosticsSeries(int modes = 0);

  int modes() const noexcept { return modes_; }
  const std::vector<SeriesRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  /// Throws ConfigError if t does not increase or the mode count is wrong.
  void append(SeriesRow row);

 private:
  int modes_;
  std::vector<SeriesRow> rows_;
};

struct RecordOptions {
  int modes = 0;
  int mismatch_samples = 32;
  double neck_z_lo = -std::numeric_limits<double>::infinity();
  double neck_z_hi = std::numeric_limits<double>::infinity();
  bool with_cartesian = true;   // tip curvature and overlap mismatch
  bool with_cylindrical = true;
};

/// One series row from the current patches. z_neck is the refined neck
/// position and the mode amplitudes are interpolated there.
SeriesRow record_row(const CartesianPatch& cart, const CylindricalPatch& cyl, double t, double dt,
                     const RecordOptions& options);

enum class Channel { Tip, Neck };

struct FitOptions {
  double decades = 1.0;      // window spans at least this many decades of T_est - t
  int exclude_last = 5;      // rows dropped at the end of the series
  int min_rows = 20;
  // Relative reversal allowed before rejecting; regrids perturb grid-scale
  // features (an under-resolved tip) by a few percent.
  double monotone_tolerance = 0.05;
  double bracket_factor = 0.5;       // tip channel: search T in [t_end, t_end + ...] around T_hint
};

struct BlowupFit {
  Channel channel = Channel::Tip;
  double exponent = 0.0;
  double T_est = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  double t_lo = 0.0;
  double t_hi = 0.0;
  int rows_used = 0;
};

/// Power-law fit of the tip curvature (|A| ~ (T - t)^-p, exponent p) or the
/// neck radius (r_min ~ (T - t)^p). Throws FitRejected on too few rows or
/// non-monotone data in the window.
BlowupFit fit_blowup(const DiagnosticsSeries& series, Channel channel, double T_hint,
                     const FitOptions& options = {});

enum class SingularityType { TypeI, TypeII, Inconclusive };

std::string_view to_string(SingularityType type);

struct Classification {
  SingularityType type = SingularityType::Inconclusive;
  double slope = 0.0;  // d log q / d log(T_est - t) over the fit window
};

/// q = (T_est - t) * max(tip_A, sqrt(2)/r_min) over the fit window. Bounded q
/// (slope >= -0.05) is Type-I, growing q (slope <= -0.2) is Type-II.
Classification classify(const DiagnosticsSeries& series, const BlowupFit& fit);

}  // namespace mcf
