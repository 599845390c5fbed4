#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "epimon/nelder_mead.hpp"
#include "epimon/series.hpp"

namespace epimon {

enum class LossKind { L1, L2 };
enum class FitKind { DpSegments, MinOfLines };

std::string to_string(LossKind kind);
std::string to_string(FitKind kind);

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double t) const { return intercept + slope * t; }
};

struct LineFit {
  Line line;
  double loss = 0.0;
};

/// Piecewise-linear fit of a log series.
///
/// DpSegments: segments[j] applies from breakpoints[j-1] (inclusive) up to
/// breakpoints[j]; pieces need not join. MinOfLines: the fitted function is
/// min_j segments[j](t), slopes ascending; breakpoints are the instants
/// inside the data span where the active line changes.
struct SegmentedFit {
  FitKind kind = FitKind::DpSegments;
  LossKind loss_kind = LossKind::L1;
  std::vector<double> breakpoints;
  std::vector<Line> segments;
  double loss = 0.0;
  double span_first = 0.0;
  double span_last = 0.0;

  double evaluate(double t) const;
};

/// Residual loss of the stored parameters on the series.
double fit_loss(const LogSeries& series, const SegmentedFit& fit);

/// Exact least-absolute-deviation line. Among optimal lines: the slope with
/// the smallest magnitude, then the midpoint of the optimal intercept range.
LineFit fit_line_l1(std::span<const double> x, std::span<const double> z);

/// Ordinary least squares line.
LineFit fit_line_l2(std::span<const double> x, std::span<const double> z);

LineFit fit_line(std::span<const double> x, std::span<const double> z, LossKind kind);

/// Globally optimal partition into at most nu contiguous segments of at least
/// two points each. Fewer segments win ties; equal-loss partitions resolve to
/// the earliest breakpoints.
SegmentedFit fit_segmented_dp(const LogSeries& series, int nu, LossKind loss_kind);

/// Lines forming the pointwise minimum over [span_first, span_last], sorted by
/// ascending slope. Lines never attaining the minimum on the span are dropped.
std::vector<Line> concave_envelope_init(
    std::span<const Line> lines, double span_first = -std::numeric_limits<double>::infinity(),
    double span_last = std::numeric_limits<double>::infinity());

/// Instants in (span_first, span_last) where the active line of min_j lines
/// changes.
std::vector<double> envelope_breakpoints(std::span<const Line> lines, double span_first,
                                         double span_last);

/// Nelder-Mead local search on the min-of-lines parametrisation started at
/// `init`. The returned loss never exceeds the loss of `init`.
SegmentedFit fit_minlines_local(const LogSeries& series, std::span<const Line> init,
                                LossKind loss_kind, const NelderMeadOptions& options = {});

/// DP partition, per-period fits, concave envelope, then local search.
SegmentedFit fit_minlines(const LogSeries& series, int nu, LossKind loss_kind,
                          const NelderMeadOptions& options = {});

struct TropicalCheck {
  double sup_deviation = 0.0;
  double offset = 0.0;  // optimal global shift gamma added to the profile
  bool pass = false;
};

/// sup_t |z(t) - (profile(t) + gamma)| with gamma chosen to minimise it;
/// pass iff the deviation is at most delta / 2 + tolerance.
TropicalCheck tropical_check(const LogSeries& y, const std::function<double(double)>& profile,
                             double delta, double tolerance = 1e-6);
TropicalCheck tropical_check(const LogSeries& y, const SegmentedFit& fit, double delta,
                             double tolerance = 1e-6);

/// Continuous piecewise-linear profile with the given slopes, switching at the
/// given instants, equal to zero at t = start.
std::function<double(double)> tropical_profile(std::vector<double> slopes,
                                               std::vector<double> switch_times,
                                               double start = 0.0);

}  // namespace epimon
