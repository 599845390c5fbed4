#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epimon/series.hpp"

namespace epimon {

enum class SlopeModel { GaussOls, LaplaceL1, Combined };
std::string to_string(SlopeModel model);

/// Regression of log counts on day indices with the variance of the slope.
///
/// `scale` is sigma-hat (residual standard deviation, divisor n - 2) for
/// GaussOls and the mean absolute residual for LaplaceL1. Both models use
/// V = scale^2 / sxx with sxx = sum (X - X_bar)^2. Combined estimates only
/// carry beta_hat, V and n.
struct SlopeEstimate {
  SlopeModel model = SlopeModel::GaussOls;
  double beta_hat = 0.0;
  double alpha_hat = 0.0;
  double scale = 0.0;
  double V = 0.0;
  int n = 0;
  int df = 0;
  double x_bar = 0.0;
  double sxx = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ConfidenceIntervals {
  Interval alpha;
  Interval beta;
  std::optional<Interval> forecast;  // prediction interval for Z at the forecast day
  double quantile = 0.0;             // t_{1-eps/2}^{n-2}
};

struct TrapezoidPoint {
  double day = 0.0;
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct AlarmConfig {
  double theta_warn = 0.25;
  double theta_alarm = 0.75;
  int window_days = 10;
  double doubling_threshold_D = 14.0;
  double epsilon = 0.05;
  SlopeModel model = SlopeModel::LaplaceL1;
};

// Throws PreconditionError unless 0 < theta_warn <= theta_alarm < 1 and the
// remaining fields are in range.
void validate(const AlarmConfig& cfg);

enum class AlarmLevel { None = 0, Warning = 1, Alarm = 2, Confirmed = 3 };
std::string to_string(AlarmLevel level);

enum class CalibrationMode { FalsePositive, FalseNegative };

SlopeEstimate ols_fit(std::span<const double> X, std::span<const double> Z);

/// Least-absolute-deviation fit under the Laplace noise model.
SlopeEstimate l1_fit(std::span<const double> X, std::span<const double> Z);

SlopeEstimate fit_slope(std::span<const double> X, std::span<const double> Z, SlopeModel model);

/// Quantile of the slope pivot: Student t with df for GaussOls, standard
/// normal otherwise.
double pivot_quantile(const SlopeEstimate& est, double p);

ConfidenceIntervals confidence_intervals(const SlopeEstimate& est, double epsilon,
                                         std::optional<double> forecast_day = std::nullopt);

/// Forecast envelopes from t_last to t_last + horizon (one point per day):
/// the prediction band at t_last extended by lines at the slope-interval ends.
std::vector<TrapezoidPoint> trapezoid_domain(const SlopeEstimate& est, double t_last,
                                             int horizon, double epsilon);

/// Probability that the slope is positive under the fitted pivot.
double slope_positive_probability(const SlopeEstimate& est);

/// beta_hat + q_p sqrt(V): the p-quantile of the slope distribution.
double slope_quantile(const SlopeEstimate& est, double p);

/// Inverse-variance weighted combination of independent slope estimates.
SlopeEstimate combine(std::span<const SlopeEstimate> estimates);

AlarmLevel alarm_level(double p_adv, double p_disp, const AlarmConfig& cfg);

/// Doubling time at most D with confidence 1 - epsilon (false-positive mode)
/// or not excluded at that confidence (false-negative mode).
bool doubling_time_alarm(const SlopeEstimate& est, double D, double epsilon, CalibrationMode mode);

struct DoublingTimeIntervals {
  Interval upper_bound;  // I1 = [0, ln2 / (beta_hat - q sqrt V)]
  Interval lower_bound;  // I2 = [ln2 / max(0, beta_hat + q sqrt V), +inf)
};

DoublingTimeIntervals delta_confidence(const SlopeEstimate& est, double epsilon);

struct SeriesAssessment {
  SlopeEstimate estimate;
  double p_plus = 0.0;
  double doubling_time = 0.0;
  double needle_warn = 0.0;   // theta_warn-quantile of the slope
  double needle_alarm = 0.0;  // theta_alarm-quantile of the slope
  bool doubling_alarm = false;
  std::size_t dropped_zero_days = 0;
  LogSeries window;
};

struct AlarmReport {
  double p_adv_plus = 0.0;
  double p_disp_plus = 0.0;
  AlarmLevel level = AlarmLevel::None;
  bool doubling_alarm = false;            // early, from the advice series
  bool doubling_alarm_confirmed = false;  // doubling alarm on both series
  SeriesAssessment adv;
  SeriesAssessment disp;
  int window_first = 0;
  int window_last = 0;
};

/// Graded warning / alarm / confirmed alarm from the two observables over the
/// cfg.window_days days ending at as_of. Throws DataError when a series has
/// fewer than three positive-count days in the window.
AlarmReport monitor(const ObservationSeries& adv, const ObservationSeries& disp,
                    const AlarmConfig& cfg, int as_of);

}  // namespace epimon
