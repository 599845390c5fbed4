#include "epimon/alarm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "epimon/errors.hpp"
#include "epimon/segfit.hpp"
#include "epimon/spectral.hpp"
#include "epimon/stats.hpp"

namespace epimon {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Moments {
  double x_bar;
  double sxx;
};

Moments moments(std::span<const double> X) {
  const double n = static_cast<double>(X.size());
  const double x_bar = std::accumulate(X.begin(), X.end(), 0.0) / n;
  double sxx = 0.0;
  for (double x : X) sxx += (x - x_bar) * (x - x_bar);
  return {x_bar, sxx};
}

void check_regression_input(std::span<const double> X, std::span<const double> Z) {
  if (X.size() != Z.size()) throw PreconditionError("slope fit: X and Z differ in length");
  if (X.size() < 3) throw DataError("slope fit: at least three points required");
  if (std::all_of(X.begin(), X.end(), [&](double x) { return x == X.front(); }))
    throw DataError("slope fit: degenerate X (all days equal)");
}

}  // namespace

std::string to_string(SlopeModel model) {
  switch (model) {
    case SlopeModel::GaussOls: return "gauss-ols";
    case SlopeModel::LaplaceL1: return "laplace-l1";
    case SlopeModel::Combined: return "combined";
  }
  return "unknown";
}

std::string to_string(AlarmLevel level) {
  switch (level) {
    case AlarmLevel::None: return "none";
    case AlarmLevel::Warning: return "warning";
    case AlarmLevel::Alarm: return "alarm";
    case AlarmLevel::Confirmed: return "confirmed";
  }
  return "unknown";
}

void validate(const AlarmConfig& cfg) {
  if (!(cfg.theta_warn > 0.0 && cfg.theta_warn <= cfg.theta_alarm && cfg.theta_alarm < 1.0))
    throw PreconditionError("alarm config: need 0 < theta_warn <= theta_alarm < 1");
  if (cfg.window_days < 3) throw PreconditionError("alarm config: window_days must be >= 3");
  if (!(cfg.doubling_threshold_D > 0.0)) throw PreconditionError("alarm config: D must be > 0");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
    throw PreconditionError("alarm config: epsilon must lie in (0, 1)");
  if (cfg.model == SlopeModel::Combined)
    throw PreconditionError("alarm config: model must be gauss-ols or laplace-l1");
}

SlopeEstimate ols_fit(std::span<const double> X, std::span<const double> Z) {
  check_regression_input(X, Z);
  const auto [x_bar, sxx] = moments(X);
  const double n = static_cast<double>(X.size());
  const double z_bar = std::accumulate(Z.begin(), Z.end(), 0.0) / n;
  double sxz = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) sxz += (X[i] - x_bar) * (Z[i] - z_bar);
  SlopeEstimate est;
  est.model = SlopeModel::GaussOls;
  est.beta_hat = sxz / sxx;
  est.alpha_hat = z_bar - est.beta_hat * x_bar;
  double rss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double r = Z[i] - (est.alpha_hat + est.beta_hat * X[i]);
    rss += r * r;
  }
  est.n = static_cast<int>(X.size());
  est.df = est.n - 2;
  est.scale = std::sqrt(rss / est.df);
  est.x_bar = x_bar;
  est.sxx = sxx;
  est.V = rss / est.df / sxx;
  return est;
}

SlopeEstimate l1_fit(std::span<const double> X, std::span<const double> Z) {
  check_regression_input(X, Z);
  const auto line = fit_line_l1(X, Z);
  const auto [x_bar, sxx] = moments(X);
  SlopeEstimate est;
  est.model = SlopeModel::LaplaceL1;
  est.beta_hat = line.line.slope;
  est.alpha_hat = line.line.intercept;
  est.n = static_cast<int>(X.size());
  est.df = est.n - 2;
  est.scale = line.loss / est.n;
  est.x_bar = x_bar;
  est.sxx = sxx;
  est.V = est.scale * est.scale / sxx;
  return est;
}

SlopeEstimate fit_slope(std::span<const double> X, std::span<const double> Z, SlopeModel model) {
  switch (model) {
    case SlopeModel::GaussOls: return ols_fit(X, Z);
    case SlopeModel::LaplaceL1: return l1_fit(X, Z);
    case SlopeModel::Combined: break;
  }
  throw PreconditionError("fit_slope: combined is not a fitting model");
}

double pivot_quantile(const SlopeEstimate& est, double p) {
  if (est.model == SlopeModel::GaussOls) return stats::student_quantile(p, est.df);
  return stats::normal_quantile(p);
}

ConfidenceIntervals confidence_intervals(const SlopeEstimate& est, double epsilon,
                                         std::optional<double> forecast_day) {
  if (est.model != SlopeModel::GaussOls)
    throw PreconditionError("confidence_intervals: requires a gauss-ols estimate");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw PreconditionError("confidence_intervals: epsilon must lie in (0, 1)");
  const double n = est.n;
  const double q = stats::student_quantile(1.0 - epsilon / 2.0, est.df);
  ConfidenceIntervals ci;
  ci.quantile = q;
  const double a_half = est.scale * std::sqrt(1.0 / n + est.x_bar * est.x_bar / est.sxx) * q;
  const double b_half = est.scale * std::sqrt(1.0 / est.sxx) * q;
  ci.alpha = {est.alpha_hat - a_half, est.alpha_hat + a_half};
  ci.beta = {est.beta_hat - b_half, est.beta_hat + b_half};
  if (forecast_day) {
    const double x = *forecast_day;
    const double z_hat = est.alpha_hat + est.beta_hat * x;
    const double half =
        est.scale * std::sqrt(1.0 + 1.0 / n + (x - est.x_bar) * (x - est.x_bar) / est.sxx) * q;
    ci.forecast = Interval{z_hat - half, z_hat + half};
  }
  return ci;
}

std::vector<TrapezoidPoint> trapezoid_domain(const SlopeEstimate& est, double t_last, int horizon,
                                             double epsilon) {
  if (horizon < 0) throw PreconditionError("trapezoid_domain: horizon must be >= 0");
  if (est.model == SlopeModel::Combined)
    throw PreconditionError("trapezoid_domain: needs a single-series estimate");
  const double n = est.n;
  const double dx = t_last - est.x_bar;
  double q, noise_var, var_zn;
  if (est.model == SlopeModel::GaussOls) {
    q = stats::student_quantile(1.0 - epsilon / 2.0, est.df);
    noise_var = est.scale * est.scale;
    var_zn = noise_var * (1.0 / n + dx * dx / est.sxx);
  } else {
    // Laplace noise of scale lambda has variance 2 lambda^2; the fitted level
    // at the window centre has asymptotic variance lambda^2 / n.
    q = stats::normal_quantile(1.0 - epsilon / 2.0);
    noise_var = 2.0 * est.scale * est.scale;
    var_zn = est.scale * est.scale / n + est.V * dx * dx;
  }
  const double z_n = est.alpha_hat + est.beta_hat * t_last;
  const double band = std::sqrt(noise_var + var_zn);
  const double sd_beta = std::sqrt(est.V);
  std::vector<TrapezoidPoint> out;
  for (int k = 0; k <= horizon; ++k) {
    const double center = z_n + est.beta_hat * k;
    const double half = (sd_beta * k + band) * q;
    out.push_back({t_last + k, center, center - half, center + half});
  }
  return out;
}

double slope_positive_probability(const SlopeEstimate& est) {
  if (est.V <= 0.0) return est.beta_hat > 0.0 ? 1.0 : (est.beta_hat < 0.0 ? 0.0 : 0.5);
  const double pivot = est.beta_hat / std::sqrt(est.V);
  if (est.model == SlopeModel::GaussOls) return stats::student_cdf(pivot, est.df);
  return stats::normal_cdf(pivot);
}

double slope_quantile(const SlopeEstimate& est, double p) {
  if (est.V <= 0.0) return est.beta_hat;
  return est.beta_hat + pivot_quantile(est, p) * std::sqrt(est.V);
}

SlopeEstimate combine(std::span<const SlopeEstimate> estimates) {
  if (estimates.empty()) throw PreconditionError("combine: empty list");
  if (estimates.size() == 1) return estimates.front();
  const auto exact = std::count_if(estimates.begin(), estimates.end(),
                                   [](const SlopeEstimate& e) { return e.V <= 0.0; });
  if (exact == 1)
    return *std::find_if(estimates.begin(), estimates.end(),
                         [](const SlopeEstimate& e) { return e.V <= 0.0; });
  if (exact > 1) throw PreconditionError("combine: more than one zero-variance estimate");
  double weight_sum = 0.0;
  int n = 0;
  for (const auto& e : estimates) {
    weight_sum += 1.0 / e.V;
    n += e.n;
  }
  // Weighted mean written as offsets from the first estimate, which keeps the
  // rounding error proportional to the spread of the estimates.
  const double anchor = estimates.front().beta_hat;
  double offset = 0.0;
  for (const auto& e : estimates) offset += (1.0 / e.V) / weight_sum * (e.beta_hat - anchor);
  SlopeEstimate out;
  out.model = SlopeModel::Combined;
  out.beta_hat = anchor + offset;
  out.V = 1.0 / weight_sum;
  out.n = n;
  return out;
}

AlarmLevel alarm_level(double p_adv, double p_disp, const AlarmConfig& cfg) {
  if (p_adv < cfg.theta_warn) return AlarmLevel::None;
  if (p_adv < cfg.theta_alarm) return AlarmLevel::Warning;
  if (p_disp < cfg.theta_alarm) return AlarmLevel::Alarm;
  return AlarmLevel::Confirmed;
}

bool doubling_time_alarm(const SlopeEstimate& est, double D, double epsilon, CalibrationMode mode) {
  if (!(D > 0.0)) throw PreconditionError("doubling_time_alarm: D must be positive");
  const double threshold = std::numbers::ln2 / D;
  const double margin = est.V > 0.0 ? pivot_quantile(est, 1.0 - epsilon) * std::sqrt(est.V) : 0.0;
  if (mode == CalibrationMode::FalsePositive) return threshold < est.beta_hat - margin;
  return threshold < est.beta_hat + margin;
}

DoublingTimeIntervals delta_confidence(const SlopeEstimate& est, double epsilon) {
  const double margin = est.V > 0.0 ? pivot_quantile(est, 1.0 - epsilon) * std::sqrt(est.V) : 0.0;
  const double lower = est.beta_hat - margin;
  const double upper = est.beta_hat + margin;
  DoublingTimeIntervals out;
  out.upper_bound = {0.0, lower > 0.0 ? std::numbers::ln2 / lower : kInf};
  out.lower_bound = {upper > 0.0 ? std::numbers::ln2 / upper : kInf, kInf};
  return out;
}

namespace {

SeriesAssessment assess(const ObservationSeries& series, const AlarmConfig& cfg, int as_of) {
  ObservationSeries win{series.label, {}};
  for (const auto& p : series.points)
    if (p.day > as_of - cfg.window_days && p.day <= as_of) win.points.push_back(p);
  std::size_t positive = 0;
  for (const auto& p : win.points) positive += p.count > 0 ? 1 : 0;
  if (positive < 3)
    throw DataError("series '" + series.label + "' has " + std::to_string(positive) +
                    " positive-count days in the monitoring window (need 3)");
  SeriesAssessment a;
  a.window = log_transform(win);
  a.dropped_zero_days = a.window.dropped_zero_days;
  const auto X = a.window.days();
  const auto Z = a.window.values();
  a.estimate = fit_slope(X, Z, cfg.model);
  a.p_plus = slope_positive_probability(a.estimate);
  a.doubling_time = doubling_time(a.estimate.beta_hat);
  a.needle_warn = slope_quantile(a.estimate, cfg.theta_warn);
  a.needle_alarm = slope_quantile(a.estimate, cfg.theta_alarm);
  // "Odds at least one half": the pivot median is beta_hat.
  a.doubling_alarm = a.estimate.beta_hat >= std::numbers::ln2 / cfg.doubling_threshold_D;
  return a;
}

}  // namespace

AlarmReport monitor(const ObservationSeries& adv, const ObservationSeries& disp,
                    const AlarmConfig& cfg, int as_of) {
  validate(cfg);
  AlarmReport report;
  report.adv = assess(adv, cfg, as_of);
  report.disp = assess(disp, cfg, as_of);
  report.p_adv_plus = report.adv.p_plus;
  report.p_disp_plus = report.disp.p_plus;
  report.level = alarm_level(report.p_adv_plus, report.p_disp_plus, cfg);
  report.doubling_alarm = report.adv.doubling_alarm;
  report.doubling_alarm_confirmed = report.adv.doubling_alarm && report.disp.doubling_alarm;
  report.window_first = as_of - cfg.window_days + 1;
  report.window_last = as_of;
  return report;
}

}  // namespace epimon
