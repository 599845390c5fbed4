#include "epimon/segfit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epimon/errors.hpp"

namespace epimon {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tie_tolerance(double value) { return 1e-12 * (1.0 + std::abs(value)); }

void check_line_input(std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) throw PreconditionError("line fit: x and z differ in length");
  if (x.size() < 2) throw PreconditionError("line fit: at least two points required");
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); }))
    throw DataError("line fit: all abscissae identical");
}

// Sum of |r_i - median| and the optimal-intercept interval for residuals r.
struct MedianFit {
  double loss;
  double lo;
  double hi;
};

MedianFit median_fit(std::vector<double>& r) {
  const std::size_t m = r.size();
  const std::size_t upper = m / 2;
  std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(upper), r.end());
  const double hi = r[upper];
  double lo = hi;
  if (m % 2 == 0) lo = *std::max_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(upper));
  double loss = 0.0;
  for (double v : r) loss += std::abs(v - lo);
  return {loss, lo, hi};
}

double loss_at(std::span<const double> x, std::span<const double> z, LossKind kind,
               const std::function<double(double)>& f) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = z[i] - f(x[i]);
    loss += kind == LossKind::L1 ? std::abs(r) : r * r;
  }
  return loss;
}

}  // namespace

std::string to_string(LossKind kind) { return kind == LossKind::L1 ? "l1" : "l2"; }
std::string to_string(FitKind kind) {
  return kind == FitKind::DpSegments ? "dp-segments" : "min-of-lines";
}

double SegmentedFit::evaluate(double t) const {
  if (segments.empty()) throw PreconditionError("SegmentedFit: no segments");
  if (kind == FitKind::MinOfLines) {
    double v = kInf;
    for (const auto& l : segments) v = std::min(v, l(t));
    return v;
  }
  const auto idx = std::upper_bound(breakpoints.begin(), breakpoints.end(), t) - breakpoints.begin();
  return segments[static_cast<std::size_t>(idx)](t);
}

double fit_loss(const LogSeries& series, const SegmentedFit& fit) {
  const auto x = series.days();
  const auto z = series.values();
  return loss_at(x, z, fit.loss_kind, [&](double t) { return fit.evaluate(t); });
}

LineFit fit_line_l1(std::span<const double> x, std::span<const double> z) {
  check_line_input(x, z);
  const std::size_t m = x.size();

  // Every kink of the profile loss g(beta) = min_alpha sum|z - beta x - alpha|
  // is a slope through two data points; g is convex, so its minimum sits on
  // one of them.
  std::vector<double> slopes;
  slopes.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (x[i] != x[j]) slopes.push_back((z[j] - z[i]) / (x[j] - x[i]));
  std::sort(slopes.begin(), slopes.end());
  slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());

  std::vector<double> r(m);
  auto profile = [&](double beta) {
    for (std::size_t i = 0; i < m; ++i) r[i] = z[i] - beta * x[i];
    return median_fit(r);
  };
  auto g = [&](std::size_t k) { return profile(slopes[k]).loss; };

  // First k with g(k+1) >= g(k).
  std::size_t lo = 0, hi = slopes.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (g(mid + 1) >= g(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  const double best = g(lo);
  const double tol = 1e-11 * (1.0 + best);
  std::size_t left = lo, right = lo;
  while (left > 0 && g(left - 1) <= best + tol) --left;
  while (right + 1 < slopes.size() && g(right + 1) <= best + tol) ++right;

  const double beta = std::clamp(0.0, slopes[left], slopes[right]);
  const auto mf = profile(beta);
  const double alpha = 0.5 * (mf.lo + mf.hi);
  LineFit out{{beta, alpha}, 0.0};
  for (std::size_t i = 0; i < m; ++i) out.loss += std::abs(z[i] - out.line(x[i]));
  return out;
}

LineFit fit_line_l2(std::span<const double> x, std::span<const double> z) {
  check_line_input(x, z);
  const double n = static_cast<double>(x.size());
  const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double zbar = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double sxx = 0.0, sxz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxz += (x[i] - xbar) * (z[i] - zbar);
  }
  const double beta = sxz / sxx;
  LineFit out{{beta, zbar - beta * xbar}, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = z[i] - out.line(x[i]);
    out.loss += r * r;
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> z, LossKind kind) {
  return kind == LossKind::L1 ? fit_line_l1(x, z) : fit_line_l2(x, z);
}

SegmentedFit fit_segmented_dp(const LogSeries& series, int nu, LossKind loss_kind) {
  if (nu < 1) throw PreconditionError("fit_segmented_dp: nu must be >= 1");
  const std::size_t n = series.size();
  if (n < 2 * static_cast<std::size_t>(nu))
    throw DataError("fit_segmented_dp: need at least " + std::to_string(2 * nu) +
                    " points, have " + std::to_string(n));
  const auto x = series.days();
  const auto z = series.values();

  // cost[i][j]: best single-line loss over points i..j (j - i >= 1).
  std::vector<std::vector<LineFit>> cost(n, std::vector<LineFit>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      cost[i][j] = fit_line(std::span(x).subspan(i, j - i + 1), std::span(z).subspan(i, j - i + 1),
                            loss_kind);

  const auto S = static_cast<std::size_t>(nu);
  std::vector<std::vector<double>> dp(S + 1, std::vector<double>(n, kInf));
  std::vector<std::vector<std::size_t>> start(S + 1, std::vector<std::size_t>(n, 0));
  for (std::size_t j = 1; j < n; ++j) dp[1][j] = cost[0][j].loss;
  for (std::size_t s = 2; s <= S; ++s) {
    for (std::size_t j = 2 * s - 1; j < n; ++j) {
      double best = kInf;
      std::size_t arg = 0;
      for (std::size_t i = 2 * (s - 1); i + 1 <= j; ++i) {
        if (dp[s - 1][i - 1] == kInf) continue;
        const double cand = dp[s - 1][i - 1] + cost[i][j].loss;
        if (best == kInf || cand < best - tie_tolerance(best)) {
          best = cand;
          arg = i;
        }
      }
      dp[s][j] = best;
      start[s][j] = arg;
    }
  }

  std::size_t used = 1;
  for (std::size_t s = 2; s <= S; ++s)
    if (dp[s][n - 1] < dp[used][n - 1] - tie_tolerance(dp[used][n - 1])) used = s;

  std::vector<std::size_t> starts(used, 0);
  std::size_t j = n - 1;
  for (std::size_t s = used; s >= 2; --s) {
    starts[s - 1] = start[s][j];
    j = start[s][j] - 1;
  }
  SegmentedFit fit;
  fit.kind = FitKind::DpSegments;
  fit.loss_kind = loss_kind;
  fit.span_first = x.front();
  fit.span_last = x.back();
  fit.loss = dp[used][n - 1];
  for (std::size_t s = 0; s < used; ++s) {
    const std::size_t first = starts[s];
    const std::size_t last = s + 1 < used ? starts[s + 1] - 1 : n - 1;
    fit.segments.push_back(cost[first][last].line);
    if (s > 0) fit.breakpoints.push_back(x[first]);
  }
  return fit;
}

namespace {

struct Envelope {
  std::vector<Line> lines;  // visit order: slopes decreasing in t
  std::vector<double> breakpoints;
};

Envelope lower_envelope(std::span<const Line> input, double span_first, double span_last) {
  std::vector<Line> L(input.begin(), input.end());
  std::sort(L.begin(), L.end(), [](const Line& a, const Line& b) {
    return a.slope < b.slope || (a.slope == b.slope && a.intercept < b.intercept);
  });
  L.erase(std::unique(L.begin(), L.end(),
                      [](const Line& a, const Line& b) { return a.slope == b.slope; }),
          L.end());
  Envelope env;
  if (L.empty()) return env;

  std::size_t cur = L.size() - 1;
  if (std::isfinite(span_first)) {
    double best = kInf;
    for (std::size_t k = 0; k < L.size(); ++k) {
      const double v = L[k](span_first);
      if (v < best) {  // ascending slopes: first minimiser has the smallest slope
        best = v;
        cur = k;
      }
    }
  }
  double t = span_first;
  env.lines.push_back(L[cur]);
  while (true) {
    double next_t = kInf;
    std::size_t next = L.size();
    for (std::size_t k = 0; k < cur; ++k) {
      double tk = (L[k].intercept - L[cur].intercept) / (L[cur].slope - L[k].slope);
      tk = std::max(tk, t);
      if (tk < next_t) {
        next_t = tk;
        next = k;
      }
    }
    if (next == L.size() || next_t >= span_last) break;
    env.lines.push_back(L[next]);
    env.breakpoints.push_back(next_t);
    cur = next;
    t = next_t;
  }
  return env;
}

}  // namespace

std::vector<Line> concave_envelope_init(std::span<const Line> lines, double span_first,
                                        double span_last) {
  auto env = lower_envelope(lines, span_first, span_last);
  std::reverse(env.lines.begin(), env.lines.end());
  return env.lines;
}

std::vector<double> envelope_breakpoints(std::span<const Line> lines, double span_first,
                                         double span_last) {
  auto env = lower_envelope(lines, span_first, span_last);
  std::vector<double> out;
  for (double b : env.breakpoints)
    if (b > span_first && b < span_last) out.push_back(b);
  return out;
}

SegmentedFit fit_minlines_local(const LogSeries& series, std::span<const Line> init,
                                LossKind loss_kind, const NelderMeadOptions& options) {
  if (init.empty()) throw PreconditionError("fit_minlines_local: no initial lines");
  if (series.size() < 2) throw DataError("fit_minlines_local: need at least two points");
  const auto x = series.days();
  const auto z = series.values();
  const std::size_t nu = init.size();

  // Lines are parametrised by slope and value at the mean day, which
  // decouples the two coordinates for the simplex.
  const double tc = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const auto [zmin, zmax] = std::minmax_element(z.begin(), z.end());
  const double zr = std::max(*zmax - *zmin, 1e-3);
  const double tr = std::max(x.back() - x.front(), 1.0);

  auto decode = [&](std::span<const double> theta) {
    std::vector<Line> lines(nu);
    for (std::size_t j = 0; j < nu; ++j)
      lines[j] = {theta[2 * j], theta[2 * j + 1] - theta[2 * j] * tc};
    return lines;
  };
  auto objective = [&](std::span<const double> theta) {
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double v = kInf;
      for (std::size_t j = 0; j < nu; ++j)
        v = std::min(v, theta[2 * j + 1] + theta[2 * j] * (x[i] - tc));
      const double r = z[i] - v;
      loss += loss_kind == LossKind::L1 ? std::abs(r) : r * r;
    }
    return loss;
  };

  std::vector<double> theta(2 * nu), step(2 * nu);
  for (std::size_t j = 0; j < nu; ++j) {
    theta[2 * j] = init[j].slope;
    theta[2 * j + 1] = init[j](tc);
    step[2 * j] = 0.1 * zr / tr;
    step[2 * j + 1] = 0.1 * zr;
  }
  auto result = nelder_mead(objective, theta, step, options);
  // Restart from the incumbent while it keeps improving.
  for (int restart = 0; restart < 8; ++restart) {
    auto again = nelder_mead(objective, result.x, step, options);
    const bool improved = again.value < result.value - tie_tolerance(result.value);
    if (again.value <= result.value) result = std::move(again);
    if (!improved) break;
  }

  auto lines = objective(result.x) <= objective(theta) ? decode(result.x) : decode(theta);
  std::stable_sort(lines.begin(), lines.end(),
                   [](const Line& a, const Line& b) { return a.slope < b.slope; });
  SegmentedFit fit;
  fit.kind = FitKind::MinOfLines;
  fit.loss_kind = loss_kind;
  fit.segments = std::move(lines);
  fit.span_first = x.front();
  fit.span_last = x.back();
  fit.breakpoints = envelope_breakpoints(fit.segments, fit.span_first, fit.span_last);
  fit.loss = fit_loss(series, fit);
  return fit;
}

SegmentedFit fit_minlines(const LogSeries& series, int nu, LossKind loss_kind,
                          const NelderMeadOptions& options) {
  const auto dp = fit_segmented_dp(series, nu, loss_kind);
  const auto init = concave_envelope_init(dp.segments, dp.span_first, dp.span_last);
  return fit_minlines_local(series, init, loss_kind, options);
}

TropicalCheck tropical_check(const LogSeries& y, const std::function<double(double)>& profile,
                             double delta, double tolerance) {
  if (y.points.empty()) throw PreconditionError("tropical_check: empty series");
  double hi = -kInf, lo = kInf;
  for (const auto& p : y.points) {
    const double r = p.z - profile(p.day);
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  TropicalCheck out;
  out.offset = 0.5 * (hi + lo);
  out.sup_deviation = 0.5 * (hi - lo);
  out.pass = out.sup_deviation <= 0.5 * delta + tolerance;
  return out;
}

TropicalCheck tropical_check(const LogSeries& y, const SegmentedFit& fit, double delta,
                             double tolerance) {
  return tropical_check(y, [&](double t) { return fit.evaluate(t); }, delta, tolerance);
}

std::function<double(double)> tropical_profile(std::vector<double> slopes,
                                               std::vector<double> switch_times, double start) {
  if (slopes.size() != switch_times.size() + 1)
    throw PreconditionError("tropical_profile: need one more slope than switch times");
  return [slopes = std::move(slopes), switches = std::move(switch_times), start](double t) {
    double y = 0.0;
    double from = start;
    for (std::size_t j = 0; j < switches.size(); ++j) {
      if (t < switches[j]) return y + slopes[j] * (t - from);
      y += slopes[j] * (switches[j] - from);
      from = switches[j];
    }
    return y + slopes.back() * (t - from);
  };
}

}  // namespace epimon
