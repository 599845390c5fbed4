// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "epimon/alarm.hpp"
#include "epimon/pde.hpp"
#include "epimon/scenario.hpp"
#include "epimon/segfit.hpp"
#include "epimon/series.hpp"
#include "epimon/spectral.hpp"
#include "epimon/stats.hpp"
#include "oracles.hpp"

using namespace epimon;

namespace {

const std::string kData = EPIMON_DATA_DIR;
const Epoch kFixtureEpoch{2020, 3, 1};

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <class... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ModelParams closed_form(double mu) {
  return ModelParams::constant(0.05, 3.0, 7.0, 0.0, 0.0, 1.0, {{0.0, mu}});
}

// Independent Hilbert distance: max - min of the log ratios.
double hilbert(const std::vector<double>& v, const std::vector<double>& w) {
  double hi = -std::numeric_limits<double>::infinity(), lo = -hi;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double r = std::log(v[k] / w[k]);
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  return hi - lo;
}

Outcome eigenvalue_identity() {
  const double l0 = perron_eigenvalue(closed_form(1.0 / 7.0), 1.0 / 7.0);
  double worst = 0.0;
  for (double mu : {2.0 / 7.0, 1.0 / 14.0})
    worst = std::max(worst, std::abs(perron_eigenvalue(closed_form(mu), mu) -
                                     oracle::closed_form_lambda(mu, 3.0, 7.0)));
  return {std::abs(l0) <= 1e-8 && worst <= 1e-8,
          fmt("lambda(1/7)=%.2e, max |lambda - root| = %.2e (tol 1e-8)", l0, worst)};
}

Outcome growth_rate() {
  const auto p = ModelParams::sampled(
      0.05, 4.0, 10.0, [](double x) { return 0.1 + 0.05 * x; }, [](double x) { return 0.02 * x; },
      [](double x) { return x < 5.0 ? std::exp(-0.3 * x) : 0.1; }, {{0.0, 0.4}});
  auto init = DensityState::zeros(p);
  for (auto& v : init.n_I) v = 1.0;
  const auto traj = simulate(p, init, ObservableKernel::total_infectious(p), {120.0, 0.05, false});
  std::vector<double> x, z;
  for (int d = 80; d <= 120; ++d) {
    x.push_back(d);
    z.push_back(std::log(traj.points[static_cast<std::size_t>(d)].Y));
  }
  const double slope = oracle::ols(x, z).slope;
  const double lambda = perron_eigenvalue(p, 0.4);
  const double rel = std::abs(slope - lambda) / std::abs(lambda);
  return {rel <= 0.02, fmt("OLS slope %.6f vs lambda %.6f, rel err %.2e (tol 2e-2)", slope, lambda, rel)};
}

Outcome tropical_bound() {
  const auto sc = read_scenario_file(kData + "/three_phase.json");
  const auto traj = simulate(sc.params, sc.init, sc.kernel, sc.options);
  std::vector<EigenSolution> eig;
  std::vector<double> slopes, switches;
  for (const auto& phase : sc.params.mu_schedule) {
    eig.push_back(perron_solution(sc.params, phase.mu));
    slopes.push_back(eig.back().lambda);
    if (phase.start > 0.0) switches.push_back(phase.start);
  }
  std::vector<double> v0 = sc.init.n_E;
  v0.insert(v0.end(), sc.init.n_I.begin(), sc.init.n_I.end());
  const double delta = tropical_bound_delta(v0, eig).delta;
  // Profile with the spectral slopes; gamma optimised as the midrange of the residuals.
  const auto profile = tropical_profile(slopes, switches);
  double hi = -std::numeric_limits<double>::infinity(), lo = -hi;
  for (const auto& pt : traj.points) {
    const double r = std::log(pt.Y) - profile(pt.t);
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  const double sup = 0.5 * (hi - lo);
  return {sup <= delta / 2.0 + 1e-6,
          fmt("sup deviation %.4f <= Delta/2 = %.4f (3 phases, slopes %.4f %.4f %.4f)", sup, delta / 2.0,
              slopes[0], slopes[1], slopes[2])};
}

Outcome prop3(oracle::Gen& g) {
  double worst_slack = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (int k = 0; k < 10; ++k) {
    const double m1 = g.uniform(0.05, 1.0), m2 = g.uniform(0.05, 1.0);
    const auto e1 = perron_solution(closed_form(m1), m1);
    const auto e2 = perron_solution(closed_form(m2), m2);
    const double d = hilbert(e1.concatenated(), e2.concatenated());
    const double bound = std::abs(e1.lambda - e2.lambda) * (3.0 + 7.0);
    ok = ok && d <= bound + 1e-6;
    worst_slack = std::min(worst_slack, bound - d);
  }
  return {ok, fmt("10 pairs, min (bound - d_H) = %.3e (tol -1e-6)", worst_slack)};
}

Outcome dp_optimality(oracle::Gen& g) {
  int agree = 0;
  double worst = 0.0;
  for (int r = 0; r < 200; ++r) {
    const int nu = g.integer(1, 3);
    const int n = g.integer(2 * nu, 14);
    LogSeries s{"z", {}, 0};
    for (int k = 0; k < n; ++k) s.points.push_back({k, g.uniform(-2.0, 2.0)});
    const bool l1 = r % 2 == 0;
    const double dp = fit_segmented_dp(s, nu, l1 ? LossKind::L1 : LossKind::L2).loss;
    const double brute = oracle::partition_loss(s.days(), s.values(), nu, l1);
    const double rel = std::abs(dp - brute) / (1.0 + brute);
    worst = std::max(worst, rel);
    agree += rel <= 1e-12;
  }
  return {agree == 200, fmt("%d/200 agree, worst rel gap %.2e (tol 1e-12, rounding only)", agree, worst)};
}

Outcome coverage(oracle::Gen& g) {
  std::vector<double> X(10), Z(10);
  std::iota(X.begin(), X.end(), 0.0);
  int covered = 0;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    for (int i = 0; i < 10; ++i) Z[i] = 1.5 - 0.04 * X[i] + 0.3 * g.normal();
    const auto ci = confidence_intervals(ols_fit(X, Z), 0.05);
    covered += ci.beta.lo <= -0.04 && -0.04 <= ci.beta.hi;
  }
  const double c = static_cast<double>(covered) / reps;
  return {c >= 0.93 && c <= 0.97, fmt("coverage %.4f in [0.93, 0.97] over %d reps", c, reps)};
}

Outcome combination() {
  SlopeEstimate a, b;
  a.model = b.model = SlopeModel::GaussOls;
  a.beta_hat = 0.1;
  a.V = 1.0;
  b.beta_hat = 0.3;
  b.V = 3.0;
  const std::vector<SlopeEstimate> both{a, b};
  const auto c = combine(both);
  double best_w = 0.0, best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 1000; ++k) {
    const double w = k / 1000.0;
    const double var = w * w * a.V + (1.0 - w) * (1.0 - w) * b.V;
    if (var < best) {
      best = var;
      best_w = w;
    }
  }
  const double w_iv = (1.0 / a.V) / (1.0 / a.V + 1.0 / b.V);
  const bool exact = c.beta_hat == 0.15 && c.V == 0.75;
  return {exact && std::abs(best_w - w_iv) <= 1e-3,
          fmt("combined (%.15g, %.15g), bitwise equal to (0.15, 0.75): %s; grid argmin w=%.3f vs %.3f (tol 1e-3)",
              c.beta_hat, c.V, exact ? "yes" : "no", best_w, w_iv)};
}

Outcome quantiles() {
  const double q1 = stats::student_quantile(0.975, 5), q2 = stats::student_quantile(0.95, 5);
  return {std::abs(q1 - 2.571) <= 5e-4 && std::abs(q2 - 2.015) <= 5e-4,
          fmt("t(0.975,5)=%.6f, t(0.95,5)=%.6f (tol 5e-4)", q1, q2)};
}

Outcome alarm_sequencing() {
  const AlarmConfig cfg;
  const auto adv = read_csv_file(kData + "/resurgence_adv.csv", kFixtureEpoch);
  const auto disp = read_csv_file(kData + "/resurgence_disp.csv", kFixtureEpoch);
  int first[4] = {-1, -1, -1, -1};
  int last = std::min(adv.last_day(), disp.last_day());
  std::vector<int> levels;
  for (int d = adv.first_day() + cfg.window_days - 1; d <= last; ++d) {
    const int l = static_cast<int>(monitor(adv, disp, cfg, d).level);
    if (first[l] < 0) first[l] = d;
  }
  const bool ordered = first[0] >= 0 && first[0] < first[1] && first[1] < first[2] && first[2] < first[3];
  const auto dadv = read_csv_file(kData + "/decaying_adv.csv", kFixtureEpoch);
  const auto ddisp = read_csv_file(kData + "/decaying_disp.csv", kFixtureEpoch);
  int loud = 0;
  for (int d = dadv.first_day() + cfg.window_days - 1; d <= std::min(dadv.last_day(), ddisp.last_day()); ++d)
    loud += monitor(dadv, ddisp, cfg, d).level != AlarmLevel::None;
  auto date = [](int d) { return d < 0 ? std::string("never") : format_date(d, kFixtureEpoch); };
  return {ordered && loud == 0,
          fmt("first none %s, warning %s, alarm %s, confirmed %s; decaying days above none: %d",
              date(first[0]).c_str(), date(first[1]).c_str(), date(first[2]).c_str(), date(first[3]).c_str(),
              loud)};
}

Outcome equivariance() {
  const AlarmConfig cfg;
  const auto adv = read_csv_file(kData + "/resurgence_adv.csv", kFixtureEpoch);
  const auto disp = read_csv_file(kData + "/resurgence_disp.csv", kFixtureEpoch);
  double beta_gap = 0.0, p_gap = 0.0;
  bool levels = true;
  for (long long c : {2LL, 10LL, 977LL}) {
    auto a = adv, b = disp;
    for (auto& p : a.points) p.count *= c;
    for (auto& p : b.points) p.count *= c;
    for (int d = 20; d <= adv.last_day(); d += 3) {
      const auto r0 = monitor(adv, disp, cfg, d), r1 = monitor(a, b, cfg, d);
      beta_gap = std::max({beta_gap, std::abs(r0.adv.estimate.beta_hat - r1.adv.estimate.beta_hat),
                           std::abs(r0.disp.estimate.beta_hat - r1.disp.estimate.beta_hat)});
      p_gap = std::max({p_gap, std::abs(r0.p_adv_plus - r1.p_adv_plus), std::abs(r0.p_disp_plus - r1.p_disp_plus)});
      levels = levels && r0.level == r1.level;
    }
  }
  const auto two = read_csv_file(kData + "/two_phase.csv", kFixtureEpoch);
  double slope_gap = 0.0;
  bool breaks_same = true, breaks_shifted = true;
  for (auto kind : {LossKind::L1, LossKind::L2}) {
    const auto base = fit_segmented_dp(log_transform(two), 2, kind);
    auto scaled = two;
    for (auto& p : scaled.points) p.count *= 37;
    const auto fs = fit_segmented_dp(log_transform(scaled), 2, kind);
    for (std::size_t k = 0; k < base.segments.size(); ++k)
      slope_gap = std::max(slope_gap, std::abs(base.segments[k].slope - fs.segments[k].slope));
    breaks_same = breaks_same && fs.breakpoints == base.breakpoints;
    auto later = two;
    for (auto& p : later.points) p.day += 23;
    const auto ft = fit_segmented_dp(log_transform(later), 2, kind);
    breaks_shifted = breaks_shifted && ft.breakpoints.size() == base.breakpoints.size();
    for (std::size_t k = 0; breaks_shifted && k < base.breakpoints.size(); ++k)
      breaks_shifted = ft.breakpoints[k] == base.breakpoints[k] + 23;
  }
  const bool ok = beta_gap <= 1e-12 && p_gap <= 1e-9 && levels && slope_gap <= 1e-12 && breaks_same &&
                  breaks_shifted;
  return {ok, fmt("max |d beta| %.1e (tol 1e-12), |d p+| %.1e, levels %s, |d slope| %.1e, breakpoints %s/%s",
                  beta_gap, p_gap, levels ? "same" : "DIFFER", slope_gap, breaks_same ? "same" : "DIFFER",
                  breaks_shifted ? "shifted" : "NOT shifted")};
}

Outcome conservation() {
  auto sc = read_scenario_file(kData + "/nonlinear.json");
  sc.options.horizon = 60.0;
  const auto traj = simulate(sc.params, sc.init, sc.kernel, sc.options);
  const double N0 = traj.points.front().state.N();
  double drift = 0.0;
  for (const auto& p : traj.points) drift = std::max(drift, std::abs(p.state.N() - N0) / N0);
  const double tol = 5.0 * (sc.params.h + sc.options.dt);
  return {drift <= tol, fmt("max relative drift %.3e <= 5(h+dt) = %.3f", drift, tol)};
}

}  // namespace

int main() {
  oracle::Gen g(20200317);
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "eigenvalue identity", 1.0, eigenvalue_identity},
      {2, "growth-rate consistency", 10.0, growth_rate},
      {3, "tropical bound", 30.0, tropical_bound},
      {4, "eigenvector distance bound", 5.0, [&] { return prop3(g); }},
      {5, "DP optimality", 30.0, [&] { return dp_optimality(g); }},
      {6, "CI coverage", 30.0, [&] { return coverage(g); }},
      {7, "combination", 0.0, combination},
      {8, "quantiles", 0.0, quantiles},
      {9, "alarm sequencing", 5.0, alarm_sequencing},
      {10, "equivariance", 0.0, equivariance},
      {11, "nonlinear conservation", 0.0, conservation},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::string timing = fmt("%.3f s", secs);
    if (c.limit_s > 0.0) timing += fmt(" < %.0f s", c.limit_s);
    if (!in_time) timing += " TOO SLOW";
    std::printf("%s %2d %-28s %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
