#include "epimon/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include <boost/math/tools/roots.hpp>

#include "epimon/alarm.hpp"
#include "epimon/fixtures.hpp"
#include "epimon/pde.hpp"
#include "epimon/segfit.hpp"
#include "epimon/spectral.hpp"
#include "epimon/stats.hpp"

namespace epimon::validation {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Suite {
  std::string name;
  std::vector<CheckResult>* out;
  void check(const std::string& what, bool pass, const std::string& detail) {
    out->push_back({name, what, pass, detail});
  }
};

ModelParams closed_form(double mu) {
  return ModelParams::constant(0.05, 3.0, 7.0, 0.0, 0.0, 1.0, {{0.0, mu}});
}

// mu e^{-3 l} (1 - e^{-7 l}) / l = 1, bracketed and solved by TOMS 748.
double closed_form_root(double mu) {
  auto f = [mu](double l) {
    const double g = std::abs(l) < 1e-12 ? 7.0 : std::exp(-3.0 * l) * -std::expm1(-7.0 * l) / l;
    return std::log(mu) + std::log(g);
  };
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, -3.0, 3.0, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

void spectral_suite(Suite s, Rng& rng) {
  const double l0 = perron_eigenvalue(closed_form(1.0 / 7.0), 1.0 / 7.0);
  s.check("critical control has zero growth", std::abs(l0) <= 1e-8, "lambda=" + num(l0));
  double worst = 0.0;
  for (double mu : {2.0 / 7.0, 1.0 / 14.0, 0.05, 0.5}) {
    worst = std::max(worst, std::abs(perron_eigenvalue(closed_form(mu), mu) - closed_form_root(mu)));
  }
  s.check("closed-form root agreement", worst <= 1e-8, "max |diff|=" + num(worst));

  bool monotone = true;
  double prev = -1e300;
  for (double mu = 0.05; mu < 1.0; mu += 0.05) {
    const double l = perron_eigenvalue(closed_form(mu), mu);
    monotone = monotone && l > prev;
    prev = l;
  }
  s.check("lambda increasing in mu", monotone, "");

  double slack = 1e300;
  for (int k = 0; k < 10; ++k) {
    const double m1 = 0.05 + 0.6 * rng.uniform();
    const double m2 = 0.05 + 0.6 * rng.uniform();
    const auto p = closed_form(m1);
    const auto e1 = perron_solution(p, m1);
    const auto e2 = perron_solution(p, m2);
    const double d = hilbert_distance(e1.concatenated(), e2.concatenated());
    slack = std::min(slack, eigenvector_distance_bound(p, e1.lambda, e2.lambda) + 1e-6 - d);
  }
  s.check("eigenvector distance bound", slack >= 0.0, "min slack=" + num(slack));

  // One-dimensional model: every positive vector is proportional to every other.
  const std::vector<double> a{2.0}, b{7.0};
  s.check("hilbert distance vanishes in one dimension", hilbert_distance(a, b) == 0.0, "");
}

DensityState random_state(const ModelParams& p, Rng& rng) {
  auto st = DensityState::zeros(p, 1000.0);
  for (auto& v : st.n_E) v = 10.0 * rng.uniform();
  for (auto& v : st.n_I) v = 10.0 * rng.uniform();
  return st;
}

void pde_suite(Suite s, Rng& rng) {
  const auto p = ModelParams::constant(0.1, 2.0, 5.0, 0.3, 0.2, 0.8, {{0.0, 0.4}});
  const auto a = random_state(p, rng);
  const auto b = random_state(p, rng);
  const double wa = 0.7, wb = 2.5;
  auto mix = a;
  for (std::size_t k = 0; k < mix.n_E.size(); ++k) mix.n_E[k] = wa * a.n_E[k] + wb * b.n_E[k];
  for (std::size_t k = 0; k < mix.n_I.size(); ++k) mix.n_I[k] = wa * a.n_I[k] + wb * b.n_I[k];
  const auto sa = step_linear(a, p, 0.1), sb = step_linear(b, p, 0.1), sm = step_linear(mix, p, 0.1);
  double err = 0.0;
  for (std::size_t k = 0; k < sm.n_I.size(); ++k)
    err = std::max(err, std::abs(sm.n_I[k] - (wa * sa.n_I[k] + wb * sb.n_I[k])));
  for (std::size_t k = 0; k < sm.n_E.size(); ++k)
    err = std::max(err, std::abs(sm.n_E[k] - (wa * sa.n_E[k] + wb * sb.n_E[k])));
  s.check("linearity of the linear step", err <= 1e-10, "max err=" + num(err));

  auto big = a;
  for (std::size_t k = 0; k < big.n_E.size(); ++k) big.n_E[k] += b.n_E[k];
  for (std::size_t k = 0; k < big.n_I.size(); ++k) big.n_I[k] += b.n_I[k];
  const auto sbig = step_linear(big, p, 0.1);
  bool ordered = true, nonneg = true;
  for (std::size_t k = 0; k < sa.n_I.size(); ++k) ordered = ordered && sa.n_I[k] <= sbig.n_I[k];
  for (std::size_t k = 0; k < sa.n_E.size(); ++k) ordered = ordered && sa.n_E[k] <= sbig.n_E[k];
  for (double v : sa.n_E) nonneg = nonneg && v >= 0.0;
  for (double v : sa.n_I) nonneg = nonneg && v >= 0.0;
  s.check("order preservation", ordered, "");
  s.check("nonnegativity", nonneg, "");

  const auto np = ModelParams::constant(0.05, 3.0, 7.0, 0.3, 0.15, 1.0, {{0.0, 0.4}});
  auto init = DensityState::zeros(np, 1e6);
  for (auto& v : init.n_I) v = 10.0;
  const auto traj = simulate(np, init, ObservableKernel::total_infectious(np), {60.0, 0.05, true});
  const double N0 = traj.points.front().state.N();
  double drift = 0.0;
  for (const auto& pt : traj.points) drift = std::max(drift, std::abs(pt.state.N() - N0) / N0);
  s.check("nonlinear conservation of N", drift <= 5.0 * (0.05 + 0.05), "drift=" + num(drift));
}

double brute_force_l1(const std::vector<double>& x, const std::vector<double>& z) {
  double best = 1e300;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double b = (z[j] - z[i]) / (x[j] - x[i]);
      const double a = z[i] - b * x[i];
      double loss = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) loss += std::abs(z[k] - a - b * x[k]);
      best = std::min(best, loss);
    }
  return best;
}

// Best loss over all partitions into at most nu runs of length >= 2.
double brute_force_partition(const LogSeries& s, int nu, LossKind kind) {
  const auto x = s.days();
  const auto z = s.values();
  const int n = static_cast<int>(x.size());
  double best = 1e300;
  std::function<void(int, int, double)> rec = [&](int start, int left, double acc) {
    if (start == n) {
      best = std::min(best, acc);
      return;
    }
    if (left == 0) return;
    for (int end = start + 2; end <= n; ++end) {
      std::vector<double> xs(x.begin() + start, x.begin() + end), zs(z.begin() + start, z.begin() + end);
      rec(end, left - 1, acc + fit_line(xs, zs, kind).loss);
    }
  };
  rec(0, nu, 0.0);
  return best;
}

LogSeries random_log_series(Rng& rng, int n) {
  LogSeries s{"random", {}, 0};
  for (int i = 0; i < n; ++i) s.points.push_back({i, 3.0 + rng.normal()});
  return s;
}

void segfit_suite(Suite s, Rng& rng) {
  double worst_line = 0.0, worst_dp = 0.0;
  bool monotone = true;
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 6 + static_cast<int>(rng.uniform() * 8);
    const auto series = random_log_series(rng, n);
    const auto x = series.days();
    const auto z = series.values();
    worst_line = std::max(worst_line, std::abs(fit_line_l1(x, z).loss - brute_force_l1(x, z)));
    for (auto kind : {LossKind::L1, LossKind::L2}) {
      double prev = 1e300;
      for (int nu = 1; nu <= 3 && 2 * nu <= n; ++nu) {
        const double l = fit_segmented_dp(series, nu, kind).loss;
        worst_dp = std::max(worst_dp, std::abs(l - brute_force_partition(series, nu, kind)));
        monotone = monotone && l <= prev + 1e-12;
        prev = l;
      }
    }
  }
  s.check("l1 line matches pair enumeration", worst_line <= 1e-9, "max diff=" + num(worst_line));
  s.check("dp matches partition enumeration", worst_dp <= 1e-9, "max diff=" + num(worst_dp));
  s.check("loss nonincreasing in nu", monotone, "");

  const auto base = log_transform(two_phase_fixture());
  const auto fit = fit_segmented_dp(base, 2, LossKind::L1);
  auto shifted = base;
  for (auto& p : shifted.points) p.day += 17;
  auto scaled = base;
  for (auto& p : scaled.points) p.z += std::log(3.7);
  const auto fs = fit_segmented_dp(shifted, 2, LossKind::L1);
  const auto fc = fit_segmented_dp(scaled, 2, LossKind::L1);
  bool shift_ok = fs.breakpoints.size() == fit.breakpoints.size();
  for (std::size_t k = 0; shift_ok && k < fit.breakpoints.size(); ++k)
    shift_ok = fs.breakpoints[k] == fit.breakpoints[k] + 17;
  double slope_diff = 0.0;
  for (std::size_t k = 0; k < fit.segments.size(); ++k)
    slope_diff = std::max(slope_diff, std::abs(fc.segments[k].slope - fit.segments[k].slope));
  s.check("time shift translates breakpoints", shift_ok, "");
  s.check("count rescaling keeps slopes and breakpoints",
          slope_diff <= 1e-12 && fc.breakpoints == fit.breakpoints, "max slope diff=" + num(slope_diff));

  auto outlier = base;
  outlier.points[5].z += 6.0;
  const auto fo = fit_segmented_dp(outlier, 2, LossKind::L1);
  s.check("l1 fit ignores a single outlier", fo.breakpoints == fit.breakpoints, "");
}

void alarm_suite(Suite s, Rng& rng) {
  s.check("student quantile constants",
          std::abs(stats::student_quantile(0.975, 5) - 2.571) <= 5e-4 &&
              std::abs(stats::student_quantile(0.95, 5) - 2.015) <= 5e-4,
          "q975=" + num(stats::student_quantile(0.975, 5)));

  const int reps = 2000;
  int covered = 0;
  std::vector<double> X(10), Z(10);
  std::iota(X.begin(), X.end(), 0.0);
  for (int r = 0; r < reps; ++r) {
    for (int i = 0; i < 10; ++i) Z[i] = 1.0 + 0.05 * X[i] + 0.3 * rng.normal();
    const auto ci = confidence_intervals(ols_fit(X, Z), 0.05);
    covered += ci.beta.lo <= 0.05 && 0.05 <= ci.beta.hi;
  }
  const double cov = static_cast<double>(covered) / reps;
  s.check("gaussian slope interval coverage", cov >= 0.93 && cov <= 0.97, "coverage=" + num(cov));

  SlopeEstimate e1, e2;
  e1.beta_hat = 0.1;
  e1.V = 1.0;
  e2.beta_hat = 0.3;
  e2.V = 3.0;
  const SlopeEstimate both[] = {e1, e2};
  const auto c = combine(both);
  s.check("inverse-variance combination example", c.beta_hat == 0.15 && c.V == 0.75,
          "beta=" + num(c.beta_hat) + " V=" + num(c.V));
  double best_w = 0.0, best_v = 1e300;
  for (int k = 0; k <= 1000; ++k) {
    const double w = k / 1000.0;
    const double v = w * w * 1.0 + (1 - w) * (1 - w) * 3.0;
    if (v < best_v) best_v = v, best_w = w;
  }
  s.check("inverse-variance weights minimise variance", std::abs(best_w - 0.75) <= 1e-3,
          "grid argmin=" + num(best_w));

  bool level_monotone = true;
  const AlarmConfig cfg;
  for (double pd : {0.1, 0.5, 0.8})
    for (int k = 1; k <= 100; ++k)
      level_monotone = level_monotone && alarm_level((k - 1) / 100.0, pd, cfg) <= alarm_level(k / 100.0, pd, cfg);
  s.check("level nondecreasing in p_adv", level_monotone, "");

  const auto fx = resurgence_fixture();
  int first[4] = {-1, -1, -1, -1};
  for (int d = cfg.window_days - 1; d <= fx.adv.last_day(); ++d) {
    const int l = static_cast<int>(monitor(fx.adv, fx.disp, cfg, d).level);
    if (first[l] < 0) first[l] = d;
  }
  const bool ordered = first[0] >= 0 && first[0] < first[1] && first[1] < first[2] && first[2] < first[3];
  s.check("resurgence fixture level sequence", ordered,
          "first days " + std::to_string(first[0]) + "," + std::to_string(first[1]) + "," +
              std::to_string(first[2]) + "," + std::to_string(first[3]));
  FixtureOptions decay;
  decay.resurgence = false;
  const auto fd = resurgence_fixture(decay);
  bool quiet = true;
  for (int d = cfg.window_days - 1; d <= fd.adv.last_day(); ++d)
    quiet = quiet && monitor(fd.adv, fd.disp, cfg, d).level == AlarmLevel::None;
  s.check("decaying fixture stays quiet", quiet, "");

  ObservationSeries a = fx.adv, b = fx.disp;
  for (auto& p : a.points) p.count *= 7;
  for (auto& p : b.points) p.count *= 7;
  const int as_of = first[2];
  const auto r0 = monitor(fx.adv, fx.disp, cfg, as_of);
  const auto r1 = monitor(a, b, cfg, as_of);
  const double db = std::abs(r0.adv.estimate.beta_hat - r1.adv.estimate.beta_hat);
  s.check("count rescaling leaves the report unchanged",
          db <= 1e-12 && std::abs(r0.p_adv_plus - r1.p_adv_plus) <= 1e-9 && r0.level == r1.level,
          "beta diff=" + num(db));
}

}  // namespace

std::vector<CheckResult> run_all(std::uint64_t seed) {
  std::vector<CheckResult> out;
  struct Entry {
    const char* name;
    void (*fn)(Suite, Rng&);
  };
  const Entry suites[] = {{"spectral", spectral_suite},
                          {"pde_engine", pde_suite},
                          {"segfit", segfit_suite},
                          {"alarm", alarm_suite}};
  std::uint64_t k = 0;
  for (const auto& e : suites) {
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * ++k));
    Suite s{e.name, &out};
    try {
      e.fn(s, rng);
    } catch (const std::exception& ex) {
      s.check("suite completed", false, ex.what());
    }
  }
  return out;
}

nlohmann::json to_json(const std::vector<CheckResult>& results, std::uint64_t seed) {
  nlohmann::json j;
  j["seed"] = seed;
  j["checks"] = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    j["checks"].push_back({{"suite", r.suite}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    all = all && r.pass;
  }
  j["pass"] = all;
  return j;
}

}  // namespace epimon::validation
