#include "epimon/fixtures.hpp"

#include "epimon/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace epimon {

double Rng::uniform() {
  // 53 random bits mapped to the open interval (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double Rng::laplace(double scale) {
  const double u = uniform() - 0.5;
  return -scale * (u < 0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
}

namespace {

constexpr double kIncubation = 4.0;   // x_E*, deterministic (K_EI = 0)
constexpr double kAdvAge = 2.0;       // advice calls two days into the infectious phase
constexpr int kDispLag = 7;
constexpr double kH = 0.05;

}  // namespace

ModelParams resurgence_model(const FixtureOptions& opt) {
  auto params = ModelParams::sampled(
      kH, kIncubation, 12.0, [](double) { return 0.0; }, [](double) { return 0.0; },
      [](double x) { return x < 5.0 ? 1.0 : 0.02; }, {{0.0, opt.mu_low}});
  if (!opt.resurgence) return params;
  // Relax mu exponentially to its critical value, so the log-contamination
  // slope rises to zero from below instead of overshooting, then hold and
  // ramp up.
  const double mu_crit = 1.0 / characteristic_value(params, 0.0);
  double day = opt.switch_day;
  for (int k = 1; k <= opt.approach_days; ++k)
    params.mu_schedule.push_back(
        {++day, mu_crit - (mu_crit - opt.mu_low) * std::exp(-k / opt.approach_tau)});
  params.mu_schedule.push_back({++day, mu_crit});
  day += std::max(opt.plateau_days, 0);
  const int ramp = std::max(opt.ramp_days, 1);
  for (int k = 1; k <= ramp; ++k)
    params.mu_schedule.push_back({++day, mu_crit + (opt.mu_high - mu_crit) * k / ramp});
  return params;
}

ResurgenceFixture resurgence_fixture(const FixtureOptions& opt) {
  const auto params = resurgence_model(opt);
  auto init = DensityState::zeros(params);
  for (auto& v : init.n_E) v = 1.0e7;
  for (auto& v : init.n_I) v = 1.0e7;

  auto adv_kernel = ObservableKernel::pure_delay(kAdvAge, 1.0);
  auto disp_kernel = ObservableKernel::pure_delay(kAdvAge + kDispLag, 0.25);
  // Burn-in so that the initial transient has settled before day 0.
  constexpr int burn_in = 30;
  auto shifted = params;
  for (auto& phase : shifted.mu_schedule)
    if (phase.start > 0.0) phase.start += burn_in;
  const auto run = simulate(shifted, init, adv_kernel,
                            {static_cast<double>(opt.days + burn_in), kH, false});

  Rng rng(opt.seed);
  ResurgenceFixture fx;
  fx.adv.label = "adv";
  fx.disp.label = "disp";
  fx.disp_lag = kDispLag;
  for (int d = 0; d < opt.days; ++d) {
    const auto& point = run.points[static_cast<std::size_t>(d + burn_in)];
    const double adv = point.Y;
    const double disp = observe(point.state, disp_kernel);
    fx.adv.points.push_back({d, std::llround(adv * std::exp(rng.laplace(opt.adv_noise)))});
    fx.disp.points.push_back({d, std::llround(disp * std::exp(rng.laplace(opt.disp_noise)))});
  }
  // Contamination grows once the plateau ends; advice calls see it after the
  // incubation plus the observation age.
  fx.resurgence_day = opt.switch_day + opt.approach_days + 1 + std::max(opt.plateau_days, 0) +
                      static_cast<int>(kIncubation + kAdvAge);
  return fx;
}

ObservationSeries two_phase_fixture(int days, int peak_day, double up, double down, double peak) {
  ObservationSeries s{"two-phase", {}};
  for (int d = 0; d < days; ++d) {
    const double slope_part = d <= peak_day ? up * (d - peak_day) : down * (d - peak_day);
    s.points.push_back({d, std::llround(peak * std::exp(slope_part))});
  }
  return s;
}

}  // namespace epimon
