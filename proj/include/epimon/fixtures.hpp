#pragma once

#include <cstdint>
#include <random>

#include "epimon/pde.hpp"
#include "epimon/series.hpp"

namespace epimon {

/// Portable random draws on top of mt19937_64 (the standard distributions are
/// implementation-defined, which would break byte-identical outputs).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // in (0, 1)
  double normal();
  double laplace(double scale);

 private:
  std::mt19937_64 engine_;
};

struct ResurgenceFixture {
  ObservationSeries adv;
  ObservationSeries disp;
  int resurgence_day = 0;  // first day on which the advice series grows again
  int disp_lag = 7;
};

struct FixtureOptions {
  std::uint64_t seed = 20200317;
  int days = 110;
  double adv_noise = 0.08;   // Laplace scale on log counts
  double disp_noise = 0.04;
  double mu_low = 0.10;
  double mu_high = 0.30;
  int switch_day = 20;       // end of the decaying regime
  double approach_tau = 20.0;  // relaxation time of mu towards the critical value
  int approach_days = 40;
  int plateau_days = 8;      // critical mu (zero growth) before the resurgence
  int ramp_days = 5;         // daily mu steps up to mu_high
  bool resurgence = true;
};

/// Two pure-delay observables of a transport model that moves from a decaying
/// regime through a zero-growth plateau to a growing regime. The dispatch
/// series is the advice series delayed by seven days.
ResurgenceFixture resurgence_fixture(const FixtureOptions& options = {});

/// Noiseless two-phase counts: log-linear growth then decay around a peak.
ObservationSeries two_phase_fixture(int days = 40, int peak_day = 20, double up = 0.15,
                                    double down = -0.08, double peak = 500.0);

/// The transport model driving resurgence_fixture.
ModelParams resurgence_model(const FixtureOptions& options);

}  // namespace epimon
