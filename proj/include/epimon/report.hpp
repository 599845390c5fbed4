#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "epimon/alarm.hpp"
#include "epimon/segfit.hpp"
#include "epimon/series.hpp"
#include "epimon/spectral.hpp"

namespace epimon {

/// ISO-8601 rendering of a (possibly fractional) day index: a plain date for
/// whole days, date and time to the minute otherwise.
std::string format_instant(double day, const Epoch& epoch = {});

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
/// 16 hex digits hashing the given inputs in order.
std::string config_hash(const std::vector<std::string>& inputs);
std::string git_describe();

struct Provenance {
  std::string config_hash;
  std::string git_describe;
};

/// Doubling time as JSON: a number, or null when the slope is zero.
nlohmann::json doubling_json(double lambda);

nlohmann::json fit_json(const SegmentedFit& fit, const LogSeries& series, const Epoch& epoch);
nlohmann::json estimate_json(const SlopeEstimate& est);
nlohmann::json alarm_json(const AlarmReport& report, const AlarmConfig& cfg, const Epoch& epoch);

/// Stable text form: two-space indentation and a trailing newline.
std::string dump(const nlohmann::json& j);

/// Log-scale scatter of the counts with the fitted profile and dotted
/// breakpoint verticals.
std::string fit_svg(const LogSeries& series, const SegmentedFit& fit, const Epoch& epoch,
                    const Provenance& provenance);

/// Both observables on a log scale with, per series, the prediction band over
/// the window, the forecast trapezoid and the warning/alarm needles.
std::string monitor_svg(const ObservationSeries& adv, const ObservationSeries& disp,
                        const AlarmReport& report, const AlarmConfig& cfg, const Epoch& epoch,
                        const Provenance& provenance, int forecast_days = 6);

}  // namespace epimon
