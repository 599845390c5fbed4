#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epimon {

// Calendar handling. Day indices are integer offsets from an epoch date.
struct Epoch {
  int year = 2020;
  unsigned month = 1;
  unsigned day = 1;
};

// Parses YYYY-MM-DD; throws DataError on malformed or invalid dates.
int parse_date(std::string_view text, const Epoch& epoch = {});
std::string format_date(int day, const Epoch& epoch = {});
Epoch parse_epoch(std::string_view text);

struct Observation {
  int day = 0;
  long long count = 0;
  bool operator==(const Observation&) const = default;
};

/// Daily event counts. Days strictly increasing, counts nonnegative.
struct ObservationSeries {
  std::string label;
  std::vector<Observation> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  int first_day() const { return points.front().day; }
  int last_day() const { return points.back().day; }
};

struct LogPoint {
  int day = 0;
  double z = 0.0;
};

/// Natural log of the positive counts of an ObservationSeries.
struct LogSeries {
  std::string label;
  std::vector<LogPoint> points;
  std::size_t dropped_zero_days = 0;

  std::size_t size() const { return points.size(); }
  std::vector<double> days() const;
  std::vector<double> values() const;
};

// Throws DataError if days are not strictly increasing or a count is negative.
void validate(const ObservationSeries& series);

/// Parses `date,count` CSV (header required, LF or CRLF). Rows are sorted by
/// date; duplicate dates, negative counts and malformed rows raise ParseError.
ObservationSeries parse_csv(std::string_view text, const Epoch& epoch = {},
                            std::string label = {});
ObservationSeries read_csv_file(const std::string& path, const Epoch& epoch = {});

/// Canonical form: `date,count` header, one LF-terminated row per point.
std::string to_csv(const ObservationSeries& series, const Epoch& epoch = {});

/// Pointwise sum over the union of days.
ObservationSeries aggregate(std::span<const ObservationSeries> series);

/// Points with end_day - last_n < day <= end_day. Requires last_n >= 2 and
/// at least two points in the result.
ObservationSeries window(const ObservationSeries& series, int last_n, int end_day);

/// Drops zero-count days (counted in dropped_zero_days); errors if none remain.
LogSeries log_transform(const ObservationSeries& series);

/// LogSeries CSV: `date,log_count`.
LogSeries parse_log_csv(std::string_view text, const Epoch& epoch = {},
                        std::string label = {});
std::string to_csv(const LogSeries& series, const Epoch& epoch = {});

}  // namespace epimon
