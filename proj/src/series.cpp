#include "epimon/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "epimon/errors.hpp"

namespace epimon {
namespace {

using std::chrono::day;
using std::chrono::month;
using std::chrono::sys_days;
using std::chrono::year;
using std::chrono::year_month_day;

sys_days epoch_days(const Epoch& e) {
  return sys_days{year_month_day{year{e.year}, month{e.month}, day{e.day}}};
}

bool parse_int(std::string_view s, long long& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Splits into lines, dropping a trailing empty line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(trim_cr(text.substr(start, end - start)));
    start = end + 1;
  }
  return lines;
}

bool split_pair(std::string_view line, std::string_view& a, std::string_view& b) {
  auto comma = line.find(',');
  if (comma == std::string_view::npos) return false;
  if (line.find(',', comma + 1) != std::string_view::npos) return false;
  a = line.substr(0, comma);
  b = line.substr(comma + 1);
  return true;
}

template <class Row, class ParseValue>
std::vector<Row> parse_rows(std::string_view text, const Epoch& epoch,
                            std::string_view header, ParseValue parse_value) {
  auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, "missing header");
  std::size_t first = 0;
  // Tolerate a UTF-8 byte-order mark.
  std::string_view head = lines[0];
  if (head.substr(0, 3) == "\xEF\xBB\xBF") head.remove_prefix(3);
  if (head != header) throw ParseError(1, "expected header '" + std::string(header) + "'");
  first = 1;

  std::vector<std::pair<Row, std::size_t>> rows;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (line.empty()) {
      if (i + 1 == lines.size()) break;
      throw ParseError(lineno, "empty row");
    }
    std::string_view date_text, value_text;
    if (!split_pair(line, date_text, value_text)) throw ParseError(lineno, "expected two fields");
    Row row;
    try {
      row.day = parse_date(date_text, epoch);
    } catch (const DataError& e) {
      throw ParseError(lineno, e.what());
    }
    parse_value(value_text, row, lineno);
    rows.emplace_back(row, lineno);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first.day < b.first.day; });
  std::vector<Row> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first.day == rows[i - 1].first.day)
      throw ParseError(std::max(rows[i].second, rows[i - 1].second),
                       "duplicate date " + format_date(rows[i].first.day, epoch));
    out.push_back(rows[i].first);
  }
  return out;
}

}  // namespace

int parse_date(std::string_view text, const Epoch& epoch) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw DataError("malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  long long y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d))
    throw DataError("malformed date '" + std::string(text) + "'");
  year_month_day ymd{year{static_cast<int>(y)}, month{static_cast<unsigned>(m)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
  return static_cast<int>((sys_days{ymd} - epoch_days(epoch)).count());
}

std::string format_date(int d, const Epoch& epoch) {
  year_month_day ymd{epoch_days(epoch) + std::chrono::days{d}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Epoch parse_epoch(std::string_view text) {
  const int offset = parse_date(text, Epoch{});
  year_month_day ymd{epoch_days(Epoch{}) + std::chrono::days{offset}};
  return Epoch{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
               static_cast<unsigned>(ymd.day())};
}

std::vector<double> LogSeries::days() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.day);
  return out;
}

std::vector<double> LogSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.z);
  return out;
}

void validate(const ObservationSeries& series) {
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    if (series.points[i].count < 0)
      throw DataError("negative count at day " + std::to_string(series.points[i].day));
    if (i > 0 && series.points[i].day <= series.points[i - 1].day)
      throw DataError("days not strictly increasing in series '" + series.label + "'");
  }
}

ObservationSeries parse_csv(std::string_view text, const Epoch& epoch, std::string label) {
  auto rows = parse_rows<Observation>(
      text, epoch, "date,count", [](std::string_view v, Observation& row, std::size_t lineno) {
        if (!v.empty() && v.front() == '-') throw ParseError(lineno, "negative count");
        if (!parse_int(v, row.count)) throw ParseError(lineno, "malformed count '" + std::string(v) + "'");
      });
  return ObservationSeries{std::move(label), std::move(rows)};
}

ObservationSeries read_csv_file(const std::string& path, const Epoch& epoch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), epoch, path);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string to_csv(const ObservationSeries& series, const Epoch& epoch) {
  std::string out = "date,count\n";
  for (const auto& p : series.points) {
    out += format_date(p.day, epoch);
    out += ',';
    out += std::to_string(p.count);
    out += '\n';
  }
  return out;
}

ObservationSeries aggregate(std::span<const ObservationSeries> series) {
  if (series.empty()) throw PreconditionError("aggregate: empty input list");
  std::map<int, long long> sums;
  std::string label;
  for (const auto& s : series) {
    if (s.empty()) throw PreconditionError("aggregate: empty series '" + s.label + "'");
    validate(s);
    for (const auto& p : s.points) sums[p.day] += p.count;
    if (!label.empty()) label += '+';
    label += s.label;
  }
  ObservationSeries out{std::move(label), {}};
  out.points.reserve(sums.size());
  for (const auto& [d, c] : sums) out.points.push_back({d, c});
  return out;
}

ObservationSeries window(const ObservationSeries& series, int last_n, int end_day) {
  if (last_n < 2) throw PreconditionError("window: last_n must be >= 2");
  ObservationSeries out{series.label, {}};
  for (const auto& p : series.points)
    if (p.day > end_day - last_n && p.day <= end_day) out.points.push_back(p);
  if (out.points.size() < 2)
    throw DataError("window ending " + std::to_string(end_day) + " holds fewer than 2 points");
  return out;
}

LogSeries log_transform(const ObservationSeries& series) {
  if (series.empty()) throw PreconditionError("log_transform: empty series");
  LogSeries out{series.label, {}, 0};
  for (const auto& p : series.points) {
    if (p.count < 0) throw DataError("negative count at day " + std::to_string(p.day));
    if (p.count == 0) {
      ++out.dropped_zero_days;
      continue;
    }
    out.points.push_back({p.day, std::log(static_cast<double>(p.count))});
  }
  if (out.points.empty()) throw DataError("log_transform: all counts are zero");
  return out;
}

LogSeries parse_log_csv(std::string_view text, const Epoch& epoch, std::string label) {
  auto rows = parse_rows<LogPoint>(
      text, epoch, "date,log_count", [](std::string_view v, LogPoint& row, std::size_t lineno) {
        if (!parse_real(v, row.z)) throw ParseError(lineno, "malformed value '" + std::string(v) + "'");
      });
  return LogSeries{std::move(label), std::move(rows), 0};
}

std::string to_csv(const LogSeries& series, const Epoch& epoch) {
  std::string out = "date,log_count\n";
  char buf[64];
  for (const auto& p : series.points) {
    std::snprintf(buf, sizeof buf, "%.17g", p.z);
    out += format_date(p.day, epoch);
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace epimon
