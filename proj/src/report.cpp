#include "epimon/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "epimon/errors.hpp"

#ifndef EPIMON_GIT_DESCRIBE
#define EPIMON_GIT_DESCRIBE "unknown"
#endif

namespace epimon {

using nlohmann::json;

std::string format_instant(double day, const Epoch& epoch) {
  const double whole = std::floor(day);
  long minutes = std::lround((day - whole) * 1440.0);
  int d = static_cast<int>(whole);
  if (minutes == 1440) {
    ++d;
    minutes = 0;
  }
  if (minutes == 0) return format_date(d, epoch);
  char buf[48];
  std::snprintf(buf, sizeof buf, "T%02ld:%02ld", minutes / 60, minutes % 60);
  return format_date(d, epoch) + buf;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const std::vector<std::string>& inputs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : inputs) {
    h = fnv1a64(s, h);
    h = fnv1a64(std::string_view("\0", 1), h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string git_describe() { return EPIMON_GIT_DESCRIBE; }

json doubling_json(double lambda) {
  const double d = doubling_time(lambda);
  return std::isfinite(d) ? json(d) : json(nullptr);
}

json fit_json(const SegmentedFit& fit, const LogSeries& series, const Epoch& epoch) {
  json j;
  j["flavor"] = fit.kind == FitKind::DpSegments ? "dp" : "minlines";
  j["loss_kind"] = to_string(fit.loss_kind);
  j["loss"] = fit.loss;
  j["span"] = {format_date(static_cast<int>(fit.span_first), epoch),
               format_date(static_cast<int>(fit.span_last), epoch)};
  j["breakpoints"] = json::array();
  for (double b : fit.breakpoints) j["breakpoints"].push_back(format_instant(b, epoch));
  j["segments"] = json::array();
  // Segment j is active between consecutive breakpoints for both flavours.
  for (std::size_t k = 0; k < fit.segments.size(); ++k) {
    const double from = k == 0 ? fit.span_first : fit.breakpoints[k - 1];
    const double to = k + 1 < fit.segments.size() ? fit.breakpoints[k] : fit.span_last;
    const auto& line = fit.segments[k];
    json s;
    s["from"] = format_instant(from, epoch);
    s["to"] = format_instant(to, epoch);
    s["slope"] = line.slope;
    s["log_value_at_from"] = line(from);
    s["doubling_time"] = doubling_json(line.slope);
    j["segments"].push_back(std::move(s));
  }
  j["n_points"] = series.size();
  j["dropped_zero_days"] = series.dropped_zero_days;
  return j;
}

json estimate_json(const SlopeEstimate& est) {
  return json{{"model", to_string(est.model)}, {"beta_hat", est.beta_hat},
              {"scale", est.scale},            {"V", est.V},
              {"n", est.n},                    {"df", est.df}};
}

namespace {

json assessment_json(const SeriesAssessment& a) {
  json j = estimate_json(a.estimate);
  j["p_plus"] = a.p_plus;
  j["doubling_time"] = doubling_json(a.estimate.beta_hat);
  j["needle_warn_slope"] = a.needle_warn;
  j["needle_alarm_slope"] = a.needle_alarm;
  j["doubling_alarm"] = a.doubling_alarm;
  j["drops"] = a.dropped_zero_days;
  return j;
}

}  // namespace

json alarm_json(const AlarmReport& r, const AlarmConfig& cfg, const Epoch& epoch) {
  json j;
  j["p_adv"] = r.p_adv_plus;
  j["p_disp"] = r.p_disp_plus;
  j["level"] = to_string(r.level);
  j["beta_hat"] = {{"adv", r.adv.estimate.beta_hat}, {"disp", r.disp.estimate.beta_hat}};
  j["doubling_time"] = {{"adv", doubling_json(r.adv.estimate.beta_hat)},
                        {"disp", doubling_json(r.disp.estimate.beta_hat)}};
  j["doubling_alarm"] = r.doubling_alarm;
  j["doubling_alarm_confirmed"] = r.doubling_alarm_confirmed;
  j["window"] = {format_date(r.window_first, epoch), format_date(r.window_last, epoch)};
  j["drops"] = {{"adv", r.adv.dropped_zero_days}, {"disp", r.disp.dropped_zero_days}};
  j["series"] = {{"adv", assessment_json(r.adv)}, {"disp", assessment_json(r.disp)}};
  j["config"] = {{"theta_warn", cfg.theta_warn},
                 {"theta_alarm", cfg.theta_alarm},
                 {"window_days", cfg.window_days},
                 {"doubling_threshold_D", cfg.doubling_threshold_D},
                 {"epsilon", cfg.epsilon},
                 {"model", to_string(cfg.model)}};
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Day on the abscissa, natural log of the count on the ordinate.
class Canvas {
 public:
  Canvas(double t0, double t1, double z0, double z1, std::string title, const Epoch& epoch,
         const Provenance& prov)
      : t0_(t0), t1_(t1 > t0 ? t1 : t0 + 1), epoch_(epoch) {
    const double pad = 0.05 * std::max(z1 - z0, 0.5);
    z0_ = z0 - pad;
    z1_ = z1 + pad;
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kW) + "\" height=\"" +
            fmt(kH) + "\" viewBox=\"0 0 " + fmt(kW) + " " + fmt(kH) +
            "\" data-config-hash=\"" + escape(prov.config_hash) + "\" data-git-describe=\"" +
            escape(prov.git_describe) + "\">\n";
    out_ += "<metadata>config_hash=" + escape(prov.config_hash) +
            " git_describe=" + escape(prov.git_describe) + "</metadata>\n";
    out_ += "<title>" + escape(title) + "</title>\n";
    out_ += "<rect x=\"0\" y=\"0\" width=\"" + fmt(kW) + "\" height=\"" + fmt(kH) +
            "\" fill=\"white\"/>\n";
    axes();
  }

  double x(double t) const { return kL + (t - t0_) / (t1_ - t0_) * (kW - kL - kR); }
  double y(double z) const { return kH - kB - (z - z0_) / (z1_ - z0_) * (kH - kT - kB); }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
    if (pts.empty()) return;
    out_ += "<polyline fill=\"none\" " + style + " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      out_ += (i ? " " : "") + fmt(x(pts[i].first)) + "," + fmt(y(pts[i].second));
    out_ += "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
    out_ += "<polygon " + style + " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      out_ += (i ? " " : "") + fmt(x(pts[i].first)) + "," + fmt(y(pts[i].second));
    out_ += "\"/>\n";
  }

  void dot(double t, double z, const std::string& fill) {
    out_ += "<circle cx=\"" + fmt(x(t)) + "\" cy=\"" + fmt(y(z)) + "\" r=\"2.5\" fill=\"" + fill +
            "\"/>\n";
  }

  void vertical(double t, const std::string& style) {
    out_ += "<line x1=\"" + fmt(x(t)) + "\" y1=\"" + fmt(kT) + "\" x2=\"" + fmt(x(t)) +
            "\" y2=\"" + fmt(kH - kB) + "\" " + style + "/>\n";
  }

  void text(double px, double py, const std::string& s, const std::string& extra = "") {
    out_ += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(py) + "\" font-family=\"sans-serif\" " +
            "font-size=\"11\"" + extra + ">" + escape(s) + "</text>\n";
  }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

  static constexpr double kW = 800, kH = 480, kL = 70, kR = 20, kT = 30, kB = 50;

 private:
  void axes() {
    out_ += "<rect x=\"" + fmt(kL) + "\" y=\"" + fmt(kT) + "\" width=\"" + fmt(kW - kL - kR) +
            "\" height=\"" + fmt(kH - kT - kB) + "\" fill=\"none\" stroke=\"black\"/>\n";
    // Ordinate ticks at 1, 2, 5 times powers of ten.
    for (int e = -2; e <= 9; ++e)
      for (double m : {1.0, 2.0, 5.0}) {
        const double v = m * std::pow(10.0, e);
        const double z = std::log(v);
        if (z < z0_ || z > z1_) continue;
        out_ += "<line x1=\"" + fmt(kL - 4) + "\" y1=\"" + fmt(y(z)) + "\" x2=\"" + fmt(kL) +
                "\" y2=\"" + fmt(y(z)) + "\" stroke=\"black\"/>\n";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        text(kL - 8, y(z) + 4, buf, " text-anchor=\"end\"");
      }
    // Abscissa ticks weekly.
    const int first = static_cast<int>(std::ceil(t0_));
    const int span = static_cast<int>(t1_ - t0_);
    const int step = span > 120 ? 28 : (span > 40 ? 7 : (span > 14 ? 2 : 1));
    for (int d = first; d <= t1_; d += step) {
      out_ += "<line x1=\"" + fmt(x(d)) + "\" y1=\"" + fmt(kH - kB) + "\" x2=\"" + fmt(x(d)) +
              "\" y2=\"" + fmt(kH - kB + 4) + "\" stroke=\"black\"/>\n";
      text(x(d), kH - kB + 16, format_date(d, epoch_), " text-anchor=\"middle\"");
    }
  }

  double t0_, t1_, z0_ = 0, z1_ = 1;
  Epoch epoch_;
  std::string out_;
};

std::pair<double, double> value_range(const std::vector<double>& zs) {
  if (zs.empty()) return {0.0, 1.0};
  const auto [lo, hi] = std::minmax_element(zs.begin(), zs.end());
  return {*lo, *hi};
}

}  // namespace

std::string fit_svg(const LogSeries& series, const SegmentedFit& fit, const Epoch& epoch,
                    const Provenance& prov) {
  const auto days = series.days();
  auto zs = series.values();
  std::vector<std::pair<double, double>> curve;
  const int samples = 400;
  for (int i = 0; i <= samples; ++i) {
    const double t = fit.span_first + (fit.span_last - fit.span_first) * i / samples;
    curve.emplace_back(t, fit.evaluate(t));
    zs.push_back(curve.back().second);
  }
  const auto [z0, z1] = value_range(zs);
  Canvas c(fit.span_first, fit.span_last, z0, z1,
           series.label + " segmented fit (" + to_string(fit.loss_kind) + ")", epoch, prov);
  for (double b : fit.breakpoints) c.vertical(b, "stroke=\"gray\" stroke-dasharray=\"2,3\"");
  for (std::size_t i = 0; i < days.size(); ++i) c.dot(days[i], series.points[i].z, "#1f77b4");
  if (fit.kind == FitKind::DpSegments) {
    // Pieces need not join: draw each on its own interval.
    for (std::size_t k = 0; k < fit.segments.size(); ++k) {
      const double from = k == 0 ? fit.span_first : fit.breakpoints[k - 1];
      const double to = k + 1 < fit.segments.size() ? fit.breakpoints[k] : fit.span_last;
      c.polyline({{from, fit.segments[k](from)}, {to, fit.segments[k](to)}},
                 "stroke=\"#d62728\" stroke-width=\"2\"");
    }
  } else {
    c.polyline(curve, "stroke=\"#d62728\" stroke-width=\"2\"");
  }
  return c.finish();
}

std::string monitor_svg(const ObservationSeries& adv, const ObservationSeries& disp,
                        const AlarmReport& report, const AlarmConfig& cfg, const Epoch& epoch,
                        const Provenance& prov, int forecast_days) {
  const int t_last = report.window_last;
  const int t_first = std::max(
      std::min(adv.empty() ? t_last : adv.first_day(), disp.empty() ? t_last : disp.first_day()),
      report.window_first - 3 * cfg.window_days);
  const double t_end = t_last + forecast_days;

  struct Layer {
    const ObservationSeries* series;
    const SeriesAssessment* a;
    std::string colour;
  };
  const Layer layers[] = {{&adv, &report.adv, "#1f77b4"}, {&disp, &report.disp, "#ff7f0e"}};

  std::vector<double> zs;
  std::vector<std::vector<TrapezoidPoint>> bands, traps;
  for (const auto& l : layers) {
    for (const auto& p : l.series->points)
      if (p.count > 0 && p.day >= t_first && p.day <= t_end) zs.push_back(std::log(p.count));
    std::vector<TrapezoidPoint> band;
    for (const auto& p : l.a->window.points) {
      band.push_back(trapezoid_domain(l.a->estimate, p.day, 0, cfg.epsilon).front());
      zs.push_back(band.back().lower);
      zs.push_back(band.back().upper);
    }
    auto trap = trapezoid_domain(l.a->estimate, t_last, forecast_days, cfg.epsilon);
    for (const auto& tp : trap) {
      zs.push_back(tp.lower);
      zs.push_back(tp.upper);
    }
    bands.push_back(std::move(band));
    traps.push_back(std::move(trap));
  }
  const auto [z0, z1] = value_range(zs);
  Canvas c(t_first, t_end, z0, z1, "monitor " + format_date(t_last, epoch) + ": " +
                                        to_string(report.level), epoch, prov);
  c.vertical(report.window_first, "stroke=\"gray\" stroke-dasharray=\"4,4\"");
  c.vertical(t_last, "stroke=\"gray\" stroke-dasharray=\"4,4\"");
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& l = layers[i];
    std::vector<std::pair<double, double>> poly;
    for (const auto& b : bands[i]) poly.emplace_back(b.day, b.upper);
    for (auto it = bands[i].rbegin(); it != bands[i].rend(); ++it) poly.emplace_back(it->day, it->lower);
    c.polygon(poly, "fill=\"" + l.colour + "\" fill-opacity=\"0.15\" stroke=\"none\"");
    poly.clear();
    for (const auto& b : traps[i]) poly.emplace_back(b.day, b.upper);
    for (auto it = traps[i].rbegin(); it != traps[i].rend(); ++it) poly.emplace_back(it->day, it->lower);
    c.polygon(poly, "fill=\"" + l.colour + "\" fill-opacity=\"0.35\" stroke=\"none\"");

    std::vector<std::pair<double, double>> pts;
    for (const auto& p : l.series->points)
      if (p.count > 0 && p.day >= t_first && p.day <= t_end) {
        c.dot(p.day, std::log(p.count), l.colour);
        pts.emplace_back(p.day, std::log(p.count));
      }
    c.polyline(pts, "stroke=\"" + l.colour + "\" stroke-width=\"1\"");

    const double z_n = traps[i].front().center;
    c.polyline({{t_last, z_n}, {t_end, z_n}}, "stroke=\"black\" stroke-dasharray=\"3,3\"");
    c.polyline({{t_last, z_n}, {t_end, z_n + l.a->needle_warn * forecast_days}},
               "stroke=\"black\" stroke-width=\"1\"");
    c.polyline({{t_last, z_n}, {t_end, z_n + l.a->needle_alarm * forecast_days}},
               "stroke=\"black\" stroke-width=\"3\"");
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s: p+ = %.3f", l.series->label.c_str(), l.a->p_plus);
    c.text(Canvas::kL + 8, Canvas::kT + 16 + 14 * static_cast<double>(i), buf,
           " fill=\"" + l.colour + "\"");
  }
  return c.finish();
}

}  // namespace epimon
