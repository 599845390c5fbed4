#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "epimon/alarm.hpp"
#include "epimon/errors.hpp"
#include "epimon/report.hpp"
#include "epimon/scenario.hpp"
#include "epimon/segfit.hpp"
#include "epimon/series.hpp"
#include "epimon/spectral.hpp"
#include "epimon/validation.hpp"

namespace epimon::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string input_disp;
  std::string config;
  std::string out = ".";
  std::string as_of;
  std::string epoch = "2020-01-01";
  std::uint64_t seed = 20200317;
  std::string model;
  int nu = 2;
  std::string loss = "l1";
  std::string flavor = "dp";
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Writer {
 public:
  Writer(const std::string& dir, std::ostream& log) : dir_(dir), log_(log) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw DataError("cannot create output directory '" + dir + "'");
  }
  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw DataError("cannot write '" + path.string() + "'");
    log_ << path.string() << "\n";
  }

 private:
  fs::path dir_;
  std::ostream& log_;
};

Provenance provenance(const std::vector<std::string>& inputs) {
  return {config_hash(inputs), git_describe()};
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_simulate(const Options& o, Writer& w) {
  if (o.config.empty()) throw UsageError("simulate: --config is required");
  const auto sc = parse_scenario(slurp(o.config));
  const auto traj = simulate(sc.params, sc.init, sc.kernel, sc.options);
  std::string t = "t,S,E,I,R,Y\n";
  ObservationSeries obs{"Y", {}};
  for (const auto& p : traj.points) {
    const int day = static_cast<int>(std::lround(p.t));
    t += format_date(day, sc.epoch) + "," + csv_number(p.state.S) + "," + csv_number(p.state.E()) +
         "," + csv_number(p.state.I()) + "," + csv_number(p.state.R) + "," + csv_number(p.Y) + "\n";
    obs.points.push_back({day, std::llround(p.Y)});
  }
  w.write("trajectory.csv", t);
  w.write("observable.csv", to_csv(obs, sc.epoch));
  json meta{{"max_switch_snap", traj.max_switch_snap}, {"days", traj.points.size()}};
  w.write("simulate.json", dump(meta));
  return kOk;
}

int cmd_eig(const Options& o, Writer& w) {
  if (o.config.empty()) throw UsageError("eig: --config is required");
  const auto sc = parse_scenario(slurp(o.config));
  json report;
  report["phases"] = json::array();
  std::vector<EigenSolution> sols;
  for (std::size_t k = 0; k < sc.params.mu_schedule.size(); ++k) {
    const auto& phase = sc.params.mu_schedule[k];
    auto sol = perron_solution(sc.params, phase.mu);
    // Below the solver tolerance the growth rate is zero and doubling never happens.
    const double lambda = std::abs(sol.lambda) <= 1e-9 ? 0.0 : sol.lambda;
    std::string csv = "compartment,age,value\n";
    for (std::size_t i = 0; i < sol.n_E_bar.size(); ++i)
      csv += "E," + csv_number(i * sol.h) + "," + csv_number(sol.n_E_bar[i]) + "\n";
    for (std::size_t i = 0; i < sol.n_I_bar.size(); ++i)
      csv += "I," + csv_number(i * sol.h) + "," + csv_number(sol.n_I_bar[i]) + "\n";
    const std::string name = "eigenvector_phase" + std::to_string(k + 1) + ".csv";
    w.write(name, csv);
    report["phases"].push_back({{"start", format_instant(phase.start, sc.epoch)},
                                {"mu", phase.mu},
                                {"lambda", sol.lambda},
                                {"doubling_time", doubling_json(lambda)},
                                {"residual", sol.residual},
                                {"eigenvector_csv", name}});
    sols.push_back(std::move(sol));
  }
  json bounds = json::array();
  for (std::size_t k = 1; k < sols.size(); ++k) {
    const double d = hilbert_distance(sols[k - 1].concatenated(), sols[k].concatenated());
    const double b = eigenvector_distance_bound(sc.params, sols[k - 1].lambda, sols[k].lambda);
    bounds.push_back({{"phases", {k, k + 1}}, {"hilbert_distance", d}, {"bound", b},
                      {"holds", d <= b + 1e-6}});
  }
  report["eigenvector_distance_bounds"] = bounds;
  std::vector<double> v0 = sc.init.n_E;
  v0.insert(v0.end(), sc.init.n_I.begin(), sc.init.n_I.end());
  const bool positive = !v0.empty() && std::all_of(v0.begin(), v0.end(), [](double v) { return v > 0; });
  if (positive) {
    const auto tb = tropical_bound_delta(v0, sols);
    report["tropical_delta"] = tb.delta;
    report["tropical_per_hop"] = tb.per_hop;
  } else {
    report["tropical_delta"] = nullptr;  // infinite for a non-positive initial state
  }
  w.write("eig.json", dump(report));
  return kOk;
}

LossKind parse_loss(const std::string& s) { return s == "l2" ? LossKind::L2 : LossKind::L1; }

int cmd_fit(const Options& o, Writer& w, const Epoch& epoch) {
  if (o.input.empty()) throw UsageError("fit: --input is required");
  const auto text = slurp(o.input);
  const auto label = fs::path(o.input).stem().string();
  LogSeries logs;
  try {
    // Either raw counts or an already log-transformed series.
    if (text.starts_with("date,log_count"))
      logs = parse_log_csv(text, epoch, label);
    else
      logs = log_transform(parse_csv(text, epoch, label));
  } catch (const ParseError& e) {
    throw DataError(o.input + ": " + e.what());
  }
  const auto loss = parse_loss(o.loss);
  const auto fit = o.flavor == "minlines" ? fit_minlines(logs, o.nu, loss)
                                          : fit_segmented_dp(logs, o.nu, loss);
  auto j = fit_json(fit, logs, epoch);
  j["nu"] = o.nu;
  w.write("fit.json", dump(j));
  const auto prov = provenance({text, o.flavor, o.loss, std::to_string(o.nu)});
  w.write("fit.svg", fit_svg(logs, fit, epoch, prov));
  return kOk;
}

AlarmConfig alarm_config(const std::string& text) {
  AlarmConfig cfg;
  json j;
  try {
    j = json::parse(text);
    cfg.theta_warn = j.value("theta_warn", cfg.theta_warn);
    cfg.theta_alarm = j.value("theta_alarm", cfg.theta_alarm);
    cfg.window_days = j.value("window_days", cfg.window_days);
    cfg.doubling_threshold_D = j.value("doubling_threshold_D", cfg.doubling_threshold_D);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    const auto model = j.value("model", std::string("l1"));
    if (model != "l1" && model != "ols") throw DataError("alarm config: model must be l1 or ols");
    cfg.model = model == "ols" ? SlopeModel::GaussOls : SlopeModel::LaplaceL1;
  } catch (const json::exception& e) {
    throw DataError(std::string("alarm config: ") + e.what());
  }
  return cfg;
}

int cmd_monitor(const Options& o, Writer& w, const Epoch& epoch) {
  if (o.input.empty() || o.input_disp.empty())
    throw UsageError("monitor: --input and --input-disp are required");
  const auto adv_text = slurp(o.input);
  const auto disp_text = slurp(o.input_disp);
  const std::string cfg_text = o.config.empty() ? std::string("{}") : slurp(o.config);
  auto cfg = alarm_config(cfg_text);
  if (!o.model.empty()) cfg.model = o.model == "ols" ? SlopeModel::GaussOls : SlopeModel::LaplaceL1;
  try {
    validate(cfg);
  } catch (const PreconditionError& e) {
    throw DataError(std::string("alarm config: ") + e.what());
  }
  ObservationSeries adv, disp;
  try {
    adv = parse_csv(adv_text, epoch, "adv");
    disp = parse_csv(disp_text, epoch, "disp");
  } catch (const ParseError& e) {
    throw DataError(e.what());
  }
  if (adv.empty() || disp.empty()) throw DataError("monitor: empty input series");
  const int as_of = o.as_of.empty() ? std::min(adv.last_day(), disp.last_day())
                                    : parse_date(o.as_of, epoch);
  const auto report = monitor(adv, disp, cfg, as_of);
  w.write("monitor.json", dump(alarm_json(report, cfg, epoch)));
  const auto prov = provenance({adv_text, disp_text, cfg_text, to_string(cfg.model), o.as_of});
  w.write("monitor.svg", monitor_svg(adv, disp, report, cfg, epoch, prov));
  return kOk;
}

int cmd_validate(const Options& o, Writer& w, std::ostream& err) {
  const auto results = validation::run_all(o.seed);
  const auto j = validation::to_json(results, o.seed);
  w.write("validate.json", dump(j));
  for (const auto& r : results)
    if (!r.pass) err << "validate: FAIL " << r.suite << "/" << r.name << " " << r.detail << "\n";
  return j["pass"].get<bool>() ? kOk : kNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Epidemic monitoring from event-count time series", "epimon"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--epoch", o.epoch, "Reference date for day indices")->capture_default_str();
  };
  auto* sim = app.add_subcommand("simulate", "Run a transport PDE scenario");
  sim->add_option("--config", o.config, "Scenario JSON");
  sim->add_option("--seed", o.seed, "Unused; accepted for uniformity");
  add_common(sim);
  auto* eig = app.add_subcommand("eig", "Perron eigenpairs per control phase");
  eig->add_option("--config", o.config, "Scenario JSON");
  add_common(eig);
  auto* fit = app.add_subcommand("fit", "Segmented log-linear fit of a count series");
  fit->add_option("--input", o.input, "date,count CSV");
  fit->add_option("--nu", o.nu, "Maximum number of segments")->check(CLI::Range(1, 50));
  fit->add_option("--loss", o.loss, "l1 or l2")->check(CLI::IsMember({"l1", "l2"}));
  fit->add_option("--flavor", o.flavor, "dp or minlines")->check(CLI::IsMember({"dp", "minlines"}));
  add_common(fit);
  auto* mon = app.add_subcommand("monitor", "Warning and alarm levels from two observables");
  mon->add_option("--input", o.input, "Advice series (date,count CSV)");
  mon->add_option("--input-disp", o.input_disp, "Dispatch series (date,count CSV)");
  mon->add_option("--config", o.config, "Alarm config JSON");
  mon->add_option("--as-of", o.as_of, "Last day of the window (YYYY-MM-DD)");
  mon->add_option("--model", o.model, "ols or l1")->check(CLI::IsMember({"ols", "l1"}));
  add_common(mon);
  auto* val = app.add_subcommand("validate", "Run the property suites");
  val->add_option("--seed", o.seed, "Seed of the random generators")->capture_default_str();
  add_common(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "epimon: usage: " << e.what() << "\n";
    return kUsage;
  }

  try {
    Epoch epoch;
    try {
      epoch = parse_epoch(o.epoch);
    } catch (const DataError& e) {
      throw UsageError(std::string("--epoch: ") + e.what());
    }
    Writer w(o.out, out);
    if (sim->parsed()) return cmd_simulate(o, w);
    if (eig->parsed()) return cmd_eig(o, w);
    if (fit->parsed()) return cmd_fit(o, w, epoch);
    if (mon->parsed()) return cmd_monitor(o, w, epoch);
    return cmd_validate(o, w, err);
  } catch (const UsageError& e) {
    err << "epimon: usage: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "epimon: numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const DataError& e) {
    err << "epimon: data error: " << e.what() << "\n";
    return kData;
  } catch (const PreconditionError& e) {
    err << "epimon: data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "epimon: numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace epimon::cli
