#include "epimon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "epimon/errors.hpp"

namespace epimon {

using nlohmann::json;

namespace {

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw DataError(std::string("scenario: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double required(const json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("scenario: missing '") + key + "'");
  return number(j, key, 0.0);
}

std::vector<double> table(const json& j, std::size_t cells, const std::string& what) {
  const auto& t = j.at("table");
  if (!t.is_array() || t.size() != cells)
    throw DataError("scenario: " + what + " table needs " + std::to_string(cells) + " samples");
  std::vector<double> out;
  for (const auto& v : t) {
    if (!v.is_number()) throw DataError("scenario: " + what + " table entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// Samples a rate spec at the cell midpoints of a grid.
std::vector<double> rate(const json& j, std::size_t cells, double h, const std::string& what) {
  if (j.is_number()) return std::vector<double>(cells, j.get<double>());
  if (j.is_object() && j.contains("table")) return table(j, cells, what);
  if (j.is_object() && j.contains("steps")) {
    std::vector<std::pair<double, double>> steps;
    for (const auto& s : j.at("steps")) {
      if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
        throw DataError("scenario: " + what + " steps must be [age, value] pairs");
      steps.emplace_back(s[0].get<double>(), s[1].get<double>());
    }
    if (steps.empty() || steps.front().first > 0.0)
      throw DataError("scenario: " + what + " steps must start at age 0");
    std::vector<double> out(cells);
    for (std::size_t k = 0; k < cells; ++k) {
      const double age = (k + 0.5) * h;
      for (const auto& [from, value] : steps)
        if (from <= age) out[k] = value;
    }
    return out;
  }
  throw DataError("scenario: " + what + " must be a number, {\"table\"} or {\"steps\"}");
}

std::vector<double> profile(const json& j, std::size_t cells, double h, const std::string& what) {
  if (j.contains("constant")) return std::vector<double>(cells, j.at("constant").get<double>());
  if (j.contains("table")) return table(j, cells, what);
  if (j.contains("triangular")) {
    const auto& t = j.at("triangular");
    const double c = required(t, "center");
    const double w = required(t, "half_width");
    const double height = required(t, "height");
    if (!(w > 0.0)) throw DataError("scenario: " + what + " half_width must be positive");
    std::vector<double> out(cells);
    for (std::size_t k = 0; k < cells; ++k)
      out[k] = height * std::max(0.0, 1.0 - std::abs((k + 0.5) * h - c) / w);
    return out;
  }
  throw DataError("scenario: " + what + " profile must be constant, triangular or table");
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("scenario: top level must be an object");
  try {
    Scenario sc;
    if (j.contains("epoch")) sc.epoch = parse_epoch(j.at("epoch").get<std::string>());

    auto& p = sc.params;
    p.h = number(j, "h", 0.05);
    if (!(p.h > 0.0)) throw DataError("scenario: h must be positive");
    p.x_E_star = required(j, "x_E_star");
    p.x_I_star = required(j, "x_I_star");
    const auto mE = grid_cells(p.x_E_star, p.h);
    const auto mI = grid_cells(p.x_I_star, p.h);
    p.K_EI = rate(j.value("K_EI", json(0.0)), mE, p.h, "K_EI");
    p.K_IR = rate(j.value("K_IR", json(0.0)), mI, p.h, "K_IR");
    if (!j.contains("psi")) throw DataError("scenario: missing 'psi'");
    p.psi = rate(j.at("psi"), mI, p.h, "psi");

    const auto& schedule = j.at("mu_schedule");
    if (schedule.is_number()) {
      p.mu_schedule = {{0.0, schedule.get<double>()}};
    } else {
      for (const auto& phase : schedule)
        p.mu_schedule.push_back({required(phase, "start"), required(phase, "mu")});
    }
    validate(p);

    sc.options.dt = number(j, "dt", p.h);
    sc.options.horizon = required(j, "horizon");
    sc.options.nonlinear = j.value("nonlinear", false);

    sc.init = DensityState::zeros(p, number(j, "S0", 0.0));
    if (j.contains("initial")) {
      const auto& init = j.at("initial");
      if (init.contains("E")) sc.init.n_E = profile(init.at("E"), mE, p.h, "initial E");
      if (init.contains("I")) sc.init.n_I = profile(init.at("I"), mI, p.h, "initial I");
      sc.init.R = number(init, "R", 0.0);
    }

    const json kernel = j.value("kernel", json{{"density", "psi"}});
    if (kernel.contains("density")) {
      const auto& d = kernel.at("density");
      if (d == "psi")
        sc.kernel.weights = p.psi;
      else if (d == "unit")
        sc.kernel.weights.assign(mI, 1.0);
      else
        sc.kernel.weights = rate(d, mI, p.h, "kernel density");
    }
    if (kernel.contains("point_masses"))
      for (const auto& pm : kernel.at("point_masses"))
        sc.kernel.point_masses.push_back({required(pm, "age"), required(pm, "mass")});
    return sc;
  } catch (const json::exception& e) {
    throw DataError(std::string("scenario: ") + e.what());
  }
}

Scenario read_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace epimon
