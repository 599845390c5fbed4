#include "epimon/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "epimon/errors.hpp"

namespace epimon {
namespace {

constexpr double kGridTol = 1e-9;

double rectangle(std::span<const double> v, double h) {
  return h * std::accumulate(v.begin(), v.end(), 0.0);
}

// Decays every cell by exp(-K dt) in place; returns the mass removed.
double decay(std::vector<double>& n, std::span<const double> rate, double h, double dt) {
  double lost = 0.0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    const double kept = n[k] * std::exp(-rate[k] * dt);
    lost += n[k] - kept;
    n[k] = kept;
  }
  return h * lost;
}

// Upwind shift by a Courant fraction c with boundary inflow mass; returns the
// mass leaving through the last cell.
double transport(std::vector<double>& n, double c, double inflow_mass, double h) {
  if (n.empty()) return inflow_mass;
  const double outflow = h * c * n.back();
  for (std::size_t k = n.size() - 1; k > 0; --k) n[k] = (1.0 - c) * n[k] + c * n[k - 1];
  n[0] = (1.0 - c) * n[0] + inflow_mass / h;
  return outflow;
}

void check_step(const DensityState& state, const ModelParams& params, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("step: dt must be positive");
  if (std::abs(state.h - params.h) > kGridTol * params.h)
    throw PreconditionError("step: state grid step differs from params grid step");
  if (dt > params.h * (1.0 + 1e-12))
    throw PreconditionError("step: CFL violated (dt=" + std::to_string(dt) +
                            " > h=" + std::to_string(params.h) + ")");
  if (state.n_E.size() != params.cells_E() || state.n_I.size() != params.cells_I())
    throw PreconditionError("step: state grids do not match params domains");
}

DensityState advance(const DensityState& state, const ModelParams& params, double dt, double mu,
                     bool nonlinear) {
  const double h = params.h;
  const double c = dt / h;
  DensityState next = state;

  double contamination = mu * h *
                         std::inner_product(params.psi.begin(), params.psi.end(),
                                            state.n_I.begin(), 0.0);
  double new_exposed = dt * contamination;
  if (nonlinear) {
    const double N = state.N();
    new_exposed = N > 0.0 ? new_exposed * state.S / N : 0.0;
    new_exposed = std::min(new_exposed, state.S);
    next.S = state.S - new_exposed;
  }

  const double to_I_by_rate = decay(next.n_E, params.K_EI, h, dt);
  const double to_R_by_rate = decay(next.n_I, params.K_IR, h, dt);
  const double E_atom = transport(next.n_E, c, new_exposed, h);
  const double I_atom = transport(next.n_I, c, to_I_by_rate + E_atom, h);
  next.R = state.R + to_R_by_rate + I_atom;
  next.t = state.t + dt;
  return next;
}

}  // namespace

double ModelParams::mu_at(double t) const {
  double mu = mu_schedule.empty() ? 0.0 : mu_schedule.front().mu;
  for (const auto& phase : mu_schedule)
    if (phase.start <= t) mu = phase.mu;
  return mu;
}

std::size_t grid_cells(double length, double h) {
  if (!(h > 0.0)) throw PreconditionError("grid step must be positive");
  if (length < 0.0) throw PreconditionError("negative domain length");
  const double ratio = length / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-6)
    throw PreconditionError("domain length " + std::to_string(length) +
                            " is not a multiple of h=" + std::to_string(h));
  return static_cast<std::size_t>(rounded);
}

ModelParams ModelParams::sampled(double h, double x_E_star, double x_I_star,
                                 const std::function<double(double)>& K_EI,
                                 const std::function<double(double)>& K_IR,
                                 const std::function<double(double)>& psi,
                                 std::vector<MuPhase> schedule) {
  ModelParams p;
  p.h = h;
  p.x_E_star = x_E_star;
  p.x_I_star = x_I_star;
  const auto mE = grid_cells(x_E_star, h);
  const auto mI = grid_cells(x_I_star, h);
  for (std::size_t k = 0; k < mE; ++k) p.K_EI.push_back(K_EI((k + 0.5) * h));
  for (std::size_t k = 0; k < mI; ++k) {
    p.K_IR.push_back(K_IR((k + 0.5) * h));
    p.psi.push_back(psi((k + 0.5) * h));
  }
  p.mu_schedule = std::move(schedule);
  validate(p);
  return p;
}

ModelParams ModelParams::constant(double h, double x_E_star, double x_I_star, double K_EI,
                                  double K_IR, double psi, std::vector<MuPhase> schedule) {
  return sampled(
      h, x_E_star, x_I_star, [=](double) { return K_EI; }, [=](double) { return K_IR; },
      [=](double) { return psi; }, std::move(schedule));
}

void validate(const ModelParams& p) {
  if (!(p.x_I_star > 0.0)) throw PreconditionError("x_I_star must be positive");
  if (p.x_E_star < 0.0) throw PreconditionError("x_E_star must be nonnegative");
  if (p.K_EI.size() != grid_cells(p.x_E_star, p.h))
    throw PreconditionError("K_EI sample count does not match the E grid");
  if (p.K_IR.size() != grid_cells(p.x_I_star, p.h) || p.psi.size() != p.K_IR.size())
    throw PreconditionError("K_IR/psi sample count does not match the I grid");
  auto nonneg = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
  };
  if (!nonneg(p.K_EI) || !nonneg(p.K_IR) || !nonneg(p.psi))
    throw PreconditionError("rate samples must be finite and nonnegative");
  if (std::none_of(p.psi.begin(), p.psi.end(), [](double x) { return x > 0.0; }))
    throw PreconditionError("psi is identically zero");
  if (p.mu_schedule.empty() || p.mu_schedule.front().start != 0.0)
    throw PreconditionError("mu schedule must start at t = 0");
  for (std::size_t i = 0; i < p.mu_schedule.size(); ++i) {
    if (!(p.mu_schedule[i].mu > 0.0)) throw PreconditionError("mu must be positive");
    if (i > 0 && !(p.mu_schedule[i].start > p.mu_schedule[i - 1].start))
      throw PreconditionError("mu schedule start times must be strictly increasing");
  }
}

double DensityState::E() const { return rectangle(n_E, h); }
double DensityState::I() const { return rectangle(n_I, h); }

DensityState DensityState::zeros(const ModelParams& params, double S) {
  DensityState s;
  s.h = params.h;
  s.n_E.assign(params.cells_E(), 0.0);
  s.n_I.assign(params.cells_I(), 0.0);
  s.S = S;
  return s;
}

ObservableKernel ObservableKernel::total_infectious(const ModelParams& params) {
  ObservableKernel k;
  k.weights.assign(params.cells_I(), 1.0);
  return k;
}

ObservableKernel ObservableKernel::pure_delay(double age, double mass) {
  ObservableKernel k;
  k.point_masses.push_back({age, mass});
  return k;
}

DensityState step_linear(const DensityState& state, const ModelParams& params, double dt) {
  check_step(state, params, dt);
  return advance(state, params, dt, params.mu_at(state.t), false);
}

DensityState step_nonlinear(const DensityState& state, const ModelParams& params, double dt) {
  check_step(state, params, dt);
  if (state.S < 0.0) throw PreconditionError("step_nonlinear: S must be nonnegative");
  return advance(state, params, dt, params.mu_at(state.t), true);
}

double observe(const DensityState& state, const ObservableKernel& kernel) {
  const auto& n = state.n_I;
  if (!kernel.weights.empty() && kernel.weights.size() != n.size())
    throw PreconditionError("observe: kernel grid does not match state grid");
  double y = 0.0;
  for (std::size_t k = 0; k < kernel.weights.size(); ++k) y += kernel.weights[k] * n[k];
  y *= state.h;
  const double x_max = state.h * static_cast<double>(n.size());
  for (const auto& pm : kernel.point_masses) {
    if (pm.age < 0.0 || pm.age > x_max + kGridTol)
      throw PreconditionError("observe: point mass outside [0, x_I_star]");
    if (n.empty()) continue;
    // Cell k is centred at (k + 1/2) h.
    const double pos = pm.age / state.h - 0.5;
    double value;
    if (pos <= 0.0) {
      value = n.front();
    } else if (pos >= static_cast<double>(n.size() - 1)) {
      value = n.back();
    } else {
      const auto k = static_cast<std::size_t>(pos);
      const double w = pos - static_cast<double>(k);
      value = (1.0 - w) * n[k] + w * n[k + 1];
    }
    y += pm.mass * value;
  }
  return y;
}

Trajectory simulate(const ModelParams& params, const DensityState& init,
                    const ObservableKernel& kernel, const SimulationOptions& options) {
  validate(params);
  if (options.horizon < 0.0) throw PreconditionError("simulate: horizon must be nonnegative");
  check_step(init, params, options.dt);
  const double dt = options.dt;

  Trajectory traj;
  std::vector<long long> switch_step;
  for (const auto& phase : params.mu_schedule) {
    const auto s = std::llround(phase.start / dt);
    traj.max_switch_snap = std::max(traj.max_switch_snap, std::abs(s * dt - phase.start));
    switch_step.push_back(s);
  }
  auto mu_for_step = [&](long long n) {
    double mu = params.mu_schedule.front().mu;
    for (std::size_t j = 0; j < switch_step.size(); ++j)
      if (switch_step[j] <= n) mu = params.mu_schedule[j].mu;
    return mu;
  };

  const long long total = std::llround(options.horizon / dt);
  DensityState state = init;
  state.t = 0.0;
  long long next_day = 0;
  auto maybe_record = [&](long long n) {
    while (next_day <= static_cast<long long>(std::floor(options.horizon + 1e-9)) &&
           std::llround(next_day / dt) == n) {
      traj.points.push_back({state.t, state, observe(state, kernel)});
      ++next_day;
    }
  };
  maybe_record(0);
  for (long long n = 0; n < total; ++n) {
    state = advance(state, params, dt, mu_for_step(n), options.nonlinear);
    state.t = static_cast<double>(n + 1) * dt;
    maybe_record(n + 1);
  }
  return traj;
}

std::vector<SeirPoint> seir_ode(const SeirRates& r, const SeirPoint& init, double horizon,
                                double dt, bool linearized) {
  if (!(r.K_IE > 0.0 && r.K_EI > 0.0 && r.K_IR > 0.0))
    throw PreconditionError("seir_ode: rates must be positive");
  if (init.S < 0.0 || init.E < 0.0 || init.I < 0.0 || init.R < 0.0)
    throw PreconditionError("seir_ode: initial state must be nonnegative");
  if (!(dt > 0.0) || horizon < 0.0) throw PreconditionError("seir_ode: bad dt or horizon");

  using V = std::array<double, 4>;
  auto rhs = [&](const V& y) {
    const double N = y[0] + y[1] + y[2] + y[3];
    const double frac = linearized ? 1.0 : (N > 0.0 ? y[0] / N : 0.0);
    const double infection = frac * r.K_IE * y[2];
    return V{linearized ? 0.0 : -infection, infection - r.K_EI * y[1],
             r.K_EI * y[1] - r.K_IR * y[2], r.K_IR * y[2]};
  };
  auto axpy = [](const V& y, double a, const V& k) {
    return V{y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3]};
  };

  std::vector<SeirPoint> out;
  V y{init.S, init.E, init.I, init.R};
  const long long steps = std::llround(horizon / dt);
  out.push_back({0.0, y[0], y[1], y[2], y[3]});
  for (long long n = 0; n < steps; ++n) {
    const V k1 = rhs(y);
    const V k2 = rhs(axpy(y, dt / 2, k1));
    const V k3 = rhs(axpy(y, dt / 2, k2));
    const V k4 = rhs(axpy(y, dt, k3));
    for (int i = 0; i < 4; ++i) y[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    out.push_back({static_cast<double>(n + 1) * dt, y[0], y[1], y[2], y[3]});
  }
  return out;
}

double seir_linear_growth_rate(const SeirRates& r) {
  const double a = r.K_EI, b = r.K_IE, c = r.K_IR;
  return 0.5 * (-(a + c) + std::sqrt((a - c) * (a - c) + 4.0 * a * b));
}

}  // namespace epimon
