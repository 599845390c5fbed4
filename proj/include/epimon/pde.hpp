#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace epimon {

/// Piecewise-constant control mu(t): each phase starts at `start` and lasts
/// until the next phase begins.
struct MuPhase {
  double start = 0.0;
  double mu = 0.0;
};

/// Transport SEIR model sampled on a uniform cell grid of step h.
///
/// Cell k of a compartment covers ages [k h, (k+1) h); the E grid has
/// round(x_E_star / h) cells and the I grid round(x_I_star / h) cells.
/// Rates and psi are constant within a cell.
struct ModelParams {
  double h = 0.05;
  double x_E_star = 0.0;
  double x_I_star = 1.0;
  std::vector<double> K_EI;  // E -> I rate per E cell (1/day)
  std::vector<double> K_IR;  // I -> R rate per I cell (1/day)
  std::vector<double> psi;   // infectiosity profile per I cell (1/day)
  std::vector<MuPhase> mu_schedule;

  std::size_t cells_E() const { return K_EI.size(); }
  std::size_t cells_I() const { return K_IR.size(); }
  double mu_at(double t) const;

  /// Samples rate functions at cell midpoints.
  static ModelParams sampled(double h, double x_E_star, double x_I_star,
                             const std::function<double(double)>& K_EI,
                             const std::function<double(double)>& K_IR,
                             const std::function<double(double)>& psi,
                             std::vector<MuPhase> schedule);
  static ModelParams constant(double h, double x_E_star, double x_I_star, double K_EI,
                              double K_IR, double psi, std::vector<MuPhase> schedule);
};

// Throws PreconditionError on violated invariants (grid, signs, schedule).
void validate(const ModelParams& params);

/// Number of grid cells covering [0, length] with step h; throws if length is
/// not a multiple of h.
std::size_t grid_cells(double length, double h);

struct DensityState {
  double h = 0.05;
  std::vector<double> n_E;
  std::vector<double> n_I;
  double S = 0.0;
  double R = 0.0;
  double t = 0.0;

  double E() const;  // rectangle rule over n_E
  double I() const;
  double N() const { return S + E() + I() + R; }

  /// Zero densities on the grids of `params`.
  static DensityState zeros(const ModelParams& params, double S = 0.0);
};

/// Density part plus point masses of a nonnegative measure on [0, x_I_star].
struct ObservableKernel {
  struct PointMass {
    double age = 0.0;
    double mass = 0.0;
  };
  std::vector<double> weights;  // per I cell; empty means no density part
  std::vector<PointMass> point_masses;

  static ObservableKernel total_infectious(const ModelParams& params);
  static ObservableKernel pure_delay(double age, double mass);
};

/// One explicit upwind step of the linearized system (S/N taken as 1, S held).
DensityState step_linear(const DensityState& state, const ModelParams& params, double dt);

/// Same scheme with contamination scaled by S/N and S depleted accordingly.
DensityState step_nonlinear(const DensityState& state, const ModelParams& params, double dt);

/// Y = integral of n_I against the kernel; point masses read n_I by linear
/// interpolation between cell centres.
double observe(const DensityState& state, const ObservableKernel& kernel);

struct TrajectoryPoint {
  double t = 0.0;
  DensityState state;
  double Y = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // one per whole day, starting at t = 0
  double max_switch_snap = 0.0;        // largest |snapped - requested| switch time
};

struct SimulationOptions {
  double horizon = 0.0;
  double dt = 0.05;
  bool nonlinear = false;
};

/// Switched evolution: mu follows params.mu_schedule with switch instants
/// snapped to the nearest step. Records the state and observable each day.
Trajectory simulate(const ModelParams& params, const DensityState& init,
                    const ObservableKernel& kernel, const SimulationOptions& options);

// Classical SEIR ODE with constant rates.
struct SeirRates {
  double K_IE = 0.0;  // contamination
  double K_EI = 0.0;  // incubation exit
  double K_IR = 0.0;  // removal
};

struct SeirPoint {
  double t = 0.0;
  double S = 0.0, E = 0.0, I = 0.0, R = 0.0;
};

/// RK4 integration; samples every step. With `linearized`, S/N is fixed to 1.
std::vector<SeirPoint> seir_ode(const SeirRates& rates, const SeirPoint& init, double horizon,
                                double dt, bool linearized = false);

/// Dominant eigenvalue of the Metzler (E, I) block with S/N = 1:
/// [[-K_EI, K_IE], [K_EI, -K_IR]].
double seir_linear_growth_rate(const SeirRates& rates);

}  // namespace epimon
