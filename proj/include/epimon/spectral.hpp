#pragma once

#include <span>
#include <vector>

#include "epimon/pde.hpp"

namespace epimon {

/// Perron eigenpair of the constant-control transport model, sampled at the
/// left node x_k = k h of every grid cell and normalised by n_E_bar(0) = 1
/// (by n_I_bar(0) = 1 when the E compartment is empty).
struct EigenSolution {
  double lambda = 0.0;
  double mu = 0.0;
  double h = 0.0;
  std::vector<double> n_E_bar;
  std::vector<double> n_I_bar;
  double n_E_at_x_E_star = 1.0;  // n_E_bar(x_E_star), the atom feeding I
  double residual = 0.0;         // |mu G^lambda - 1|

  /// (n_E_bar, n_I_bar) concatenated, the layout used for Hilbert distances.
  std::vector<double> concatenated() const;
};

struct TropicalBound {
  double delta = 0.0;
  std::vector<double> per_hop;  // d_H(v0,u1), d_H(u1,u2), ...
};

/// log G^lambda. Rates and psi are integrated exactly as piecewise-constant
/// functions on the grid, so F^lambda is piecewise linear.
double log_characteristic_value(const ModelParams& params, double lambda);

/// G^lambda = (int psi e^{-F_IR}) (int K_EI e^{-F_EI} + e^{-F_EI(x_E*)}).
double characteristic_value(const ModelParams& params, double lambda);

struct EigenOptions {
  double tolerance = 1e-10;  // on |mu G^lambda - 1|
  double bracket_lo = -5.0;
  double bracket_hi = 5.0;
  int max_expansions = 60;
};

/// Solves mu G^lambda = 1 by bracketing and bisection. Throws NumericalError
/// if no bracket is found.
double perron_eigenvalue(const ModelParams& params, double mu, const EigenOptions& options = {});

EigenSolution eigenvector(const ModelParams& params, double lambda, double mu = 0.0);

/// Eigenvalue and eigenvector for a given control value.
EigenSolution perron_solution(const ModelParams& params, double mu,
                              const EigenOptions& options = {});

/// Hilbert projective distance between entrywise-positive vectors.
double hilbert_distance(std::span<const double> v, std::span<const double> w);

/// Sum of Hilbert distances along v0, u^1, u^2, ... (concatenated layouts).
TropicalBound tropical_bound_delta(std::span<const double> v0,
                                   std::span<const EigenSolution> eigvecs);

/// Upper bound |lambda1 - lambda2| (x_E* + x_I*) on d_H between two eigenvectors.
double eigenvector_distance_bound(const ModelParams& params, double lambda1, double lambda2);

/// ln 2 / lambda; +inf at zero; negative values denote halving times.
double doubling_time(double lambda);

}  // namespace epimon
