#include "epimon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "epimon/errors.hpp"

namespace epimon {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log((1 - e^{-z}) / z), stable for all real z.
double log_phi(double z) {
  if (std::abs(z) < 1e-8) return -0.5 * z;
  if (z > 0.0) return std::log(-std::expm1(-z)) - std::log(z);
  const double w = -z;
  return w + std::log(-std::expm1(-w)) - std::log(w);
}

class LogSum {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }
  double value() const { return sum_ > 0.0 ? max_ + std::log(sum_) : kNegInf; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

// Exact integral over cell k of rate_k * exp(-F(x)), in log form, with F
// piecewise linear of slope a_k = lambda + K_k and F(x_k) = F_k.
double log_cell_integral(double log_weight, double F_k, double a_k, double h) {
  return log_weight - F_k + std::log(h) + log_phi(a_k * h);
}

struct Factors {
  double log_A;  // log of int psi e^{-F_IR}
  double log_B;  // log of int K_EI e^{-F_EI} + e^{-F_EI(x_E*)}
};

Factors factors(const ModelParams& p, double lambda) {
  const double h = p.h;
  LogSum b;
  double F = 0.0;
  for (std::size_t k = 0; k < p.cells_E(); ++k) {
    const double a = lambda + p.K_EI[k];
    if (p.K_EI[k] > 0.0) b.add(log_cell_integral(std::log(p.K_EI[k]), F, a, h));
    F += a * h;
  }
  b.add(-F);
  LogSum a_sum;
  F = 0.0;
  for (std::size_t k = 0; k < p.cells_I(); ++k) {
    const double a = lambda + p.K_IR[k];
    if (p.psi[k] > 0.0) a_sum.add(log_cell_integral(std::log(p.psi[k]), F, a, h));
    F += a * h;
  }
  return {a_sum.value(), b.value()};
}

}  // namespace

std::vector<double> EigenSolution::concatenated() const {
  std::vector<double> v(n_E_bar);
  v.insert(v.end(), n_I_bar.begin(), n_I_bar.end());
  return v;
}

double log_characteristic_value(const ModelParams& params, double lambda) {
  const auto f = factors(params, lambda);
  return f.log_A + f.log_B;
}

double characteristic_value(const ModelParams& params, double lambda) {
  validate(params);
  return std::exp(log_characteristic_value(params, lambda));
}

double perron_eigenvalue(const ModelParams& params, double mu, const EigenOptions& opt) {
  validate(params);
  if (!(mu > 0.0)) throw PreconditionError("perron_eigenvalue: mu must be positive");
  const double log_mu = std::log(mu);
  auto f = [&](double lambda) { return log_mu + log_characteristic_value(params, lambda); };

  double lo = opt.bracket_lo, hi = opt.bracket_hi;
  double f_lo = f(lo), f_hi = f(hi);
  int expansions = 0;
  while (f_lo < 0.0) {
    if (++expansions > opt.max_expansions)
      throw NumericalError("perron_eigenvalue: cannot bracket root from below");
    hi = lo;
    f_hi = f_lo;
    lo -= 2.0 * (opt.bracket_hi - opt.bracket_lo) * expansions;
    f_lo = f(lo);
  }
  while (f_hi > 0.0) {
    if (++expansions > opt.max_expansions)
      throw NumericalError("perron_eigenvalue: cannot bracket root from above");
    lo = hi;
    f_lo = f_hi;
    hi += 2.0 * (opt.bracket_hi - opt.bracket_lo) * expansions;
    f_hi = f(hi);
  }
  if (std::abs(std::expm1(f_lo)) <= opt.tolerance) return lo;
  if (std::abs(std::expm1(f_hi)) <= opt.tolerance) return hi;

  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (std::abs(std::expm1(f_mid)) <= opt.tolerance && hi - lo < 1e-12) return mid;
    if (f_mid > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) {
      if (std::abs(std::expm1(f(0.5 * (lo + hi)))) <= opt.tolerance) return 0.5 * (lo + hi);
      break;
    }
  }
  throw NumericalError("perron_eigenvalue: bisection did not reach the residual tolerance");
}

EigenSolution eigenvector(const ModelParams& params, double lambda, double mu) {
  validate(params);
  const double h = params.h;
  EigenSolution sol;
  sol.lambda = lambda;
  sol.mu = mu;
  sol.h = h;
  double F = 0.0;
  for (std::size_t k = 0; k < params.cells_E(); ++k) {
    sol.n_E_bar.push_back(std::exp(-F));
    F += (lambda + params.K_EI[k]) * h;
  }
  sol.n_E_at_x_E_star = std::exp(-F);
  const auto f = factors(params, lambda);
  const double n_I0 = std::exp(f.log_B);
  F = 0.0;
  for (std::size_t k = 0; k < params.cells_I(); ++k) {
    sol.n_I_bar.push_back(n_I0 * std::exp(-F));
    F += (lambda + params.K_IR[k]) * h;
  }
  sol.residual = mu > 0.0 ? std::abs(std::expm1(std::log(mu) + f.log_A + f.log_B)) : 0.0;
  return sol;
}

EigenSolution perron_solution(const ModelParams& params, double mu, const EigenOptions& options) {
  return eigenvector(params, perron_eigenvalue(params, mu, options), mu);
}

double hilbert_distance(std::span<const double> v, std::span<const double> w) {
  if (v.size() != w.size()) throw PreconditionError("hilbert_distance: length mismatch");
  if (v.empty()) throw PreconditionError("hilbert_distance: empty vectors");
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] > 0.0) || !(w[k] > 0.0))
      throw PreconditionError("hilbert_distance: entries must be positive");
    const double r = std::log(v[k]) - std::log(w[k]);
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  return hi - lo;
}

TropicalBound tropical_bound_delta(std::span<const double> v0,
                                   std::span<const EigenSolution> eigvecs) {
  TropicalBound out;
  std::vector<double> prev(v0.begin(), v0.end());
  for (const auto& u : eigvecs) {
    auto cur = u.concatenated();
    out.per_hop.push_back(hilbert_distance(prev, cur));
    out.delta += out.per_hop.back();
    prev = std::move(cur);
  }
  return out;
}

double eigenvector_distance_bound(const ModelParams& params, double lambda1, double lambda2) {
  return std::abs(lambda1 - lambda2) * (params.x_E_star + params.x_I_star);
}

double doubling_time(double lambda) {
  if (lambda == 0.0) return std::numeric_limits<double>::infinity();
  return std::numbers::ln2 / lambda;
}

}  // namespace epimon
