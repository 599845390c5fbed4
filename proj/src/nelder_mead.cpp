#include "epimon/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epimon/errors.hpp"

namespace epimon {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, std::span<const double> step,
                             const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  if (step.size() != n) throw PreconditionError("nelder_mead: step size mismatch");
  if (n == 0) return {x0, f(x0), 0, true};

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> fx(n + 1);
  for (std::size_t j = 0; j <= n; ++j) fx[j] = f(simplex[j]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> s(n + 1);
    std::vector<double> v(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      s[j] = std::move(simplex[order[j]]);
      v[j] = fx[order[j]];
    }
    simplex = std::move(s);
    fx = std::move(v);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        d = std::max(d, std::abs(simplex[j][i] - simplex[0][i]));
    return d;
  };
  auto along = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = from[i] + t * (to[i] - from[i]);
    return p;
  };

  NelderMeadResult result;
  int iter = 0;
  sort_simplex();
  for (; iter < opt.max_iterations; ++iter) {
    if (diameter() < opt.diameter_tolerance) {
      result.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[j][i] / static_cast<double>(n);

    const auto xr = along(centroid, simplex[n], -opt.reflection);
    const double fr = f(xr);
    if (fr < fx[0]) {
      const auto xe = along(centroid, simplex[n], -opt.reflection * opt.expansion);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fx[n] = fe;
      } else {
        simplex[n] = xr;
        fx[n] = fr;
      }
    } else if (fr < fx[n - 1]) {
      simplex[n] = xr;
      fx[n] = fr;
    } else {
      const bool outside = fr < fx[n];
      const auto xc = outside ? along(centroid, xr, opt.contraction)
                              : along(centroid, simplex[n], opt.contraction);
      const double fc = f(xc);
      if (fc < (outside ? fr : fx[n])) {
        simplex[n] = xc;
        fx[n] = fc;
      } else {
        for (std::size_t j = 1; j <= n; ++j) {
          simplex[j] = along(simplex[0], simplex[j], opt.shrink);
          fx[j] = f(simplex[j]);
        }
      }
    }
    sort_simplex();
  }
  if (!result.converged && diameter() < opt.diameter_tolerance) result.converged = true;
  result.x = simplex[0];
  result.value = fx[0];
  result.iterations = iter;
  return result;
}

}  // namespace epimon
