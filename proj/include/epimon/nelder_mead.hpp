#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace epimon {

struct NelderMeadOptions {
  int max_iterations = 2000;
  double diameter_tolerance = 1e-8;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // simplex diameter fell below tolerance
};

/// Downhill simplex minimisation. The initial simplex is x0 plus one vertex
/// per coordinate displaced by step[i]. Never returns a point worse than x0.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, std::span<const double> step,
                             const NelderMeadOptions& options = {});

}  // namespace epimon
