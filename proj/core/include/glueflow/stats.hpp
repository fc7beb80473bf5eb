#pragma once

#include <vector>

namespace glueflow {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Common slope across groups, each with its own intercept.
double pooled_slope(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y);

}  // namespace glueflow
