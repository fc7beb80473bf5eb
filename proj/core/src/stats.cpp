#include "glueflow/stats.hpp"

#include <cmath>

#include "glueflow/errors.hpp"

namespace glueflow {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit_line: need two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.slope * x[i] - fit.intercept;
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

double pooled_slope(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y) {
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t g = 0; g < x.size(); ++g) {
    if (x[g].size() < 2) continue;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x[g].size(); ++i) {
      mx += x[g][i];
      my += y[g][i];
    }
    mx /= static_cast<double>(x[g].size());
    my /= static_cast<double>(x[g].size());
    for (std::size_t i = 0; i < x[g].size(); ++i) {
      sxx += (x[g][i] - mx) * (x[g][i] - mx);
      sxy += (x[g][i] - mx) * (y[g][i] - my);
    }
  }
  if (sxx == 0.0) throw PreconditionError("pooled_slope: no group with two or more points");
  return sxy / sxx;
}

}  // namespace glueflow
