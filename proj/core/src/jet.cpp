#include "glueflow/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "glueflow/errors.hpp"
#include "glueflow/stats.hpp"

namespace glueflow {

BivariatePolynomial::BivariatePolynomial(int degree)
    : degree_(degree), coeffs_(index(0, degree) + 1, 0.0) {
  if (degree < 0) throw PreconditionError("BivariatePolynomial: negative degree");
}

std::size_t BivariatePolynomial::index(int a, int b) {
  const auto n = static_cast<std::size_t>(a + b);
  return n * (n + 1) / 2 + static_cast<std::size_t>(b);
}

double BivariatePolynomial::coefficient(int a, int b) const {
  if (a < 0 || b < 0 || a + b > degree_) return 0.0;
  return coeffs_[index(a, b)];
}

void BivariatePolynomial::set_coefficient(int a, int b, double c) {
  if (a < 0 || b < 0 || a + b > degree_) {
    throw PreconditionError("BivariatePolynomial: exponent outside degree");
  }
  coeffs_[index(a, b)] = c;
}

double BivariatePolynomial::evaluate(Fiber d) const {
  double sum = 0.0;
  double ya = 1.0;
  for (int a = 0; a <= degree_; ++a) {
    double zb = 1.0;
    for (int b = 0; a + b <= degree_; ++b) {
      sum += coeffs_[index(a, b)] * ya * zb;
      zb *= d.z;
    }
    ya *= d.y;
  }
  return sum;
}

double BivariatePolynomial::degree_norm(int j) const {
  double s = 0.0;
  for (int a = 0; a <= j; ++a) s += std::abs(coefficient(a, j - a));
  return s;
}

double jet_weight(Fiber d, int k) {
  const int m = 2 * k + 2;
  return std::pow(d.y, m) + std::pow(d.z, m);
}

double JetMatchedFunction::mu(Fiber v) const {
  const Fiber d = v - w0;
  return P.evaluate(d) * std::exp(-a0 * jet_weight(d, k));
}

std::vector<double> central_weights(int order, int half_width) {
  const int n = 2 * half_width + 1;
  if (order < 0 || order >= n) throw PreconditionError("central_weights: stencil too small for order");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = i - half_width;

  // c[i][m]: weight of node i for the m-th derivative at 0.
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int m = mn; m >= 1; --m) {
          c[i][m] = c1 * (m * c[i - 1][m - 1] - c5 * c[i - 1][m]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int m = mn; m >= 1; --m) c[j][m] = (c4 * c[j][m] - m * c[j][m - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

namespace {

int half_width_for(int order) { return (order + 1) / 2; }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// All partial derivatives of total order <= k at step h, from one tensor grid.
std::vector<double> difference_jet(const std::function<double(Fiber)>& fn, Fiber w0, int k, double h) {
  std::map<std::pair<int, int>, double> samples;
  auto sample = [&](int i, int j) {
    auto it = samples.find({i, j});
    if (it != samples.end()) return it->second;
    double value = 0.0;
    const Fiber at{w0.y + i * h, w0.z + j * h};
    try {
      value = fn(at);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "taylor_poly: stencil evaluation failed at (" << at.y << ", " << at.z << "): " << e.what();
      throw NumericalError(os.str());
    }
    samples.emplace(std::make_pair(i, j), value);
    return value;
  };

  std::vector<double> out;
  for (int n = 0; n <= k; ++n) {
    for (int b = 0; b <= n; ++b) {
      const int a = n - b;
      const int pa = half_width_for(a);
      const int pb = half_width_for(b);
      const auto wa = central_weights(a, pa);
      const auto wb = central_weights(b, pb);
      double sum = 0.0;
      for (int i = -pa; i <= pa; ++i) {
        if (wa[i + pa] == 0.0) continue;
        for (int j = -pb; j <= pb; ++j) {
          if (wb[j + pb] == 0.0) continue;
          sum += wa[i + pa] * wb[j + pb] * sample(i, j);
        }
      }
      out.push_back(sum / std::pow(h, n));
    }
  }
  return out;
}

}  // namespace

TaylorResult taylor_poly(const std::function<double(Fiber)>& fn, Fiber w0, int k,
                         const TaylorOptions& options) {
  if (k < 0) throw PreconditionError("taylor_poly: k must be non-negative");
  const double h = options.step;
  const auto d1 = difference_jet(fn, w0, k, h);
  const auto d2 = difference_jet(fn, w0, k, h / 2);
  const auto d4 = difference_jet(fn, w0, k, h / 4);

  TaylorResult result;
  result.step = h;
  result.poly = BivariatePolynomial(k);
  std::size_t idx = 0;
  for (int n = 0; n <= k; ++n) {
    for (int b = 0; b <= n; ++b, ++idx) {
      const int a = n - b;
      const double d = (64.0 * d4[idx] - 20.0 * d2[idx] + d1[idx]) / 45.0;
      result.poly.set_coefficient(a, b, d / (factorial(a) * factorial(b)));
    }
  }

  std::vector<double> log_r;
  std::vector<double> log_e;
  for (double r : {options.max_radius / 4, options.max_radius / 2, options.max_radius}) {
    double worst = 0.0;
    for (int q = 0; q < 8; ++q) {
      const double ang = (q + 0.5) * std::numbers::pi / 4;
      const Fiber d{r * std::cos(ang), r * std::sin(ang)};
      double value = 0.0;
      try {
        value = fn(w0 + d);
      } catch (const std::exception& e) {
        throw NumericalError(std::string("taylor_poly: probe evaluation failed: ") + e.what());
      }
      worst = std::max(worst, std::abs(value - result.poly.evaluate(d)));
    }
    result.residuals.emplace_back(r, worst);
    if (worst > options.residual_floor) {
      log_r.push_back(std::log(r));
      log_e.push_back(std::log(worst));
    }
  }
  if (log_r.size() < 2) {
    result.residual_at_floor = true;
    result.residual_slope = std::numeric_limits<double>::infinity();
    return result;
  }
  result.residual_slope = fit_line(log_r, log_e).slope;
  if (result.residual_slope < k + 1 - 0.5) {
    std::ostringstream os;
    os << "taylor_poly: residual slope " << result.residual_slope << " below " << k + 0.5;
    throw NumericalError(os.str());
  }
  return result;
}

JetMatchedFunction build_lambda0(const BivariatePolynomial& P, int k, Fiber w0,
                                 Lambda0Diagnostics* diagnostics) {
  const double c0 = P.coefficient(0, 0);
  if (std::abs(c0) > 1.0 + 1e-6 || c0 < -1e-6) {
    std::ostringstream os;
    os << "build_lambda0: P(0) = " << c0 << " outside [0, 1]";
    throw PreconditionError(os.str());
  }
  const int m = 2 * k + 2;
  // mu lies between min(c0,0) - B and max(c0,0) + B, where B bounds the
  // non-constant terms: |d^j| e^{-a Q} <= r^j e^{-a r^m / 2^k} peaks at
  // r^m = j 2^k / (a m).
  const double slack_high = 2.0 - std::max(c0, 0.0);
  const double slack_low = 1.0 + std::min(c0, 0.0);
  const double slack = std::min(slack_high, slack_low) - 1e-9;

  JetMatchedFunction fn{w0, k, P, 1.0};
  for (int doubling = 0; doubling <= 60; ++doubling) {
    const double a = std::ldexp(1.0, doubling);
    const double c = a / std::ldexp(1.0, k);
    double bound = 0.0;
    for (int j = 1; j <= P.degree(); ++j) {
      const double rj = std::pow(j / (c * m), 1.0 / m);
      bound += P.degree_norm(j) * std::pow(rj, j) * std::exp(-static_cast<double>(j) / m);
    }
    if (!(bound < slack)) continue;

    fn.a0 = a;
    double lo = kInf;
    double hi = -kInf;
    for (int i = 0; i <= 200; ++i) {
      for (int j = 0; j <= 200; ++j) {
        const Fiber v{w0.y - 10.0 + 0.1 * i, w0.z - 10.0 + 0.1 * j};
        const double value = fn(v);
        lo = std::min(lo, value);
        hi = std::max(hi, value);
      }
    }
    if (!(lo > 1.0 && hi < 4.0)) continue;
    if (diagnostics) *diagnostics = {lo, hi, bound, doubling};
    return fn;
  }
  throw NumericalError("build_lambda0: no valid a0 up to 2^60");
}

}  // namespace glueflow
