#pragma once

#include <functional>
#include <vector>

#include "glueflow/types.hpp"

namespace glueflow {

// Polynomial in (dy, dz) of total degree <= degree().
class BivariatePolynomial {
 public:
  BivariatePolynomial() = default;
  explicit BivariatePolynomial(int degree);

  int degree() const { return degree_; }
  // Coefficient of dy^a dz^b.
  double coefficient(int a, int b) const;
  void set_coefficient(int a, int b, double c);
  double evaluate(Fiber d) const;

  // Sum of |c_ab| over a + b = j.
  double degree_norm(int j) const;

  friend bool operator==(const BivariatePolynomial&, const BivariatePolynomial&) = default;

 private:
  static std::size_t index(int a, int b);

  int degree_ = 0;
  std::vector<double> coeffs_ = {0.0};
};

// sum of (v_i - w0_i)^(2k+2)
double jet_weight(Fiber d, int k);

// 2 + P(v - w0) * exp(-a0 * jet_weight(v - w0, k)).
struct JetMatchedFunction {
  Fiber w0;
  int k = 1;
  BivariatePolynomial P;
  double a0 = 1.0;

  double mu(Fiber v) const;
  double operator()(Fiber v) const { return 2.0 + mu(v); }

  friend bool operator==(const JetMatchedFunction&, const JetMatchedFunction&) = default;
};

struct TaylorResult {
  BivariatePolynomial poly;
  double step = 0.0;
  // (probe radius, max |fn - P| on the ring) pairs used for the residual check.
  std::vector<std::pair<double, double>> residuals;
  double residual_slope = 0.0;
  bool residual_at_floor = false;
};

struct TaylorOptions {
  double step = 1e-2;
  // Largest radius the stencil and probe ring may reach.
  double max_radius = 4e-2;
  double residual_floor = 1e-11;
};

// Taylor coefficients of fn at w0 up to total degree k, from central
// differences at steps h, h/2, h/4 combined by two Richardson levels.
TaylorResult taylor_poly(const std::function<double(Fiber)>& fn, Fiber w0, int k,
                         const TaylorOptions& options = {});

struct Lambda0Diagnostics {
  double grid_min = 0.0;
  double grid_max = 0.0;
  // Analytic bound on |mu - P(0) e^{-a0 Q}| over the whole plane.
  double analytic_bound = 0.0;
  int doublings = 0;
};

// Chooses a0 by doubling from 1 until 2 + P e^{-a0 Q} maps into (1, 4):
// checked on a 201 x 201 grid over the radius-10 square and by an analytic
// bound valid on all of R^2.
JetMatchedFunction build_lambda0(const BivariatePolynomial& P, int k, Fiber w0,
                                 Lambda0Diagnostics* diagnostics = nullptr);

// First-row Fornberg weights for the derivative of the given order on the
// symmetric stencil {-p..p} * h with h = 1.
std::vector<double> central_weights(int order, int half_width);

}  // namespace glueflow
