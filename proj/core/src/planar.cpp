#include "glueflow/planar.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "glueflow/errors.hpp"

namespace glueflow {

namespace odeint = boost::numeric::odeint;

Fiber h0_flow(double t, Fiber v) {
  const double ep = std::exp(t);
  const double em = std::exp(-t);
  if (!std::isfinite(ep) || !std::isfinite(em)) {
    std::ostringstream os;
    os << "h0_flow: exp(" << t << ") is outside the floating range";
    throw RangeError(os.str());
  }
  return {ep * v.y, em * v.z};
}

double q0(Fiber v) { return -std::expm1(-(v.y * v.y + v.z * v.z)); }

PsiMap::PsiMap(int k, Fiber w0, double ode_tolerance) : k_(k), w0_(w0), tol_(ode_tolerance) {
  if (k < 1) throw PreconditionError("PsiMap: k must be a positive integer");
  if (!(ode_tolerance > 0.0)) throw PreconditionError("PsiMap: ode_tolerance must be positive");
  if (!finite(w0)) throw PreconditionError("PsiMap: w0 must be finite");
}

double PsiMap::hyperbolic_time(Fiber v, double sign) const {
  const Fiber d = v - w0_;
  const double g0 = std::pow(q0(d), k_);
  if (g0 == 0.0) return 0.0;

  const int k = k_;
  auto rhs = [&](const std::array<double, 1>& u, std::array<double, 1>& du, double) {
    const double s = g0 * u[0];
    const Fiber p{d.y * std::exp(s), d.z * std::exp(-s)};
    du[0] = sign * std::pow(q0(p), k) / g0;
  };

  std::array<double, 1> u{0.0};
  // RKF78's embedded estimate nearly vanishes for this right-hand side and
  // lets through errors far above the requested tolerance; dopri5 does not.
  using Stepper = odeint::runge_kutta_dopri5<std::array<double, 1>>;
  // The fiber moves by |d| e^s ds for an error ds in s, and the global error
  // runs well above the per-step tolerance. Far fibers are capped at the
  // resolution of u itself.
  const double tol = std::max(1e-3 * tol_ / std::max(1.0, norm(d)), 1e-15);
  try {
    odeint::integrate_adaptive(odeint::make_controlled<Stepper>(tol, tol), rhs, u, 0.0, 1.0, 0.05);
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "psi integration failed at (" << v.y << ", " << v.z << "): " << e.what();
    throw NumericalError(os.str());
  }
  const double s = g0 * u[0];
  if (!std::isfinite(s)) {
    std::ostringstream os;
    os << "psi integration produced a non-finite value at (" << v.y << ", " << v.z << ")";
    throw NumericalError(os.str());
  }
  return s;
}

Fiber PsiMap::displacement(Fiber v) const {
  const Fiber d = v - w0_;
  const double s = hyperbolic_time(v, 1.0);
  return {d.y * std::expm1(s), d.z * std::expm1(-s)};
}

Fiber PsiMap::inverse_displacement(Fiber v) const {
  const Fiber d = v - w0_;
  const double s = hyperbolic_time(v, -1.0);
  return {d.y * std::expm1(s), d.z * std::expm1(-s)};
}

Fiber PsiMap::apply(Fiber v) const { return v + displacement(v); }

Fiber PsiMap::inverse(Fiber v) const { return v + inverse_displacement(v); }

Fiber PsiMap::iterate(Fiber v, long m, long cap) const {
  if (std::labs(m) > cap) {
    throw IterationCapError("psi_iterate: |m| = " + std::to_string(std::labs(m)) +
                            " exceeds cap " + std::to_string(cap));
  }
  for (long i = 0; i < std::labs(m); ++i) v = m > 0 ? apply(v) : inverse(v);
  return v;
}

long escape_count(const DiskPair& pair, Fiber v, Disk disk, Direction direction, long cap) {
  const bool forward = direction == Direction::Forward;
  if (forward && pair.distance_to_ZV(v) < kMembershipBand) {
    throw NoEscapeError("escape_count: fiber lies on the vertical axis, forward orbit never escapes");
  }
  if (!forward && pair.distance_to_ZH(v) < kMembershipBand) {
    throw NoEscapeError("escape_count: fiber lies on the horizontal axis, backward orbit never escapes");
  }
  const PsiMap& psi = pair.psi();
  auto step = [&](Fiber u) { return forward ? psi.apply(u) : psi.inverse(u); };

  // u in Bstar iff psi^-1(u) in B0, so Bstar is tested one iterate behind.
  Fiber probe = v;
  if (disk == Disk::Bstar && !forward) probe = psi.inverse(v);
  for (long m = 1; m <= cap; ++m) {
    if (disk == Disk::B0 || !forward) probe = step(probe);
    if (!pair.in_B0(probe)) return m;
    if (disk == Disk::Bstar && forward) probe = step(probe);
  }
  throw IterationCapError("escape_count: no escape within " + std::to_string(cap) + " iterates");
}

}  // namespace glueflow
