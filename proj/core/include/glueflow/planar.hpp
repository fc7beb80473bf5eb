#pragma once

#include "glueflow/types.hpp"

namespace glueflow {

inline constexpr long kDefaultIterationCap = 1'000'000;

// Closed-form flow of the hyperbolic field (y, -z).
Fiber h0_flow(double t, Fiber v);

// 1 - exp(-y^2 - z^2), computed without cancellation near the origin.
double q0(Fiber v);

// Time-one map of q0^k * (y, -z), conjugated by translation to w0.
//
// Orbits of q0^k * (y, -z) stay on the hyperbola through the starting point,
// so the map reduces to a scalar ODE for the hyperbolic time s along
// (y e^s, z e^-s). The ODE is integrated in the scaled variable s / s'(0),
// which keeps full relative accuracy for points very close to w0.
class PsiMap {
 public:
  PsiMap() = default;
  PsiMap(int k, Fiber w0, double ode_tolerance = kDefaultOdeTolerance);

  int k() const { return k_; }
  Fiber w0() const { return w0_; }
  double ode_tolerance() const { return tol_; }

  Fiber apply(Fiber v) const;
  Fiber inverse(Fiber v) const;

  // psi(v) - v and psi^-1(v) - v without cancellation.
  Fiber displacement(Fiber v) const;
  Fiber inverse_displacement(Fiber v) const;

  // Hyperbolic time travelled by v under psi (sign = +1) or psi^-1 (sign = -1).
  double hyperbolic_time(Fiber v, double sign) const;

  Fiber iterate(Fiber v, long m, long cap = kDefaultIterationCap) const;

  friend bool operator==(const PsiMap&, const PsiMap&) = default;

 private:
  int k_ = 1;
  Fiber w0_;
  double tol_ = kDefaultOdeTolerance;
};

inline Fiber psi_at(const PsiMap& map, Fiber v) { return map.apply(v); }
inline Fiber psi_inverse_at(const PsiMap& map, Fiber v) { return map.inverse(v); }
inline Fiber psi_iterate(const PsiMap& map, Fiber v, long m, long cap = kDefaultIterationCap) {
  return map.iterate(v, m, cap);
}

enum class Disk { B0, Bstar };

// B0 / C0 are the closed unit disk and unit circle around w0; Bstar / Cstar
// are their images under psi.
class DiskPair {
 public:
  DiskPair() = default;
  explicit DiskPair(PsiMap psi) : psi_(psi) {}

  const PsiMap& psi() const { return psi_; }
  Fiber w0() const { return psi_.w0(); }

  double zeta0(Fiber v) const {
    const Fiber d = v - psi_.w0();
    return d.y * d.y + d.z * d.z - 1.0;
  }
  double zeta_star(Fiber v) const { return zeta0(psi_.inverse(v)); }

  bool in_B0(Fiber v) const { return zeta0(v) <= 0.0; }
  bool on_C0(Fiber v) const { return std::abs(zeta0(v)) < kMembershipBand; }
  bool in_Bstar(Fiber v) const { return zeta_star(v) <= 0.0; }
  bool on_Cstar(Fiber v) const { return std::abs(zeta_star(v)) < kMembershipBand; }
  bool in(Disk disk, Fiber v) const { return disk == Disk::B0 ? in_B0(v) : in_Bstar(v); }

  // Distances to the horizontal and vertical axes through w0.
  double distance_to_ZH(Fiber v) const { return std::abs(v.z - psi_.w0().z); }
  double distance_to_ZV(Fiber v) const { return std::abs(v.y - psi_.w0().y); }

  friend bool operator==(const DiskPair&, const DiskPair&) = default;

 private:
  PsiMap psi_;
};

inline double zeta_star(const DiskPair& pair, Fiber v) { return pair.zeta_star(v); }

// Least m >= 1 such that psi^(+-m)(v) leaves the disk.
long escape_count(const DiskPair& pair, Fiber v, Disk disk, Direction direction,
                  long cap = kDefaultIterationCap);

}  // namespace glueflow
