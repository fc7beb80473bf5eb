#pragma once

#include <cmath>
#include <limits>

namespace glueflow {

struct Fiber {
  double y = 0.0;
  double z = 0.0;

  friend Fiber operator+(Fiber a, Fiber b) { return {a.y + b.y, a.z + b.z}; }
  friend Fiber operator-(Fiber a, Fiber b) { return {a.y - b.y, a.z - b.z}; }
  friend Fiber operator*(double s, Fiber a) { return {s * a.y, s * a.z}; }
  friend bool operator==(Fiber a, Fiber b) = default;
};

inline double norm(Fiber v) { return std::hypot(v.y, v.z); }
inline double distance(Fiber a, Fiber b) { return norm(a - b); }
inline bool finite(Fiber v) { return std::isfinite(v.y) && std::isfinite(v.z); }

struct SpacePoint {
  double x = 0.0;
  Fiber fiber;

  friend bool operator==(const SpacePoint&, const SpacePoint&) = default;
};

inline double distance(const SpacePoint& a, const SpacePoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.fiber.y - b.fiber.y;
  const double dz = a.fiber.z - b.fiber.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

enum class Direction { Forward, Backward };

inline double sign_of(Direction d) { return d == Direction::Forward ? 1.0 : -1.0; }
inline Direction opposite(Direction d) {
  return d == Direction::Forward ? Direction::Backward : Direction::Forward;
}

// Tolerances shared by every module.
inline constexpr double kMembershipBand = 1e-8;
inline constexpr double kPlaneBand = 1e-9;
inline constexpr double kDefaultOdeTolerance = 1e-10;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace glueflow
