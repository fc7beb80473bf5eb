#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "glueflow/construction.hpp"
#include "glueflow/flow.hpp"
#include "glueflow/planar.hpp"
#include "glueflow/region.hpp"

namespace gft {

using namespace glueflow;

// Hand-rolled property runner: calls body(rng, i) for i in [0, cases) with a
// per-case generator; the first failing case is reported with its seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  Fiber fiber(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
  Fiber in_disk(Fiber center, double radius) {
    for (;;) {
      const Fiber d{uniform(-radius, radius), uniform(-radius, radius)};
      if (norm(d) < radius) return center + d;
    }
  }
  Fiber unit() {
    const Fiber u{normal(), normal()};
    return (1.0 / norm(u)) * u;
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

template <class Body>
void for_all(int cases, std::uint64_t seed, Body&& body) {
  for (int i = 0; i < cases; ++i) {
    Gen g(seed * 1'000'003ULL + static_cast<std::uint64_t>(i));
    body(g, i);
  }
}

inline std::string text(const SpacePoint& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.fiber.y << ", " << p.fiber.z << ")";
  return os.str();
}

inline std::string text(Fiber v) { return text(SpacePoint{0.0, v}); }

// Classical RK4 on the planar field q0^k (y, -z) about w0, in long double,
// with a fixed number of steps over unit time (sign = -1 for the inverse).
inline Fiber rk4_psi(int k, Fiber w0, Fiber v, double sign = 1.0, int steps = 4000) {
  using ld = long double;
  auto field = [&](ld y, ld z, ld& dy, ld& dz) {
    const ld q = -std::expm1(-(y * y + z * z));
    const ld s = sign * std::pow(q, k);
    dy = s * y;
    dz = -s * z;
  };
  ld y = static_cast<ld>(v.y) - w0.y;
  ld z = static_cast<ld>(v.z) - w0.z;
  const ld h = 1.0L / steps;
  for (int i = 0; i < steps; ++i) {
    ld a1, b1, a2, b2, a3, b3, a4, b4;
    field(y, z, a1, b1);
    field(y + h / 2 * a1, z + h / 2 * b1, a2, b2);
    field(y + h / 2 * a2, z + h / 2 * b2, a3, b3);
    field(y + h * a3, z + h * b3, a4, b4);
    y += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    z += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
  }
  return {static_cast<double>(y + w0.y), static_cast<double>(z + w0.z)};
}

// RK4 on the scalar ODE x' = speed(x) for time t, fixed step count.
inline double rk4_scalar(const std::function<double(double)>& speed, double x, double t, int steps = 20000) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = speed(x);
    const double k2 = speed(x + h / 2 * k1);
    const double k3 = speed(x + h / 2 * k2);
    const double k4 = speed(x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

// Depth-2 construction shared by the tests of one binary.
struct Built {
  ConstructionConfig config;
  ConstructionState state;
  const DisplayedSystem& D(int k) const { return state.systems.at(k); }
};

inline constexpr std::uint64_t kSeed = 1;

inline const Built& built() {
  static const Built b = [] {
    Built out;
    out.config.depth = 2;
    out.config.seed = kSeed;
    out.state = run_construction(out.config);
    return out;
  }();
  return b;
}

}  // namespace gft
