#include "glueflow/region.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "glueflow/errors.hpp"

namespace glueflow {

DisplayedSystem::DisplayedSystem(std::vector<LevelParams> levels) : levels_(std::move(levels)) {
  int n = 1;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto& p = levels_[i];
    if (p.N != n || p.N_prime != p.N + 10) {
      std::ostringstream os;
      os << "DisplayedSystem: level " << i + 1 << " has N = " << p.N << ", N' = " << p.N_prime
         << "; expected N = " << n << ", N' = N + 10";
      throw PreconditionError(os.str());
    }
    n = p.N_prime;
  }
}

DisplayedSystem DisplayedSystem::prefix(int depth) const {
  if (depth < 0 || depth > this->depth()) throw PreconditionError("DisplayedSystem::prefix: bad depth");
  return DisplayedSystem(std::vector<LevelParams>(levels_.begin(), levels_.begin() + depth));
}

DisplayedSystem DisplayedSystem::with_level(LevelParams params) const {
  auto levels = levels_;
  levels.push_back(std::move(params));
  return DisplayedSystem(std::move(levels));
}

DisplayedSystem build_level0() { return DisplayedSystem(); }

const char* to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Base: return "base";
    case CellKind::Left: return "M'3";
    case CellKind::Fold: return "M'1";
    case CellKind::Shift: return "M'5";
    case CellKind::Twist: return "M'2";
    case CellKind::Right: return "M'4";
  }
  return "?";
}

const char* to_string(FiberPredicate predicate) {
  switch (predicate) {
    case FiberPredicate::All: return "all";
    case FiberPredicate::NotCstar: return "not C*";
    case FiberPredicate::OutsideBstar: return "outside B*";
    case FiberPredicate::OutsideB0: return "outside B0";
  }
  return "?";
}

const char* to_string(SpeedTag tag) {
  switch (tag) {
    case SpeedTag::Unit: return "unit";
    case SpeedTag::Fold: return "f";
    case SpeedTag::Twist: return "gh";
  }
  return "?";
}

const char* to_string(FiberMap map) {
  switch (map) {
    case FiberMap::Identity: return "id";
    case FiberMap::Psi: return "psi";
    case FiberMap::PsiInverse: return "psi^-1";
  }
  return "?";
}

namespace {

struct PieceBuilder {
  Location loc;

  Location gap() {
    loc.member = false;
    return loc;
  }
  Location piece(CellKind kind, double lo, bool lo_closed, double hi, bool hi_closed,
                 FiberPredicate predicate, SpeedTag speed, bool member = true) {
    loc.member = member;
    loc.cell.kind = kind;
    loc.cell.lo = lo;
    loc.cell.lo_closed = lo_closed;
    loc.cell.hi = hi;
    loc.cell.hi_closed = hi_closed;
    loc.cell.predicate = predicate;
    loc.cell.speed = speed;
    return loc;
  }
};

Location locate_in_level(const LevelParams& p, int level, bool top, double x, Fiber u) {
  const double n = p.N;
  const double outer = p.N_prime;
  PieceBuilder b;
  b.loc.cell.level = level;
  auto zstar_decides = [&](bool outside_required) {
    const double zs = p.disks.zeta_star(u);
    b.loc.ambiguous = std::abs(zs) < kMembershipBand;
    return outside_required ? zs > 0.0 : zs != 0.0;
  };
  auto z0_outside = [&]() {
    const double z0 = p.disks.zeta0(u);
    b.loc.ambiguous = std::abs(z0) < kMembershipBand;
    return z0 > 0.0;
  };

  if (x < 0) {
    if (x <= -n - 9) {
      return b.piece(CellKind::Left, top ? -kInf : -outer, false, -n - 9, true, FiberPredicate::All,
                     SpeedTag::Unit);
    }
    if (x <= -n - 8) return b.gap();
    if (x <= -n - 5) {
      if (x < -n - 7) {
        return b.piece(CellKind::Fold, -n - 8, false, -n - 7, false, FiberPredicate::All, SpeedTag::Fold);
      }
      if (x == -n - 7 || x == -n - 6) {
        const bool m = zstar_decides(false);
        return b.piece(CellKind::Fold, x, true, x, true, FiberPredicate::NotCstar, SpeedTag::Fold, m);
      }
      if (x < -n - 6) {
        const bool m = zstar_decides(true);
        return b.piece(CellKind::Fold, -n - 7, false, -n - 6, false, FiberPredicate::OutsideBstar,
                       SpeedTag::Fold, m);
      }
      return b.piece(CellKind::Fold, -n - 6, false, -n - 5, true, FiberPredicate::All, SpeedTag::Fold);
    }
    const double entry = -n - p.lambda0(u);
    if (x <= entry) return b.gap();
    return b.piece(CellKind::Shift, entry, false, -n, true, FiberPredicate::All, SpeedTag::Unit);
  }

  if (x < n + 1) return b.gap();
  if (x < n + 8) {
    if (x < n + 2) {
      return b.piece(CellKind::Twist, n + 1, true, n + 2, false, FiberPredicate::All, SpeedTag::Twist);
    }
    if (x <= n + 3) {
      const bool m = z0_outside();
      return b.piece(CellKind::Twist, n + 2, true, n + 3, true, FiberPredicate::OutsideB0, SpeedTag::Twist, m);
    }
    if (x < n + 4) {
      return b.piece(CellKind::Twist, n + 3, false, n + 4, false, FiberPredicate::All, SpeedTag::Twist);
    }
    if (x <= n + 5) {
      const bool m = z0_outside();
      return b.piece(CellKind::Twist, n + 4, true, n + 5, true, FiberPredicate::OutsideB0, SpeedTag::Twist, m);
    }
    if (x < n + 6) {
      return b.piece(CellKind::Twist, n + 5, false, n + 6, false, FiberPredicate::All, SpeedTag::Twist);
    }
    if (x == n + 6 || x == n + 7) {
      const bool m = zstar_decides(false);
      return b.piece(CellKind::Twist, x, true, x, true, FiberPredicate::NotCstar, SpeedTag::Twist, m);
    }
    if (x < n + 7) {
      const bool m = zstar_decides(true);
      return b.piece(CellKind::Twist, n + 6, false, n + 7, false, FiberPredicate::OutsideBstar,
                     SpeedTag::Twist, m);
    }
    return b.piece(CellKind::Twist, n + 7, false, n + 8, false, FiberPredicate::All, SpeedTag::Twist);
  }
  if (x < n + 9) return b.gap();
  return b.piece(CellKind::Right, n + 9, true, top ? kInf : outer, false, FiberPredicate::All, SpeedTag::Unit);
}

}  // namespace

Location locate(const DisplayedSystem& system, const SpacePoint& sigma) {
  const double x = sigma.x;
  for (int level = system.depth(); level >= 1; --level) {
    const LevelParams& p = system.level(level);
    if (x > -p.N && x < p.N) continue;
    return locate_in_level(p, level, level == system.depth(), x, sigma.fiber);
  }
  Location loc;
  loc.member = true;
  if (system.depth() > 0) {
    loc.cell.lo = -1.0;
    loc.cell.hi = 1.0;
  }
  return loc;
}

double speed(const DisplayedSystem& system, const SpacePoint& sigma) {
  const Location loc = locate(system, sigma);
  if (!loc.member) {
    std::ostringstream os;
    os << "speed: point (" << sigma.x << ", " << sigma.fiber.y << ", " << sigma.fiber.z << ") is not in M";
    throw NotInManifoldError(os.str());
  }
  switch (loc.cell.speed) {
    case SpeedTag::Unit: return 1.0;
    case SpeedTag::Fold: {
      const LevelParams& p = system.level(loc.cell.level);
      return fold_speed(p.N, sigma.x, p.disks.zeta_star(sigma.fiber));
    }
    case SpeedTag::Twist: {
      const LevelParams& p = system.level(loc.cell.level);
      return twist_speed(p.N, sigma.x, p.disks.zeta0(sigma.fiber), p.disks.zeta_star(sigma.fiber));
    }
  }
  return 1.0;
}

std::vector<JumpRule> jump_rules(const LevelParams& params) {
  const double n = params.N;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  using FC = FiberCondition;
  using FM = FiberMap;
  return {
      {1, -n - 9, true, FC::Any, -n - 8, false, FM::Identity},
      {2, -n - 5, true, FC::Any, nan, false, FM::Identity},
      {3, n, false, FC::Any, n + 1, true, FM::Identity},
      {4, n + 8, false, FC::Any, n + 9, true, FM::Identity},
      {5, -n - 7, true, FC::InBstarMinusCstar, n + 3, false, FM::PsiInverse},
      {6, n + 2, false, FC::InB0MinusC0, -n - 6, true, FM::Psi},
      {7, n + 4, false, FC::InB0MinusC0, n + 7, true, FM::Psi},
      {8, n + 6, true, FC::InBstarMinusCstar, n + 5, false, FM::PsiInverse},
  };
}

namespace {

class Sampler {
 public:
  Sampler(const DisplayedSystem& system, std::uint64_t seed) : system_(system), rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  // Half the fibers from [-3,3]^2, half near the disks of a random level.
  Fiber fiber() {
    if (system_.depth() == 0 || uniform(0, 1) < 0.5) return {uniform(-3, 3), uniform(-3, 3)};
    const int level = 1 + static_cast<int>(uniform(0, system_.depth()));
    const Fiber w0 = system_.level(std::min(level, system_.depth())).w0;
    return {w0.y + uniform(-2, 2), w0.z + uniform(-2, 2)};
  }

 private:
  const DisplayedSystem& system_;
  std::mt19937_64 rng_;
};

std::string describe(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

}  // namespace

ValidationReport validate_displayed_axioms(const DisplayedSystem& system, int sample_count,
                                           std::uint64_t seed) {
  if (sample_count < 1) throw PreconditionError("validate_displayed_axioms: sample_count must be >= 1");
  ValidationReport report;
  report.samples = sample_count;
  Sampler s(system, seed);
  auto add = [&](std::string check, SpacePoint witness, std::string detail) {
    report.violations.push_back({std::move(check), witness, std::move(detail)});
  };

  int expected_n = 1;
  for (int L = 1; L <= system.depth(); ++L) {
    const LevelParams& p = system.level(L);
    const SpacePoint at{0.0, p.w0};
    if (p.N != expected_n) add("level-chain", at, "N = " + std::to_string(p.N));
    if (p.N_prime != p.N + 10) add("N-prime", at, "N' = " + std::to_string(p.N_prime));
    expected_n = p.N_prime;
    if (!(p.T0 + 2 <= p.T + 1e-12 && p.T <= p.T0 + 3 + 1e-12)) {
      add("T-range", at, "T = " + std::to_string(p.T) + ", T0 = " + describe(p.T0));
    }
    if (!(p.W_radius > 0)) add("W-radius", at, "W_radius = " + describe(p.W_radius));
    for (int i = 0; i < sample_count; ++i) {
      const Fiber v{p.w0.y + s.uniform(-10, 10), p.w0.z + s.uniform(-10, 10)};
      const double l0 = p.lambda0(v);
      if (!(l0 > 1.0 && l0 < 4.0)) add("lambda0-range", {0.0, v}, "lambda0 = " + describe(l0));
    }
  }

  const double N = system.N();
  for (int i = 0; i < sample_count; ++i) {
    // Unit speed on L_N and R_N.
    {
      const double x = s.uniform(0, 1) < 0.5 ? s.uniform(-N - 10, -N + 1) : s.uniform(N - 1, N + 10);
      const SpacePoint sigma{x, s.fiber()};
      const Location loc = locate(system, sigma);
      if (!loc.member) {
        add("ends-in-M", sigma, "point of L_N or R_N is not in M");
      } else if (speed(system, sigma) != 1.0) {
        add("ends-unit-speed", sigma, "speed = " + describe(speed(system, sigma)));
      }
    }
    // Speed in [0, 1].
    {
      const SpacePoint sigma{s.uniform(-N - 2, N + 2), s.fiber()};
      const Location loc = locate(system, sigma);
      if (loc.member) {
        const double v = speed(system, sigma);
        if (!(v >= 0.0 && v <= 1.0)) add("speed-range", sigma, "speed = " + describe(v));
      }
    }
    // Membership and speed on M cap S_{N_j} agree with the level-j system.
    for (int j = 0; j < system.depth(); ++j) {
      const DisplayedSystem inner = system.prefix(j);
      const double n = inner.N();
      const SpacePoint sigma{s.uniform(-n, n), s.fiber()};
      if (std::abs(sigma.x) >= n) continue;
      const Location a = locate(inner, sigma);
      const Location b = locate(system, sigma);
      if (a.member != b.member) {
        add("nested-membership", sigma, "level " + std::to_string(j) + " disagrees");
      } else if (a.member && speed(inner, sigma) != speed(system, sigma)) {
        add("nested-speed", sigma, "level " + std::to_string(j) + " speed differs");
      }
    }
  }
  return report;
}

ValidationReport check_extension(const DisplayedSystem& inner, const DisplayedSystem& outer,
                                 int sample_count, std::uint64_t seed) {
  if (outer.depth() != inner.depth() + 1) {
    throw PreconditionError("check_extension: outer must have exactly one more level than inner");
  }
  ValidationReport report;
  report.samples = sample_count;
  auto add = [&](std::string check, SpacePoint witness, std::string detail) {
    report.violations.push_back({std::move(check), witness, std::move(detail)});
  };
  if (!(outer.N() >= inner.N() + 1)) {
    add("half-width", {}, "N' = " + std::to_string(outer.N()) + ", N = " + std::to_string(inner.N()));
  }
  for (int L = 1; L <= inner.depth(); ++L) {
    if (!(inner.level(L) == outer.level(L))) {
      add("level-prefix", {0.0, inner.level(L).w0}, "level " + std::to_string(L) + " parameters differ");
    }
  }
  Sampler s(outer, seed);
  const double n = inner.N();
  for (int i = 0; i < sample_count; ++i) {
    const SpacePoint sigma{s.uniform(-n, n), s.fiber()};
    if (std::abs(sigma.x) >= n) continue;
    const Location a = locate(inner, sigma);
    const Location b = locate(outer, sigma);
    if (a.member != b.member) {
      add("membership", sigma, a.member ? "dropped by the extension" : "added by the extension");
      continue;
    }
    if (!a.member) continue;
    const double va = speed(inner, sigma);
    const double vb = speed(outer, sigma);
    if (va != vb) add("speed", sigma, describe(va) + " vs " + describe(vb));
  }
  return report;
}

}  // namespace glueflow
