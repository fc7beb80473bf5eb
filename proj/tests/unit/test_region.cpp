#include <gtest/gtest.h>

#include <cmath>

#include "glueflow/errors.hpp"
#include "glueflow/region.hpp"
#include "glueflow/verify.hpp"
#include "support.hpp"

namespace {

using namespace glueflow;
using gft::built;
using gft::Gen;

constexpr double kOde = kDefaultOdeTolerance;

bool predicate_holds(const LevelParams& p, FiberPredicate pred, Fiber v) {
  switch (pred) {
    case FiberPredicate::All: return true;
    case FiberPredicate::NotCstar: return p.disks.zeta_star(v) != 0.0;
    case FiberPredicate::OutsideBstar: return p.disks.zeta_star(v) > 0.0;
    case FiberPredicate::OutsideB0: return p.disks.zeta0(v) > 0.0;
  }
  return false;
}

Fiber on_circle(Fiber w0, double ang, double r = 1.0) { return w0 + Fiber{r * std::cos(ang), r * std::sin(ang)}; }

TEST(Level0, BaseSystem) {
  const DisplayedSystem d0 = build_level0();
  EXPECT_EQ(d0.depth(), 0);
  EXPECT_EQ(d0.N(), 1);
  const Location loc = locate(d0, {0, {0, 0}});
  EXPECT_TRUE(loc.member);
  EXPECT_EQ(loc.cell.kind, CellKind::Base);
  gft::for_all(1000, 1, [&](Gen& g, int) {
    const SpacePoint s{g.uniform(-1e3, 1e3), g.fiber(-1e3, 1e3)};
    EXPECT_TRUE(locate(d0, s).member);
    EXPECT_EQ(speed(d0, s), 1.0);
  });
}

TEST(DisplayedSystem, RejectsBrokenLevelChain) {
  LevelParams p;
  p.N = 2;
  p.N_prime = 12;
  EXPECT_THROW(DisplayedSystem({p}), PreconditionError);
  EXPECT_THROW(build_level0().prefix(1), PreconditionError);
}

TEST(Locate, ExcisedBoxAndKeptBoundary) {
  const DisplayedSystem& d1 = built().D(1);
  const LevelParams& p = d1.level(1);
  const double n = p.N;
  const Fiber inside_bstar = p.w0 + Fiber{0.1, 0.1};
  ASSERT_LT(p.disks.zeta_star(inside_bstar), 0.0);
  EXPECT_FALSE(locate(d1, {-n - 6.5, inside_bstar}).member);
  const Location y1 = locate(d1, {-n - 6, inside_bstar});
  EXPECT_TRUE(y1.member);
  EXPECT_EQ(y1.cell.kind, CellKind::Fold);
  EXPECT_TRUE(locate(d1, {-n - 7, inside_bstar}).member);
  const Fiber far{p.w0.y + 5, p.w0.z};
  EXPECT_TRUE(locate(d1, {-n - 6.5, far}).member);
  // Twist cell: B0 excised on [N+2, N+3] and [N+4, N+5], B* on (N+6, N+7).
  EXPECT_FALSE(locate(d1, {n + 2.5, p.w0}).member);
  EXPECT_TRUE(locate(d1, {n + 3.5, p.w0}).member);
  EXPECT_FALSE(locate(d1, {n + 4.5, p.w0}).member);
  EXPECT_FALSE(locate(d1, {n + 6.5, p.w0}).member);
  EXPECT_TRUE(locate(d1, {n + 6, p.w0}).member);
  EXPECT_TRUE(locate(d1, {n + 2.5, far}).member);
  // Gaps between the slabs.
  EXPECT_FALSE(locate(d1, {n + 0.5, far}).member);
  EXPECT_FALSE(locate(d1, {-n - 8.5, far}).member);
  EXPECT_FALSE(locate(d1, {n + 8.5, far}).member);
  // Inner system.
  const Location base = locate(d1, {0, far});
  EXPECT_TRUE(base.member);
  EXPECT_EQ(base.cell.kind, CellKind::Base);
}

TEST(Locate, ShiftEntryDependsOnLambda0) {
  const DisplayedSystem& d1 = built().D(1);
  const LevelParams& p = d1.level(1);
  gft::for_all(200, 2, [&](Gen& g, int) {
    const Fiber v = g.fiber(-3, 3);
    const double entry = -p.N - p.lambda0(v);
    EXPECT_FALSE(locate(d1, {entry, v}).member);
    const Location in = locate(d1, {entry + 1e-9, v});
    EXPECT_TRUE(in.member);
    EXPECT_EQ(in.cell.kind, CellKind::Shift);
  });
}

TEST(Locate, AmbiguityFlaggedNearCircles) {
  const DisplayedSystem& d1 = built().D(1);
  const LevelParams& p = d1.level(1);
  const Fiber c0 = on_circle(p.w0, 0.4, 1.0 + 1e-10);
  EXPECT_TRUE(locate(d1, {p.N + 2.5, c0}).ambiguous);
  EXPECT_FALSE(locate(d1, {p.N + 2.5, on_circle(p.w0, 0.4, 1.5)}).ambiguous);
}

TEST(Locate, PartitionOfSlabs) {
  for (int depth : {1, 2}) {
    const DisplayedSystem& d = built().D(depth);
    const double outer = d.N() + 2;
    gft::for_all(100000, 3 + depth, [&](Gen& g, int) {
      const SpacePoint s{g.uniform(-outer, outer), g.fiber(-3, 3)};
      const Location loc = locate(d, s);
      if (!loc.member || loc.ambiguous) return;
      const Cell& c = loc.cell;
      if (c.kind == CellKind::Base) {
        ASSERT_LT(std::abs(s.x), 1.0);
        return;
      }
      const bool above = c.lo_closed ? s.x >= c.lo : s.x > c.lo;
      const bool below = c.hi_closed ? s.x <= c.hi : s.x < c.hi;
      ASSERT_TRUE(above && below) << gft::text(s) << " in [" << c.lo << ", " << c.hi << "]";
      const LevelParams& p = d.level(c.level);
      ASSERT_GE(std::abs(s.x), p.N) << gft::text(s);
      ASSERT_TRUE(predicate_holds(p, c.predicate, s.fiber)) << gft::text(s);
    });
  }
}

TEST(Speed, UnitOnOuterEnds) {
  const DisplayedSystem& d2 = built().D(2);
  gft::for_all(500, 6, [&](Gen& g, int) {
    const double n = d2.N();
    const SpacePoint s{g.uniform(0, 1) < 0.5 ? g.uniform(-n - 50, -n + 1) : g.uniform(n - 1, n + 50), g.fiber(-5, 5)};
    EXPECT_EQ(speed(d2, s), 1.0) << gft::text(s);
  });
}

TEST(Speed, FoldVanishesOnCstar) {
  const DisplayedSystem& d1 = built().D(1);
  const LevelParams& p = d1.level(1);
  const Fiber cstar = p.psi().apply(on_circle(p.w0, 1.1));
  EXPECT_LT(speed(d1, {-p.N - 6.0, cstar}), 1e-12);
  EXPECT_LT(speed(d1, {-p.N - 7.0, cstar}), 1e-12);
  EXPECT_THROW(speed(d1, {-p.N - 6.5, p.w0}), NotInManifoldError);
}

TEST(Speed, TwistMatchesFormula) {
  const DisplayedSystem& d1 = built().D(1);
  const LevelParams& p = d1.level(1);
  gft::for_all(200, 7, [&](Gen& g, int) {
    const Fiber w = g.fiber(-3, 3);
    if (p.disks.on_C0(w) || p.disks.on_Cstar(w)) return;
    const double x = p.N + 1.5;
    const double z0 = p.disks.zeta0(w);
    const double zs = p.disks.zeta_star(w);
    const double b = (x - p.N - 2) * (x - p.N - 3) * (x - p.N - 4) * (x - p.N - 5);
    const double c = (x - p.N - 6) * (x - p.N - 7);
    const double expected = (1 - std::exp(-(b * b + z0 * z0))) * (1 - std::exp(-(c * c + zs * zs)));
    const double v = speed(d1, {x, w});
    EXPECT_NEAR(v, expected, 1e-14);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
  });
}

TEST(Speed, VanishesOnlyNearCataloguedLoci) {
  const DisplayedSystem& d1 = built().D(1);
  const LevelParams& p = d1.level(1);
  const double n = p.N;
  const double fold_planes[] = {-n - 7, -n - 6};
  const double b0_planes[] = {n + 2, n + 3, n + 4, n + 5};
  const double bstar_planes[] = {n + 6, n + 7};
  int slow = 0;
  gft::for_all(50000, 8, [&](Gen& g, int i) {
    SpacePoint s;
    if (i % 2 == 0) {
      s = {g.uniform(-n - 9, n + 9), g.fiber(-3, 3)};
    } else {
      // Biased towards the vanishing loci.
      const int which = g.integer(0, 7);
      const double plane = which < 2 ? fold_planes[which] : which < 6 ? b0_planes[which - 2] : bstar_planes[which - 6];
      Fiber f = on_circle(p.w0, g.uniform(0, 6.3), 1.0 + g.uniform(-3e-3, 3e-3));
      if (which < 2 || which >= 6) f = p.psi().apply(f);
      s = {plane + g.uniform(-3e-3, 3e-3), f};
    }
    const Location loc = locate(d1, s);
    if (!loc.member) return;
    const double v = speed(d1, s);
    if (v >= 1e-6) return;
    ++slow;
    double best = kInf;
    for (double x : fold_planes) {
      best = std::min(best, std::hypot(s.x - x, planar_distance(p, BadSetTag::Cstar, s.fiber)));
    }
    for (double x : bstar_planes) {
      best = std::min(best, std::hypot(s.x - x, planar_distance(p, BadSetTag::Cstar, s.fiber)));
    }
    for (double x : b0_planes) {
      best = std::min(best, std::hypot(s.x - x, planar_distance(p, BadSetTag::C0, s.fiber)));
    }
    EXPECT_LE(best, 1e-3) << gft::text(s) << " speed " << v;
  });
  EXPECT_GT(slow, 0);
}

TEST(JumpRules, TableShape) {
  const LevelParams& p = built().D(1).level(1);
  const auto rules = jump_rules(p);
  ASSERT_EQ(rules.size(), 8u);
  for (std::size_t i = 0; i < rules.size(); ++i) EXPECT_EQ(rules[i].id, static_cast<int>(i) + 1);
  EXPECT_TRUE(std::isnan(rules[1].target_x));
  EXPECT_EQ(rules[5].map, FiberMap::Psi);
  EXPECT_EQ(rules[7].map, FiberMap::PsiInverse);
  for (int owned : {1, 2, 5, 8}) EXPECT_TRUE(rules[owned - 1].source_owned) << owned;
  for (int owned : {3, 4, 6, 7}) EXPECT_TRUE(rules[owned - 1].target_owned) << owned;
}

TEST(JumpRules, PsiThenInverseRuleRestoresFiber) {
  const LevelParams& p = built().D(1).level(1);
  gft::for_all(300, 9, [&](Gen& g, int) {
    const Fiber v = g.in_disk(p.w0, 1.0);
    const Fiber there = p.psi().apply(v);    // rule 6 / 7 map
    const Fiber back = p.psi().inverse(there);  // rule 5 / 8 map
    EXPECT_LE(distance(back, v), 10 * kOde);
  });
}

TEST(Axioms, Level0HasNoViolations) { EXPECT_TRUE(validate_displayed_axioms(build_level0(), 1000).ok()); }

TEST(Axioms, BuiltLevelsHaveNoViolations) {
  for (int depth : {1, 2}) {
    const ValidationReport r = validate_displayed_axioms(built().D(depth), 10000, 3);
    EXPECT_TRUE(r.ok()) << r.violations.front().check << ": " << r.violations.front().detail;
  }
  EXPECT_THROW(validate_displayed_axioms(build_level0(), 0), PreconditionError);
}

TEST(Axioms, PerturbedT0IsReported) {
  std::vector<LevelParams> levels = built().D(1).levels();
  levels[0].T0 = levels[0].T - 1.5;
  const ValidationReport r = validate_displayed_axioms(DisplayedSystem(levels), 10);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.violations.front().check, "T-range");
}

TEST(Extension, BuiltLevelsAgreeOnInnerSlab) {
  const ValidationReport r01 = check_extension(built().D(0), built().D(1), 10000);
  EXPECT_TRUE(r01.ok());
  const ValidationReport r12 = check_extension(built().D(1), built().D(2), 10000);
  EXPECT_TRUE(r12.ok()) << r12.violations.front().check;
  EXPECT_THROW(check_extension(built().D(0), built().D(2), 10), PreconditionError);
}

TEST(Extension, AlteredW0IsReported) {
  std::vector<LevelParams> levels = built().D(2).levels();
  const Fiber moved = levels[0].w0 + Fiber{0.5, -0.25};
  levels[0].w0 = moved;
  levels[0].disks = DiskPair(PsiMap(levels[0].k, moved));
  const ValidationReport r = check_extension(built().D(1), DisplayedSystem(levels), 10000);
  ASSERT_FALSE(r.ok());
  bool membership = false;
  for (const auto& v : r.violations) membership = membership || v.check == "membership" || v.check == "speed";
  EXPECT_TRUE(membership);
}

TEST(Extension, SpeedRecursesExactly) {
  const DisplayedSystem& d1 = built().D(1);
  const DisplayedSystem& d2 = built().D(2);
  gft::for_all(20000, 10, [&](Gen& g, int) {
    const SpacePoint s{g.uniform(-d1.N() + 1e-9, d1.N() - 1e-9), g.fiber(-4, 4)};
    const Location a = locate(d1, s);
    ASSERT_EQ(a.member, locate(d2, s).member) << gft::text(s);
    if (a.member) ASSERT_EQ(speed(d1, s), speed(d2, s)) << gft::text(s);
  });
}

}  // namespace
