#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "glueflow/builder.hpp"
#include "glueflow/errors.hpp"
#include "glueflow/stats.hpp"
#include "glueflow/verify.hpp"
#include "support.hpp"

namespace {

using namespace glueflow;
using gft::built;
using gft::Gen;

TEST(ComputeW0, Level0IsTheFiber) {
  EXPECT_EQ(compute_w0(build_level0(), {0.3, {1.5, -2.0}}), (Fiber{1.5, -2.0}));
  EXPECT_THROW(compute_w0(build_level0(), {1.5, {0, 0}}), PreconditionError);
}

TEST(ComputeW0, FlatPointsAgreeInBothDirections) {
  const DisplayedSystem& d1 = built().D(1);
  int checked = 0;
  gft::for_all(60, 1, [&](Gen& g, int) {
    const SpacePoint s{g.uniform(-d1.N() + 0.1, d1.N() - 0.1), g.fiber(-3, 3)};
    const Location loc = locate(d1, s);
    if (!loc.member || loc.ambiguous) return;
    const FlatnessResult flat = is_flat(d1, s);
    if (!flat.flat) return;
    ++checked;
    EXPECT_LE(distance(compute_w0(d1, s), flat.fiber), 1e-6);
  });
  EXPECT_GT(checked, 10);
}

TEST(ComputeW0, StallingPointIsRejected) {
  const DisplayedSystem& d1 = built().D(1);
  const LevelParams& p = d1.level(1);
  const Fiber cstar = p.psi().apply(p.w0 + Fiber{std::cos(2.0), std::sin(2.0)});
  EXPECT_THROW(compute_w0(d1, {0.0, cstar}), FlowError);
}

TEST(Lambda1, Level0IsTwo) {
  gft::for_all(100, 2, [](Gen& g, int) { EXPECT_DOUBLE_EQ(lambda1(build_level0(), g.fiber(-9, 9)), 2.0); });
}

TEST(Lambda1, LandsOnSameFiberAcrossW) {
  for (int level : {1, 2}) {
    const DisplayedSystem& d = built().D(level);
    const LevelParams& p = d.level(level);
    const DisplayedSystem inner = d.prefix(level - 1);
    const Crossing at_w0 = inner_crossing(inner, p.w0);
    EXPECT_LE(distance(at_w0.end, p.w0), 1e-6);
    gft::for_all(16, 3, [&](Gen& g, int) {
      // Near the edge of W.
      const double ang = g.uniform(0, 6.283185307179586);
      const Fiber w = p.w0 + Fiber{0.99 * p.W_radius * std::cos(ang), 0.99 * p.W_radius * std::sin(ang)};
      const Crossing c = inner_crossing(inner, w);
      EXPECT_LE(distance(c.end, w), 1e-6);
      EXPECT_EQ(c.signature, at_w0.signature);
      EXPECT_GT(c.time, 0.0);
    });
  }
}

TEST(Lambda23, PositiveOnW) {
  for (int level : {1, 2}) {
    const LevelParams& p = built().D(level).level(level);
    gft::for_all(50, 4, [&](Gen& g, int) {
      const Fiber w = g.in_disk(p.w0, p.W_radius);
      EXPECT_GT(lambda2(p, w), 0.0);
      EXPECT_GT(lambda3(p, w), 0.0);
    });
  }
}

TEST(Lambda23, VanishingCirclesAreRejected) {
  const LevelParams& p = built().D(1).level(1);
  const Fiber c0 = p.w0 + Fiber{std::cos(0.5), std::sin(0.5)};
  EXPECT_THROW(lambda2(p, p.psi().apply(c0)), NonIntegrableError);
  EXPECT_THROW(lambda3(p, c0), NonIntegrableError);
}

TEST(Extend, Level1FromBaseSystem) {
  const SpacePoint sigma1 = built().state.sigmas.at(0);
  BuildReport rep;
  const DisplayedSystem d1 = extend(build_level0(), sigma1, 1, {}, &rep);
  EXPECT_EQ(d1, built().D(1));
  const LevelParams& p = d1.level(1);
  EXPECT_EQ(p.N, 1);
  EXPECT_EQ(p.N_prime, 11);
  EXPECT_EQ(p.w0, sigma1.fiber);
  EXPECT_DOUBLE_EQ(rep.lambda1_w0, 2.0);
  EXPECT_DOUBLE_EQ(p.T0, 2.0 + lambda2(p, p.w0) + lambda3(p, p.w0));
  EXPECT_LE(std::abs(rep.return_time_defect), 1e-5);
  const auto j = nlohmann::json::parse(build_report_json(rep));
  EXPECT_EQ(j["T"], p.T);
  EXPECT_THROW(extend(build_level0(), sigma1, 0), PreconditionError);
}

TEST(Extend, ReturnPeriodIsIntegerInRange) {
  for (int level : {1, 2}) {
    const LevelParams& p = built().D(level).level(level);
    EXPECT_GE(p.T, p.T0 + 2.0);
    EXPECT_LE(p.T, p.T0 + 3.0);
    EXPECT_EQ(p.T, static_cast<int>(std::ceil(p.T0 + 2.0)));
    EXPECT_EQ(p.k, level);
    EXPECT_EQ(p.N_prime, p.N + 10);
  }
}

TEST(Extend, ReturnTimeAgreesWithPeriodToOrderK) {
  for (int level : {1, 2}) {
    const DisplayedSystem& d = built().D(level);
    const LevelParams& p = d.level(level);
    EXPECT_LE(std::abs(return_time(d, level, p.w0) - p.T), 1e-5);
    const auto deltas = log_spaced(1e-3, std::min(1e-1, 0.9 * p.W_radius), 7);
    std::vector<std::vector<double>> xs;
    std::vector<std::vector<double>> ys;
    Gen g(50 + level);
    for (int d_i = 0; d_i < 4; ++d_i) {
      const Fiber u = g.unit();
      std::vector<double> x;
      std::vector<double> y;
      for (double delta : deltas) {
        const double err = std::abs(return_time(d, level, p.w0 + delta * u) - p.T);
        if (err < 1e-10) continue;
        x.push_back(std::log(delta));
        y.push_back(std::log(err));
      }
      xs.push_back(x);
      ys.push_back(y);
    }
    EXPECT_GE(pooled_slope(xs, ys), p.k + 1 - 0.3) << "level " << level;
  }
}

TEST(Extend, TaylorCoefficientsStableUnderStepHalving) {
  const DisplayedSystem& d1 = built().D(1);
  const LevelParams& p = d1.level(1);
  const DisplayedSystem d0 = d1.prefix(0);
  auto mu = [&](Fiber w) { return p.T - lambda1(d0, w) - lambda2(p, w) - lambda3(p, w) - 2.0; };
  TaylorOptions a;
  a.step = std::min(1e-2, 0.25 * p.W_radius);
  a.max_radius = std::min(4 * a.step, 0.9 * p.W_radius);
  TaylorOptions b = a;
  b.step = a.step / 2;
  const TaylorResult ra = taylor_poly(mu, p.w0, 1, a);
  const TaylorResult rb = taylor_poly(mu, p.w0, 1, b);
  for (int n = 0; n <= 1; ++n) {
    for (int j = 0; j <= n; ++j) EXPECT_NEAR(ra.poly.coefficient(n - j, j), rb.poly.coefficient(n - j, j), 1e-5);
  }
  EXPECT_EQ(ra.poly, p.lambda0.P);
}

TEST(Extend, Lambda0RangeOnRandomFibers) {
  for (int level : {1, 2}) {
    const JetMatchedFunction& l0 = built().D(level).level(level).lambda0;
    gft::for_all(20000, 60 + level, [&](Gen& g, int) {
      const Fiber v = g.in_disk(l0.w0, 10.0);
      const double x = l0(v);
      ASSERT_TRUE(x > 1.0 && x < 4.0) << gft::text(v);
    });
  }
}

}  // namespace
