#include "glueflow/builder.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "glueflow/errors.hpp"

namespace glueflow {

namespace {

constexpr double kFiberMatch = 1e-6;

std::string point_text(const SpacePoint& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.fiber.y << ", " << p.fiber.z << ")";
  return os.str();
}

FlowResult hit_or_throw(const DisplayedSystem& system, const SpacePoint& from, double plane, Direction dir,
                        const FlowBudget& budget, Recording recording) {
  FlowOptions options;
  options.recording = recording;
  FlowResult r = advance_to_plane(system, from, plane, dir, budget, options);
  if (r.status != FlowStatus::PlaneHit) {
    std::ostringstream os;
    os << "orbit of " << point_text(from) << " did not reach x = " << plane << ": " << to_string(r.status)
       << " at " << point_text(r.end);
    throw FlowError(os.str());
  }
  return r;
}

}  // namespace

Fiber compute_w0(const DisplayedSystem& system, const SpacePoint& sigma0, const FlowBudget& budget) {
  const double N = system.N();
  if (!(std::abs(sigma0.x) < N)) throw PreconditionError("compute_w0: sigma0 must lie in S_N");
  const FlowResult back = hit_or_throw(system, sigma0, -N, Direction::Backward, budget, Recording::None);
  const FlowResult fwd = hit_or_throw(system, sigma0, N, Direction::Forward, budget, Recording::None);
  if (distance(back.end.fiber, fwd.end.fiber) > kFiberMatch) {
    std::ostringstream os;
    os << "compute_w0: sigma0 " << point_text(sigma0) << " is not flat; fibers at -N and N are "
       << point_text(back.end) << " and " << point_text(fwd.end);
    throw FiberMismatchError(os.str());
  }
  return back.end.fiber;
}

Crossing inner_crossing(const DisplayedSystem& system, Fiber w, const FlowBudget& budget) {
  const double N = system.N();
  const FlowResult r = hit_or_throw(system, {-N, w}, N, Direction::Forward, budget, Recording::Jumps);
  Crossing c;
  c.time = r.elapsed;
  c.end = r.end.fiber;
  for (const auto& e : r.itinerary.events) {
    if (e.kind != EventKind::Jump) continue;
    const int code = e.level * 100 + std::abs(e.rule);
    c.signature.push_back(e.rule < 0 ? -code : code);
  }
  return c;
}

double lambda1(const DisplayedSystem& system, Fiber w, const FlowBudget& budget) {
  const Crossing c = inner_crossing(system, w, budget);
  if (distance(c.end, w) > kFiberMatch) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda1: crossing from fiber (" << w.y << ", " << w.z << ") ends on (" << c.end.y << ", " << c.end.z
       << ")";
    throw FiberMismatchError(os.str());
  }
  return c.time;
}

double lambda2(const LevelParams& params, Fiber w) {
  const double n = params.N;
  return travel_time(params, SpeedTag::Fold, -n - 6, -n - 5, w);
}

double lambda3(const LevelParams& params, Fiber w) {
  const double n = params.N;
  return travel_time(params, SpeedTag::Twist, n + 1, n + 2, w);
}

double return_time(const DisplayedSystem& system, int level, Fiber w, const FlowBudget& budget) {
  const LevelParams& p = system.level(level);
  return p.lambda0(w) + lambda1(system.prefix(level - 1), w, budget) + lambda2(p, w) + lambda3(p, w);
}

DisplayedSystem extend(const DisplayedSystem& system, const SpacePoint& sigma0, int k, const FlowBudget& budget,
                       BuildReport* report, const ExtendOptions& options) {
  if (k < 1) throw PreconditionError("extend: k must be a positive integer");
  BuildReport rep;
  rep.level = system.depth() + 1;
  rep.N = system.N();
  rep.k = k;
  rep.sigma0 = sigma0;

  const Fiber w0 = compute_w0(system, sigma0, budget);
  rep.w0 = w0;

  LevelParams p;
  p.N = system.N();
  p.N_prime = p.N + 10;
  p.w0 = w0;
  p.k = k;
  p.disks = DiskPair(PsiMap(k, w0, options.ode_tolerance));
  p.sigma0 = sigma0;

  const Crossing base = inner_crossing(system, w0, budget);
  rep.signature = base.signature;

  // Shrink W until a ring around w0 stays inside B0 and B* away from their
  // circles and crosses the inner system by the same rules with its fiber intact.
  double radius = options.initial_W_radius;
  for (;;) {
    bool ok = true;
    for (int i = 0; i < 16 && ok; ++i) {
      const double ang = 2.0 * std::numbers::pi * i / 16.0;
      const Fiber w{w0.y + radius * std::cos(ang), w0.z + radius * std::sin(ang)};
      if (!(p.disks.zeta0(w) < -kMembershipBand) || !(p.disks.zeta_star(w) < -kMembershipBand)) {
        ok = false;
        break;
      }
      try {
        const Crossing c = inner_crossing(system, w, budget);
        ok = c.signature == base.signature && distance(c.end, w) <= kFiberMatch;
      } catch (const FlowError&) {
        ok = false;
      }
    }
    if (ok) break;
    radius /= 2;
    ++rep.W_halvings;
    if (radius < options.min_W_radius) {
      std::ostringstream os;
      os << "extend: no flat neighbourhood of w0 found down to radius " << options.min_W_radius;
      throw NumericalError(os.str());
    }
  }
  p.W_radius = radius;
  rep.W_radius = radius;

  rep.lambda1_w0 = base.time;
  rep.lambda2_w0 = lambda2(p, w0);
  rep.lambda3_w0 = lambda3(p, w0);
  p.T0 = rep.lambda1_w0 + rep.lambda2_w0 + rep.lambda3_w0;
  p.T = static_cast<int>(std::ceil(p.T0 + 2.0));
  rep.T0 = p.T0;
  rep.T = p.T;

  const int half_width = (k + 1) / 2;
  TaylorOptions topt;
  topt.step = std::min(options.taylor_step, 0.25 * radius / half_width);
  topt.max_radius = std::min(4 * topt.step, 0.9 * radius);
  auto mu = [&](Fiber w) {
    return p.T - lambda1(system, w, budget) - lambda2(p, w) - lambda3(p, w) - 2.0;
  };
  rep.taylor = taylor_poly(mu, w0, k, topt);
  p.lambda0 = build_lambda0(rep.taylor.poly, k, w0, &rep.lambda0);
  rep.a0 = p.lambda0.a0;

  DisplayedSystem outer = system.with_level(p);
  rep.return_time_defect = return_time(outer, outer.depth(), w0, budget) - p.T;
  if (report) *report = rep;
  return outer;
}

std::string build_report_json(const BuildReport& r) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int n = 0; n <= r.taylor.poly.degree(); ++n) {
    for (int b = 0; b <= n; ++b) coeffs.push_back({n - b, b, r.taylor.poly.coefficient(n - b, b)});
  }
  nlohmann::json residuals = nlohmann::json::array();
  for (auto [radius, err] : r.taylor.residuals) residuals.push_back({radius, err});
  nlohmann::json j{
      {"level", r.level},
      {"N", r.N},
      {"N_prime", r.N + 10},
      {"k", r.k},
      {"sigma0", {r.sigma0.x, r.sigma0.fiber.y, r.sigma0.fiber.z}},
      {"w0", {r.w0.y, r.w0.z}},
      {"W_radius", r.W_radius},
      {"W_halvings", r.W_halvings},
      {"inner_signature", r.signature},
      {"lambda1_w0", r.lambda1_w0},
      {"lambda2_w0", r.lambda2_w0},
      {"lambda3_w0", r.lambda3_w0},
      {"T0", r.T0},
      {"T", r.T},
      {"taylor",
       {{"step", r.taylor.step},
        {"coefficients", coeffs},
        {"residuals", residuals},
        {"residual_slope", r.taylor.residual_at_floor ? nlohmann::json(nullptr) : nlohmann::json(r.taylor.residual_slope)},
        {"residual_at_floor", r.taylor.residual_at_floor}}},
      {"lambda0",
       {{"a0", r.a0},
        {"doublings", r.lambda0.doublings},
        {"grid_min", r.lambda0.grid_min},
        {"grid_max", r.lambda0.grid_max},
        {"analytic_bound", r.lambda0.analytic_bound}}},
      {"return_time_defect", r.return_time_defect},
  };
  return j.dump(2);
}

}  // namespace glueflow
