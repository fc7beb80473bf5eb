#include "glueflow/flow.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>
#include <queue>
#include <sstream>

#include "glueflow/errors.hpp"

namespace glueflow {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Segment: return "segment";
    case EventKind::Jump: return "jump";
    case EventKind::PlaneHit: return "plane-hit";
    case EventKind::Stall: return "stall";
    case EventKind::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

const char* to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::Completed: return "completed";
    case FlowStatus::PlaneHit: return "plane-hit";
    case FlowStatus::Stalled: return "stalled";
    case FlowStatus::BudgetExhausted: return "budget-exhausted";
    case FlowStatus::Unreachable: return "unreachable";
  }
  return "?";
}

namespace {

constexpr double kQuadratureTolerance = 1e-13;
constexpr int kQuadratureMaxSplits = 4000;
// Window next to a vanishing plane inside which a slow trajectory counts as stalled.
constexpr double kStallWindow = 1e-3;
// Event-location tolerance in x.
constexpr double kSnapDistance = 1e-11;

struct SpeedFn {
  SpeedTag tag = SpeedTag::Unit;
  int n = 0;
  double z0 = 0.0;
  double zstar = 0.0;

  double operator()(double x) const {
    switch (tag) {
      case SpeedTag::Unit: return 1.0;
      case SpeedTag::Fold: return fold_speed(n, x, zstar);
      case SpeedTag::Twist: return twist_speed(n, x, z0, zstar);
    }
    return 1.0;
  }
};

struct QuadPiece {
  double a, b, value, error;
  bool operator<(const QuadPiece& o) const { return error < o.error; }
};

template <class F>
QuadPiece gk_piece(const F& f, double a, double b) {
  // Boost reports the error of the [-1, 1] rule, so rescale by hand.
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double error = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      [&](double t) { return f(c + h * t); }, -1.0, 1.0, 0, 0.0, &error);
  return {a, b, h * v, h * error};
}

// Integral of 1 / speed over [a, b] (a <= b), speed positive on (a, b).
// Globally adaptive: always bisect the piece with the largest error estimate.
double integrate_inverse_speed(const SpeedFn& sp, double a, double b) {
  if (sp.tag == SpeedTag::Unit) return b - a;
  if (b <= a) return 0.0;
  const auto f = [&](double x) { return 1.0 / sp(x); };
  std::priority_queue<QuadPiece> pieces;
  QuadPiece first = gk_piece(f, a, b);
  double total = first.value;
  double error = first.error;
  pieces.push(first);
  for (int splits = 0; splits < kQuadratureMaxSplits; ++splits) {
    if (!std::isfinite(total)) break;
    if (error <= kQuadratureTolerance * std::abs(total)) break;
    const QuadPiece worst = pieces.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    pieces.pop();
    const QuadPiece left = gk_piece(f, worst.a, mid);
    const QuadPiece right = gk_piece(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    pieces.push(left);
    pieces.push(right);
  }
  // Re-sum to drop the drift of the running total.
  double value = 0.0;
  while (!pieces.empty()) {
    value += pieces.top().value;
    pieces.pop();
  }
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "travel-time quadrature diverged on [" << a << ", " << b << "]";
    throw NumericalError(os.str());
  }
  return value;
}

// Integral along the direction of motion from x over distance s.
double directed_time(const SpeedFn& sp, double x, double sign, double s) {
  return sign > 0 ? integrate_inverse_speed(sp, x, x + s) : integrate_inverse_speed(sp, x - s, x);
}

// Distance travelled from x in time tau, given the segment length and its total time.
double solve_distance(const SpeedFn& sp, double x, double sign, double length, double tau) {
  if (sp.tag == SpeedTag::Unit) return std::min(tau, length);
  const double guess = std::clamp(tau * sp(x), 0.0, length);
  std::uintmax_t iterations = 200;
  const int digits = std::numeric_limits<double>::digits - 6;
  return boost::math::tools::newton_raphson_iterate(
      [&](double s) {
        return std::make_pair(directed_time(sp, x, sign, s) - tau, 1.0 / sp(x + sign * s));
      },
      guess, 0.0, length, digits, iterations);
}

enum class Action { Pass, Continue, Jump, CircleStall, Infinite };

struct Boundary {
  double x = 0.0;
  Action action = Action::Pass;
  bool vanishing = false;
  int rule = 0;
  int level = 0;
  CellKind kind = CellKind::Base;
  double target_x = 0.0;
  FiberMap map = FiberMap::Identity;
};

struct FiberCache {
  std::optional<double> z0;
  std::optional<Fiber> psi_inv;
  std::optional<Fiber> psi_fwd;
  std::optional<double> zstar;
};

struct MappedFiber {
  Fiber from;
  Fiber to;
  FiberMap map = FiberMap::Identity;
};

class Engine {
 public:
  Engine(const DisplayedSystem& system, const FlowBudget& budget, const FlowOptions& options,
         Direction direction)
      : sys_(system), budget_(budget), options_(options), dir_(direction),
        sign_(sign_of(direction)), cache_(system.depth() + 1), history_(system.depth() + 1) {}

  void start(const SpacePoint& sigma) {
    const Location loc = locate(sys_, sigma);
    if (!loc.member) {
      std::ostringstream os;
      os << "flow: start point (" << sigma.x << ", " << sigma.fiber.y << ", " << sigma.fiber.z
         << ") is not in M";
      throw NotInManifoldError(os.str());
    }
    level_ = loc.cell.level;
    kind_ = loc.cell.kind;
    x_ = sigma.x;
    u_ = sigma.fiber;
    fresh_ = true;
    result_.itinerary.start = sigma;
    result_.itinerary.direction = dir_;
    record_segment();
  }

  // Runs until elapsed time reaches time_limit or the target plane is crossed.
  FlowResult run(double time_limit, std::optional<double> target) {
    const double limit = std::min(time_limit, budget_.max_time);
    if (target && *target == x_) return finish_hit();

    for (;;) {
      const Boundary bd = next_boundary();
      const SpeedFn sp = speed_fn();

      double end = bd.x;
      bool stall = false;
      if (bd.action != Action::Infinite && bd.vanishing && end != x_ && sp(end) < budget_.stall_speed) {
        end = stall_point(sp, bd.x);
        stall = true;
      }

      // Planes crossed on (x, end].
      std::vector<double> planes;
      auto consider = [&](double c) {
        if (sign_ * (c - x_) > 0 && sign_ * (end - c) >= 0) planes.push_back(c);
      };
      for (double c : options_.watch_planes) consider(c);
      if (target) consider(*target);
      std::sort(planes.begin(), planes.end(), [&](double a, double b) { return sign_ * a < sign_ * b; });
      planes.erase(std::unique(planes.begin(), planes.end()), planes.end());

      if (bd.action == Action::Infinite && planes.empty()) {
        if (!std::isfinite(limit)) {
          result_.status = FlowStatus::Unreachable;
          return finish();
        }
        x_ += sign_ * (limit - elapsed_);
        elapsed_ = limit;
        if (limit < time_limit) return exhausted();
        return finish();
      }

      for (double c : planes) {
        if (!advance_to(sp, c, limit)) return timed_out(time_limit, limit);
        if (target && c == *target) return finish_hit();
        record_plane(c);
      }
      if (bd.action == Action::Infinite) continue;
      const bool snap = bd.action == Action::Jump && !source_owned(bd.rule);
      if (!advance_to(sp, end, limit, snap)) return timed_out(time_limit, limit);
      // A flow ending exactly on a plane stays there when the plane belongs to the current cell.
      if (elapsed_ >= limit && !(bd.action == Action::Jump && !source_owned(bd.rule))) {
        return timed_out(time_limit, limit);
      }

      if (stall) return stalled(bd.x, sp(end));
      if (!apply(bd)) return result_stalled_on_circle(bd);
      fresh_ = false;
      if (result_.jumps > budget_.max_jumps) return exhausted();
    }
  }

 private:
  int n_of(int level) const { return level == 0 ? 0 : sys_.level(level).N; }
  bool top(int level) const { return level == sys_.depth(); }
  CellKind leftmost(int level) const { return level == 0 ? CellKind::Base : CellKind::Left; }
  CellKind rightmost(int level) const { return level == 0 ? CellKind::Base : CellKind::Right; }

  double z0(int level) {
    auto& c = cache_[level];
    if (!c.z0) c.z0 = sys_.level(level).disks.zeta0(u_);
    return *c.z0;
  }
  Fiber psi_inv(int level) {
    auto& c = cache_[level];
    if (!c.psi_inv) c.psi_inv = sys_.level(level).psi().inverse(u_);
    return *c.psi_inv;
  }
  Fiber psi_fwd(int level) {
    auto& c = cache_[level];
    if (!c.psi_fwd) c.psi_fwd = sys_.level(level).psi().apply(u_);
    return *c.psi_fwd;
  }
  double zstar(int level) {
    auto& c = cache_[level];
    if (!c.zstar) c.zstar = sys_.level(level).disks.zeta0(psi_inv(level));
    return *c.zstar;
  }

  SpeedFn speed_fn() {
    SpeedFn sp;
    if (kind_ == CellKind::Fold) {
      sp.tag = SpeedTag::Fold;
      sp.n = n_of(level_);
      sp.zstar = zstar(level_);
    } else if (kind_ == CellKind::Twist) {
      sp.tag = SpeedTag::Twist;
      sp.n = n_of(level_);
      sp.z0 = z0(level_);
      sp.zstar = zstar(level_);
    }
    return sp;
  }

  static bool source_owned(int rule) {
    switch (rule) {
      case 1: case 2: case 5: case 8: case -3: case -4: case -6: case -7: return true;
      default: return false;
    }
  }

  bool beyond(double p) const { return fresh_ ? sign_ * (p - x_) >= 0 : sign_ * (p - x_) > 0; }

  Boundary pass(double p, bool vanishing) {
    Boundary b;
    b.x = p;
    b.vanishing = vanishing;
    return b;
  }
  Boundary jump(double p, int rule, int level, CellKind kind, double target_x, FiberMap map,
                bool vanishing = false) {
    Boundary b;
    b.x = p;
    b.action = Action::Jump;
    b.vanishing = vanishing;
    b.rule = rule;
    b.level = level;
    b.kind = kind;
    b.target_x = target_x;
    b.map = map;
    return b;
  }
  Boundary cont(double p, int level, CellKind kind) {
    Boundary b;
    b.x = p;
    b.action = Action::Continue;
    b.level = level;
    b.kind = kind;
    b.target_x = p;
    return b;
  }
  Boundary infinite() {
    Boundary b;
    b.x = sign_ * kInf;
    b.action = Action::Infinite;
    return b;
  }
  Boundary circle(Boundary b) {
    b.action = Action::CircleStall;
    return b;
  }

  Boundary next_boundary() {
    const int L = level_;
    const double n = n_of(L);
    const bool fwd = dir_ == Direction::Forward;
    switch (kind_) {
      case CellKind::Base:
        if (top(0)) return infinite();
        return fwd ? jump(1, 3, 1, CellKind::Twist, 2, FiberMap::Identity) : cont(-1, 1, CellKind::Shift);
      case CellKind::Left:
        if (fwd) return jump(-n - 9, 1, L, CellKind::Fold, -n - 8, FiberMap::Identity);
        if (top(L)) return infinite();
        return cont(-n - 10, L + 1, CellKind::Shift);
      case CellKind::Right:
        if (!fwd) return jump(n + 9, -4, L, CellKind::Twist, n + 8, FiberMap::Identity);
        if (top(L)) return infinite();
        return jump(n + 10, 3, L + 1, CellKind::Twist, n + 11, FiberMap::Identity);
      case CellKind::Shift:
        if (fwd) return cont(-n, L - 1, leftmost(L - 1));
        return jump(-n - sys_.level(L).lambda0(u_), -2, L, CellKind::Fold, -n - 5, FiberMap::Identity);
      case CellKind::Fold:
        return fwd ? fold_forward(L, n) : fold_backward(L, n);
      case CellKind::Twist:
        return fwd ? twist_forward(L, n) : twist_backward(L, n);
    }
    throw NumericalError("flow: unknown cell kind");
  }

  // Rule at a plane that fires only for fibers in a disk; fibers on the
  // bounding circle (within the membership band) stall there.
  Boundary disk_rule(double p, double zeta, Boundary fire) {
    if (zeta > 0.0) return pass(p, true);
    if (std::abs(zeta) < kMembershipBand) return circle(fire);
    return fire;
  }

  Boundary fold_forward(int L, double n) {
    if (beyond(-n - 7)) {
      return disk_rule(-n - 7, zstar(L),
                       jump(-n - 7, 5, L, CellKind::Twist, n + 3, FiberMap::PsiInverse, true));
    }
    if (beyond(-n - 6)) return pass(-n - 6, true);
    return jump(-n - 5, 2, L, CellKind::Shift, -n - sys_.level(L).lambda0(u_), FiberMap::Identity);
  }

  Boundary fold_backward(int L, double n) {
    if (beyond(-n - 5)) return pass(-n - 5, false);
    if (beyond(-n - 6)) {
      return disk_rule(-n - 6, zstar(L),
                       jump(-n - 6, -6, L, CellKind::Twist, n + 2, FiberMap::PsiInverse, true));
    }
    if (beyond(-n - 7)) return pass(-n - 7, true);
    return jump(-n - 8, -1, L, CellKind::Left, -n - 9, FiberMap::Identity);
  }

  Boundary twist_forward(int L, double n) {
    if (beyond(n + 2)) return disk_rule(n + 2, z0(L), jump(n + 2, 6, L, CellKind::Fold, -n - 6, FiberMap::Psi, true));
    if (beyond(n + 3)) return pass(n + 3, true);
    if (beyond(n + 4)) return disk_rule(n + 4, z0(L), jump(n + 4, 7, L, CellKind::Twist, n + 7, FiberMap::Psi, true));
    if (beyond(n + 5)) return pass(n + 5, true);
    if (beyond(n + 6)) {
      return disk_rule(n + 6, zstar(L), jump(n + 6, 8, L, CellKind::Twist, n + 5, FiberMap::PsiInverse, true));
    }
    if (beyond(n + 7)) return pass(n + 7, true);
    return jump(n + 8, 4, L, CellKind::Right, n + 9, FiberMap::Identity);
  }

  Boundary twist_backward(int L, double n) {
    if (beyond(n + 7)) {
      return disk_rule(n + 7, zstar(L), jump(n + 7, -7, L, CellKind::Twist, n + 4, FiberMap::PsiInverse, true));
    }
    if (beyond(n + 6)) return pass(n + 6, true);
    if (beyond(n + 5)) return disk_rule(n + 5, z0(L), jump(n + 5, -8, L, CellKind::Twist, n + 6, FiberMap::Psi, true));
    if (beyond(n + 4)) return pass(n + 4, true);
    if (beyond(n + 3)) return disk_rule(n + 3, z0(L), jump(n + 3, -5, L, CellKind::Fold, -n - 7, FiberMap::Psi, true));
    if (beyond(n + 2)) return pass(n + 2, true);
    return jump(n + 1, -3, L - 1, rightmost(L - 1), n, FiberMap::Identity);
  }

  // Point next to the vanishing plane p where the speed equals stall_speed.
  double stall_point(const SpeedFn& sp, double p) const {
    double far = p - sign_ * kStallWindow;
    if (sign_ * (far - x_) < 0) far = x_;
    if (sp(far) <= budget_.stall_speed) return far;
    double a = far;
    double b = p;
    for (int i = 0; i < 200 && a != b; ++i) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      (sp(m) > budget_.stall_speed ? a : b) = m;
    }
    return a;
  }

  // Moves to c within the segment; false if the time limit is reached first.
  // With snap, a stop within kSnapDistance of c counts as reaching c, so a
  // flow ending on an open jump source lands on the glued side.
  bool advance_to(const SpeedFn& sp, double c, double limit, bool snap = false) {
    const double length = std::abs(c - x_);
    const double dt = directed_time(sp, x_, sign_, length);
    if (elapsed_ + dt > limit) {
      const double tau = limit - elapsed_;
      const double s = tau > 0 ? solve_distance(sp, x_, sign_, length, tau) : 0.0;
      elapsed_ = limit;
      if (snap && length - s <= kSnapDistance) {
        x_ = c;
        return true;
      }
      x_ += sign_ * s;
      return false;
    }
    elapsed_ += dt;
    x_ = c;
    return true;
  }

  bool apply(const Boundary& bd) {
    switch (bd.action) {
      case Action::Pass:
        if (options_.recording == Recording::All) record_plane(bd.x);
        return true;
      case Action::CircleStall:
        return false;
      case Action::Continue:
        level_ = bd.level;
        kind_ = bd.kind;
        record_segment();
        return true;
      case Action::Jump: {
        const SpacePoint source{x_, u_};
        const int rule_level = std::max(level_, bd.level);
        if (bd.map != FiberMap::Identity) map_fiber(rule_level, bd.map);
        level_ = bd.level;
        kind_ = bd.kind;
        x_ = bd.target_x;
        ++result_.jumps;
        if (options_.recording != Recording::None) {
          TrajectoryEvent e = event(EventKind::Jump, source);
          e.level = rule_level;
          e.rule = bd.rule;
          e.target = {x_, u_};
          result_.itinerary.events.push_back(e);
        }
        record_segment();
        return true;
      }
      case Action::Infinite:
        return true;
    }
    return true;
  }

  // Applies psi or its inverse at `level`. A map that undoes the last one
  // applied at that level returns the earlier fiber exactly, so descending a
  // psi-ladder retraces the ascent instead of re-integrating.
  void map_fiber(int level, FiberMap map) {
    auto& history = history_[level];
    const Fiber from = u_;
    if (!history.empty() && history.back().to == from && history.back().map != map) {
      const MappedFiber last = history.back();
      history.pop_back();
      set_fiber(last.from);
      if (last.map == FiberMap::Psi) cache_[level].psi_fwd = from;
      else cache_[level].psi_inv = from;
      return;
    }
    const Fiber to = map == FiberMap::Psi ? psi_fwd(level) : psi_inv(level);
    history.push_back({from, to, map});
    set_fiber(to);
    if (map == FiberMap::Psi) cache_[level].psi_inv = from;
    else cache_[level].psi_fwd = from;
  }

  void set_fiber(Fiber v) {
    u_ = v;
    for (auto& c : cache_) c = FiberCache{};
  }

  TrajectoryEvent event(EventKind kind, SpacePoint at) const {
    TrajectoryEvent e;
    e.kind = kind;
    e.time = elapsed_;
    e.position = at;
    e.level = level_;
    e.cell = kind_;
    e.direction = dir_;
    return e;
  }

  void record_segment() {
    if (options_.recording != Recording::All) return;
    result_.itinerary.events.push_back(event(EventKind::Segment, {x_, u_}));
  }

  void record_plane(double c) {
    if (options_.recording != Recording::All) return;
    auto& events = result_.itinerary.events;
    if (!events.empty() && events.back().kind == EventKind::PlaneHit && events.back().position.x == c &&
        events.back().position.fiber == u_) {
      return;
    }
    events.push_back(event(EventKind::PlaneHit, {c, u_}));
  }

  FlowResult finish() {
    result_.end = {x_, u_};
    result_.elapsed = elapsed_;
    return std::move(result_);
  }

  FlowResult finish_hit() {
    result_.status = FlowStatus::PlaneHit;
    if (options_.recording == Recording::All) {
      result_.itinerary.events.push_back(event(EventKind::PlaneHit, {x_, u_}));
    }
    return finish();
  }

  FlowResult timed_out(double time_limit, double limit) {
    if (limit < time_limit) return exhausted();
    result_.status = FlowStatus::Completed;
    return finish();
  }

  FlowResult exhausted() {
    result_.status = FlowStatus::BudgetExhausted;
    TrajectoryEvent e = event(EventKind::BudgetExhausted, {x_, u_});
    e.rule = static_cast<int>(std::min<long>(result_.jumps, std::numeric_limits<int>::max()));
    result_.terminal = e;
    if (options_.recording != Recording::None) result_.itinerary.events.push_back(e);
    return finish();
  }

  FlowResult stalled(double plane, double speed_at_stop) {
    result_.status = FlowStatus::Stalled;
    TrajectoryEvent e = event(EventKind::Stall, {x_, u_});
    e.target = {plane, u_};
    e.speed = speed_at_stop;
    result_.terminal = e;
    if (options_.recording != Recording::None) result_.itinerary.events.push_back(e);
    return finish();
  }

  FlowResult result_stalled_on_circle(const Boundary& bd) {
    const SpeedFn sp = speed_fn();
    return stalled(bd.x, sp(bd.x));
  }

  const DisplayedSystem& sys_;
  FlowBudget budget_;
  const FlowOptions& options_;
  Direction dir_;
  double sign_;
  std::vector<FiberCache> cache_;
  std::vector<std::vector<MappedFiber>> history_;

  int level_ = 0;
  CellKind kind_ = CellKind::Base;
  double x_ = 0.0;
  Fiber u_;
  bool fresh_ = true;
  double elapsed_ = 0.0;
  FlowResult result_;
};

}  // namespace

FlowResult flow(const DisplayedSystem& system, const SpacePoint& sigma, double t, const FlowBudget& budget,
                const FlowOptions& options) {
  if (!std::isfinite(t)) throw PreconditionError("flow: time must be finite");
  Engine engine(system, budget, options, t >= 0 ? Direction::Forward : Direction::Backward);
  engine.start(sigma);
  return engine.run(std::abs(t), std::nullopt);
}

SpacePoint flow_point(const DisplayedSystem& system, const SpacePoint& sigma, double t, const FlowBudget& budget) {
  FlowResult r = flow(system, sigma, t, budget);
  if (r.status != FlowStatus::Completed) {
    std::ostringstream os;
    os << "flow: " << to_string(r.status) << " at x = " << r.end.x << " after time " << r.elapsed;
    throw FlowError(os.str());
  }
  return r.end;
}

FlowResult advance_to_plane(const DisplayedSystem& system, const SpacePoint& sigma, double x_target,
                            Direction direction, const FlowBudget& budget, const FlowOptions& options) {
  Engine engine(system, budget, options, direction);
  engine.start(sigma);
  return engine.run(kInf, x_target);
}

double travel_time(const LevelParams& params, SpeedTag tag, double x_a, double x_b, Fiber fiber) {
  SpeedFn sp;
  sp.tag = tag;
  sp.n = params.N;
  if (tag != SpeedTag::Unit) {
    sp.z0 = params.disks.zeta0(fiber);
    sp.zstar = params.disks.zeta_star(fiber);
  }
  const double lo = std::min(x_a, x_b);
  const double hi = std::max(x_a, x_b);
  const double sign = x_b >= x_a ? 1.0 : -1.0;
  if (tag == SpeedTag::Unit) return sign * (hi - lo);

  const double n = params.N;
  std::vector<double> planes;
  if (tag == SpeedTag::Fold) planes = {-n - 7, -n - 6};
  else planes = {n + 2, n + 3, n + 4, n + 5, n + 6, n + 7};
  std::vector<double> cuts{lo};
  for (double p : planes) {
    if (p < lo || p > hi) continue;
    const double v = sp(p);
    if (v == 0.0 || (tag == SpeedTag::Fold && std::abs(sp.zstar) < kMembershipBand) ||
        (tag == SpeedTag::Twist && p <= n + 5 && std::abs(sp.z0) < kMembershipBand) ||
        (tag == SpeedTag::Twist && p >= n + 6 && std::abs(sp.zstar) < kMembershipBand)) {
      std::ostringstream os;
      os << "travel_time: speed vanishes at x = " << p << " for fiber (" << fiber.y << ", " << fiber.z << ")";
      throw NonIntegrableError(os.str());
    }
    if (p > lo && p < hi) cuts.push_back(p);
  }
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate_inverse_speed(sp, cuts[i], cuts[i + 1]);
  return sign * total;
}

double travel_time(const DisplayedSystem& system, int level, SpeedTag tag, double x_a, double x_b, Fiber fiber) {
  if (tag == SpeedTag::Unit) return x_b - x_a;
  if (level < 1 || level > system.depth()) throw PreconditionError("travel_time: level out of range");
  return travel_time(system.level(level), tag, x_a, x_b, fiber);
}

std::vector<double> diagnostic_planes(const DisplayedSystem& system) {
  std::vector<double> planes;
  for (int L = 1; L <= system.depth(); ++L) {
    const double n = system.level(L).N;
    for (double c : {-n + 0.5, n - 0.5, n + 1.5, n + 3.5, n + 5.5, n + 7.5, -n - 5.5}) planes.push_back(c);
  }
  const double N = system.N();
  planes.push_back(-N);
  planes.push_back(N);
  std::sort(planes.begin(), planes.end());
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());
  return planes;
}

Itinerary orbit_itinerary(const DisplayedSystem& system, const SpacePoint& sigma, const FlowBudget& budget) {
  FlowOptions options;
  options.recording = Recording::All;
  options.watch_planes = diagnostic_planes(system);
  const double N = system.N();
  if (sigma.x >= N) {
    FlowResult r = flow(system, sigma, 0.0, budget, options);
    return r.itinerary;
  }
  return advance_to_plane(system, sigma, N, Direction::Forward, budget, options).itinerary;
}

void write_itinerary_csv(const Itinerary& itinerary, std::ostream& out) {
  out << "time,x,y,z,event,rule\n";
  out << std::setprecision(17);
  for (const auto& e : itinerary.events) {
    out << e.time << ',' << e.position.x << ',' << e.position.fiber.y << ',' << e.position.fiber.z << ','
        << to_string(e.kind) << ',' << e.rule << '\n';
    if (e.kind == EventKind::Jump) {
      out << e.time << ',' << e.target.x << ',' << e.target.fiber.y << ',' << e.target.fiber.z << ",jump-target,"
          << e.rule << '\n';
    }
  }
}

std::string itinerary_json(const Itinerary& itinerary) {
  nlohmann::json j;
  j["start"] = {itinerary.start.x, itinerary.start.fiber.y, itinerary.start.fiber.z};
  j["direction"] = itinerary.direction == Direction::Forward ? "forward" : "backward";
  auto& events = j["events"] = nlohmann::json::array();
  for (const auto& e : itinerary.events) {
    nlohmann::json je{{"kind", to_string(e.kind)},
                      {"time", e.time},
                      {"position", {e.position.x, e.position.fiber.y, e.position.fiber.z}},
                      {"level", e.level},
                      {"cell", to_string(e.cell)}};
    if (e.kind == EventKind::Jump) {
      je["rule"] = e.rule;
      je["target"] = {e.target.x, e.target.fiber.y, e.target.fiber.z};
    }
    if (e.kind == EventKind::Stall) {
      je["plane"] = e.target.x;
      je["speed"] = e.speed;
    }
    events.push_back(std::move(je));
  }
  return j.dump(2);
}

}  // namespace glueflow
