#include "glueflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "glueflow/builder.hpp"
#include "glueflow/errors.hpp"
#include "glueflow/stats.hpp"

namespace glueflow {

namespace {

constexpr double kClassifyDistance = 1e-2;
constexpr double kClassifyReach = 1.5;
constexpr double kRegimeMargin = 1e-3;
constexpr long kMaxLadder = 2000;
constexpr double kSampleBox = 3.0;

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::string point_text(const SpacePoint& p) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << p.x << ", " << p.fiber.y << ", " << p.fiber.z << ")";
  return os.str();
}

bool inside(const DisplayedSystem& system, const SpacePoint& p) {
  const Location loc = locate(system, p);
  return loc.member && !loc.ambiguous;
}

// Uniform point of M in (-N, N) x [-3, 3]^2; counts rejections.
SpacePoint sample_member(const DisplayedSystem& system, std::mt19937_64& rng, int& rejected) {
  const double N = system.N();
  std::uniform_real_distribution<double> ux(-N, N);
  std::uniform_real_distribution<double> uf(-kSampleBox, kSampleBox);
  for (;;) {
    SpacePoint p{ux(rng), {uf(rng), uf(rng)}};
    if (p.x > -N && inside(system, p)) return p;
    ++rejected;
  }
}

Fiber sample_disk(Fiber center, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double a = 2.0 * std::numbers::pi * u(rng);
  return {center.y + r * std::cos(a), center.z + r * std::sin(a)};
}

double circle_distance(const LevelParams& p, Fiber v) { return std::abs(norm(v - p.w0) - 1.0); }

}  // namespace

const char* to_string(BadSetTag tag) {
  switch (tag) {
    case BadSetTag::C0: return "C0";
    case BadSetTag::Cstar: return "C*";
    case BadSetTag::C0orZV: return "C0 u Z_V";
    case BadSetTag::CstarOrZH: return "C* u Z_H";
    case BadSetTag::InheritedNonflat: return "inherited-nonflat";
  }
  return "?";
}

const char* to_string(FlatFailure failure) {
  switch (failure) {
    case FlatFailure::None: return "none";
    case FlatFailure::Stall: return "stall";
    case FlatFailure::FiberMismatch: return "fiber-mismatch";
    case FlatFailure::Budget: return "budget";
    case FlatFailure::Unreachable: return "unreachable";
  }
  return "?";
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::B0MinusBstar: return "B0 minus B*";
    case Regime::BstarMinusCstar: return "B* minus C*";
    case Regime::Outside: return "outside B0 u B*";
  }
  return "?";
}

BadSetCatalog bad_set_catalog(const DisplayedSystem& system) {
  BadSetCatalog catalog;
  for (int L = 1; L <= system.depth(); ++L) {
    const LevelParams& p = system.level(L);
    const double n = p.N;
    catalog.sets.push_back({L, 0, std::numeric_limits<double>::quiet_NaN(), BadSetTag::InheritedNonflat});
    catalog.sets.push_back({L, 1, n + 7.5, BadSetTag::Cstar});
    catalog.sets.push_back({L, 2, n + 3.5, BadSetTag::C0});
    catalog.sets.push_back({L, 3, -n - 5.5, BadSetTag::CstarOrZH});
    catalog.sets.push_back({L, 4, n + 5.5, BadSetTag::C0orZV});
    catalog.sets.push_back({L, 5, n + 1.5, BadSetTag::C0orZV});
    catalog.sets.push_back({L, 6, n + 5.5, BadSetTag::Cstar});
    catalog.sets.push_back({L, 7, -static_cast<double>(p.N_prime), BadSetTag::Cstar});
  }
  return catalog;
}

double planar_distance(const LevelParams& params, BadSetTag tag, Fiber v) {
  switch (tag) {
    case BadSetTag::C0: return circle_distance(params, v);
    case BadSetTag::Cstar: return circle_distance(params, params.psi().inverse(v));
    case BadSetTag::C0orZV: return std::min(circle_distance(params, v), params.disks.distance_to_ZV(v));
    case BadSetTag::CstarOrZH:
      return std::min(circle_distance(params, params.psi().inverse(v)), params.disks.distance_to_ZH(v));
    case BadSetTag::InheritedNonflat: return kInf;
  }
  return kInf;
}

std::string StallClass::label() const {
  if (!classified) return "unclassified";
  std::ostringstream os;
  os << "level " << set.level << " Z'" << set.index << " " << to_string(set.tag);
  return os.str();
}

StallClass classify_stall(const DisplayedSystem& system, const TrajectoryEvent& event,
                          const BadSetCatalog& catalog) {
  StallClass best;
  if (event.level < 1 || event.level > system.depth()) return best;
  const LevelParams& p = system.level(event.level);
  // Budget exhaustion happens on a psi-ladder, away from any particular plane.
  const bool anywhere = event.kind == EventKind::BudgetExhausted;
  for (const BadSet& set : catalog.sets) {
    if (set.level != event.level || set.tag == BadSetTag::InheritedNonflat) continue;
    if (!anywhere && !(std::abs(set.plane - event.position.x) <= kClassifyReach)) continue;
    const double d = planar_distance(p, set.tag, event.position.fiber);
    if (d < best.distance) {
      best.distance = d;
      best.set = set;
    }
  }
  best.classified = best.distance <= kClassifyDistance;
  return best;
}

FlatnessResult is_flat(const DisplayedSystem& system, const SpacePoint& sigma, const FlowBudget& budget) {
  const double N = system.N();
  FlatnessResult result;
  auto leg = [&](double plane, Direction dir) -> std::optional<Fiber> {
    const FlowResult r = advance_to_plane(system, sigma, plane, dir, budget);
    if (r.status == FlowStatus::PlaneHit) return r.end.fiber;
    result.terminal = r.terminal;
    if (r.status == FlowStatus::Stalled) result.failure = FlatFailure::Stall;
    else if (r.status == FlowStatus::BudgetExhausted) result.failure = FlatFailure::Budget;
    else result.failure = FlatFailure::Unreachable;
    return std::nullopt;
  };
  const auto back = leg(-N, Direction::Backward);
  if (!back) return result;
  const auto fwd = leg(N, Direction::Forward);
  if (!fwd) return result;
  result.fiber = *back;
  result.mismatch = distance(*back, *fwd);
  if (result.mismatch > kFiberTolerance) {
    result.failure = FlatFailure::FiberMismatch;
    return result;
  }
  result.flat = true;
  return result;
}

FlatFractionReport flat_fraction(const DisplayedSystem& system, int n, const FlowBudget& budget,
                                 std::uint64_t seed) {
  if (n < 1) throw PreconditionError("flat_fraction: need at least one sample");
  FlatFractionReport report;
  const BadSetCatalog catalog = bad_set_catalog(system);
  for (int i = 0; i < n; ++i) {
    auto rng = substream(seed, static_cast<std::uint64_t>(i));
    const SpacePoint sigma = sample_member(system, rng, report.rejected);
    ++report.samples;
    const FlatnessResult r = is_flat(system, sigma, budget);
    if (r.flat) {
      ++report.flat;
      continue;
    }
    ++report.failures[to_string(r.failure)];
    if (report.nonflat_witnesses.size() < 20) report.nonflat_witnesses.push_back(sigma);
    if (r.terminal) {
      const StallClass c = classify_stall(system, *r.terminal, catalog);
      ++report.stall_tags[c.label()];
      if (c.classified) ++report.nonflat_classified;
    } else {
      ++report.stall_tags["unclassified"];
    }
  }
  return report;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 2) return {lo};
  std::vector<double> v(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) v[i] = std::exp(a + (b - a) * i / (count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

JetOrderResult jet_order(const DisplayedSystem& system, const SpacePoint& base, double T,
                         const JetOrderOptions& options, const FlowBudget& budget) {
  JetOrderResult result;
  result.deltas = options.deltas.empty() ? log_spaced(1e-3, 1e-1, 9) : options.deltas;
  const double dmax = *std::max_element(result.deltas.begin(), result.deltas.end());

  const FlowResult home = flow(system, base, T, budget);
  if (home.status != FlowStatus::Completed) {
    throw PreconditionError("jet_order: flow of the base point did not complete: " +
                            std::string(to_string(home.status)));
  }
  result.base_defect = distance(home.end, base);
  if (result.base_defect > kFiberTolerance) {
    std::ostringstream os;
    os << "jet_order: base point " << point_text(base) << " is not periodic with period " << T
       << " (defect " << result.base_defect << ")";
    throw PreconditionError(os.str());
  }
  result.floor = std::max(options.noise_floor, 100.0 * result.base_defect);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<double>> xs;
  std::vector<std::vector<double>> ys;
  for (int i = 0; i < options.directions; ++i) {
    SpacePoint u;
    bool found = false;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      u = {gauss(rng), {gauss(rng), gauss(rng)}};
      const double len = std::sqrt(u.x * u.x + u.fiber.y * u.fiber.y + u.fiber.z * u.fiber.z);
      if (len == 0.0) continue;
      u = {u.x / len, {u.fiber.y / len, u.fiber.z / len}};
      found = true;
      for (double d : result.deltas) {
        if (!inside(system, {base.x + d * u.x, base.fiber + d * u.fiber})) {
          found = false;
          break;
        }
      }
      if (found && !inside(system, {base.x + dmax * u.x, base.fiber + dmax * u.fiber})) found = false;
    }
    if (!found) throw PreconditionError("jet_order: no perturbation direction stays in M");
    result.directions.push_back(u);

    std::vector<double> errs;
    std::vector<double> lx;
    std::vector<double> ly;
    for (double d : result.deltas) {
      const SpacePoint q{base.x + d * u.x, base.fiber + d * u.fiber};
      const FlowResult r = flow(system, q, T, budget);
      if (r.status != FlowStatus::Completed) {
        std::ostringstream os;
        os << "jet_order: perturbed flow from " << point_text(q) << " ended with " << to_string(r.status);
        throw FlowError(os.str());
      }
      const double e = distance(r.end, q);
      errs.push_back(e);
      if (e > result.floor) {
        lx.push_back(std::log(d));
        ly.push_back(std::log(e));
      }
    }
    result.errors.push_back(errs);
    if (lx.size() >= 2) {
      result.used += static_cast<int>(lx.size());
      xs.push_back(std::move(lx));
      ys.push_back(std::move(ly));
    }
  }
  if (xs.empty()) {
    result.at_floor = true;
    result.slope = std::numeric_limits<double>::quiet_NaN();
  } else {
    result.slope = pooled_slope(xs, ys);
  }
  return result;
}

CheckReport check_crossing_fiber(const DisplayedSystem& system, int level, int n_samples, std::uint64_t seed,
                           const FlowBudget& budget) {
  if (level < 1 || level > system.depth()) throw PreconditionError("check_crossing_fiber: level out of range");
  CheckReport report;
  report.check = "crossing-fiber";
  const LevelParams& p = system.level(level);
  const DisplayedSystem inner = system.prefix(level - 1);
  const double N = p.N;
  for (int i = 0; i < n_samples; ++i) {
    auto rng = substream(seed, static_cast<std::uint64_t>(i));
    const Fiber w = i == 0 ? p.w0 : sample_disk(p.w0, p.W_radius, rng);
    ++report.samples;
    try {
      const double t = lambda1(inner, w, budget);
      const FlowResult r = flow(inner, {-N, w}, t, budget);
      const double err = distance(r.end, SpacePoint{N, w});
      report.max_error = std::max(report.max_error, err);
      if (r.status != FlowStatus::Completed || err > kFiberTolerance) {
        std::ostringstream os;
        os << "ended at " << point_text(r.end) << " (" << to_string(r.status) << "), error " << err;
        report.fail({report.check, {-N, w}, os.str()});
      }
    } catch (const Error& e) {
      report.fail({report.check, {-N, w}, e.what()});
    }
  }
  return report;
}

CheckReport check_return_map(const DisplayedSystem& system, int level, int n_samples, std::uint64_t seed,
                           const FlowBudget& budget) {
  if (level < 1 || level > system.depth()) throw PreconditionError("check_return_map: level out of range");
  CheckReport report;
  report.check = "return-map";
  const DisplayedSystem sys = system.prefix(level);
  const LevelParams& p = sys.level(level);
  const double x0 = -p.N - 6.0;
  for (int i = 0; i < n_samples; ++i) {
    auto rng = substream(seed, static_cast<std::uint64_t>(i));
    const Fiber w = i == 0 ? p.w0 : sample_disk(p.w0, p.W_radius, rng);
    ++report.samples;
    try {
      const double t = return_time(sys, level, w, budget);
      const FlowResult r = flow(sys, {x0, w}, t, budget);
      const SpacePoint expect{x0, p.psi().apply(w)};
      const double err = distance(r.end, expect);
      report.max_error = std::max(report.max_error, err);
      if (r.status != FlowStatus::Completed || err > kFiberTolerance) {
        std::ostringstream os;
        os << "ended at " << point_text(r.end) << " (" << to_string(r.status) << "), expected "
           << point_text(expect);
        report.fail({report.check, {x0, w}, os.str()});
      }
    } catch (const Error& e) {
      report.fail({report.check, {x0, w}, e.what()});
    }
  }
  return report;
}

std::vector<SpacePoint> expected_waypoints(const DisplayedSystem& system, Fiber v, Regime regime) {
  if (system.depth() < 1) throw PreconditionError("expected_waypoints: system has no levels");
  const LevelParams& p = system.level(system.depth());
  const double n = p.N;
  const double Np = p.N_prime;
  const PsiMap& psi = p.psi();
  std::vector<SpacePoint> w;
  switch (regime) {
    case Regime::Outside:
      w = {{-n - 9, v}, {-n - 5, v}, {-n + 0.5, v}, {n - 0.5, v}, {n + 1, v}, {n + 9, v}, {Np, v}};
      break;
    case Regime::BstarMinusCstar:
      w = {{-n - 9, v}, {-n - 7, v}, {n + 3.5, psi.inverse(v)}, {n + 7, v}, {n + 9, v}, {Np, v}};
      break;
    case Regime::B0MinusBstar: {
      const long m = escape_count(p.disks, v, Disk::B0, Direction::Forward, kMaxLadder);
      std::vector<Fiber> ladder{v};
      for (long j = 1; j <= m; ++j) ladder.push_back(psi.apply(ladder.back()));
      w = {{-n - 9, v}, {-n - 5, v}, {-n + 0.5, v}, {n - 0.5, v}, {n + 1.5, v}};
      for (long j = 1; j <= m; ++j) {
        w.push_back({-n - 6, ladder[j]});
        w.push_back({n + 1.5, ladder[j]});
      }
      w.push_back({n + 3.5, ladder[m]});
      w.push_back({n + 5.5, ladder[m]});
      w.push_back({n + 6, ladder[m]});
      for (long j = m - 1; j >= 0; --j) {
        w.push_back({n + 5.5, ladder[j]});
        w.push_back({n + 6, ladder[j]});
      }
      w.push_back({n + 7.5, v});
      w.push_back({n + 9, v});
      w.push_back({Np, v});
      break;
    }
  }
  return w;
}

std::vector<SpacePoint> observed_points(const Itinerary& itinerary) {
  std::vector<SpacePoint> pts;
  for (const auto& e : itinerary.events) {
    if (e.kind == EventKind::PlaneHit) {
      pts.push_back(e.position);
    } else if (e.kind == EventKind::Jump) {
      pts.push_back(e.position);
      pts.push_back(e.target);
    }
  }
  return pts;
}

bool contains_in_order(const std::vector<SpacePoint>& observed, const std::vector<SpacePoint>& expected,
                       double tol, std::size_t* matched) {
  std::size_t j = 0;
  for (const auto& o : observed) {
    if (j == expected.size()) break;
    if (std::abs(o.x - expected[j].x) <= kPlaneBand && distance(o.fiber, expected[j].fiber) <= tol) ++j;
  }
  if (matched) *matched = j;
  return j == expected.size();
}

Fiber sample_regime(const LevelParams& p, Regime regime, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.5, 3.5);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    const Fiber v{p.w0.y + u(rng), p.w0.z + u(rng)};
    const double z0 = p.disks.zeta0(v);
    const double zs = p.disks.zeta_star(v);
    switch (regime) {
      case Regime::Outside:
        if (z0 > kRegimeMargin && zs > kRegimeMargin) return v;
        break;
      case Regime::BstarMinusCstar:
        if (zs < -kRegimeMargin) return v;
        break;
      case Regime::B0MinusBstar:
        if (z0 < -kRegimeMargin && zs > kRegimeMargin && p.disks.distance_to_ZV(v) > kRegimeMargin) return v;
        break;
    }
  }
  throw NumericalError("sample_regime: no fiber found in regime");
}

CheckReport check_itineraries(const DisplayedSystem& system, int n_per_regime, const FlowBudget& budget,
                              std::uint64_t seed) {
  if (system.depth() < 1) throw PreconditionError("check_itineraries: system has no levels");
  CheckReport report;
  report.check = "itineraries";
  const LevelParams& p = system.level(system.depth());
  const double Np = p.N_prime;
  FlowOptions options;
  options.recording = Recording::All;
  options.watch_planes = diagnostic_planes(system);
  std::uint64_t stream = 0;
  for (Regime regime : {Regime::B0MinusBstar, Regime::BstarMinusCstar, Regime::Outside}) {
    for (int i = 0; i < n_per_regime; ++i) {
      Fiber v;
      std::vector<SpacePoint> expected;
      for (;;) {
        auto rng = substream(seed, stream++);
        v = sample_regime(p, regime, rng);
        try {
          expected = expected_waypoints(system, v, regime);
          break;
        } catch (const IterationCapError&) {
          ++report.excluded;
        }
      }
      ++report.samples;
      const SpacePoint start{-Np, v};
      try {
        const FlowResult r = advance_to_plane(system, start, Np, Direction::Forward, budget, options);
        if (r.status != FlowStatus::PlaneHit) {
          report.fail({report.check, start, std::string(to_string(regime)) + ": orbit ended with " +
                                                to_string(r.status) + " at " + point_text(r.end)});
          continue;
        }
        const double err = distance(r.end.fiber, v);
        report.max_error = std::max(report.max_error, err);
        std::size_t matched = 0;
        const bool ordered = contains_in_order(observed_points(r.itinerary), expected, kFiberTolerance, &matched);
        if (!ordered || err > kFiberTolerance) {
          std::ostringstream os;
          os << to_string(regime) << ": matched " << matched << " of " << expected.size() << " waypoints";
          if (!ordered) os << ", first missing " << point_text(expected[matched]);
          os << ", terminal fiber error " << err;
          report.fail({report.check, start, os.str()});
        }
      } catch (const Error& e) {
        report.fail({report.check, start, e.what()});
      }
    }
  }
  return report;
}

int count_distinct(const std::vector<Fiber>& fibers, double tol) {
  std::vector<Fiber> reps;
  for (const Fiber& f : fibers) {
    const bool seen = std::any_of(reps.begin(), reps.end(), [&](Fiber r) { return distance(r, f) <= tol; });
    if (!seen) reps.push_back(f);
  }
  return static_cast<int>(reps.size());
}

CheckReport check_crossing_uniqueness(const DisplayedSystem& system, int n_samples, const FlowBudget& budget,
                                      std::uint64_t seed) {
  CheckReport report;
  report.check = "crossing-uniqueness";
  const double N = system.N();
  FlowOptions options;
  options.recording = Recording::All;
  options.watch_planes = {-N, N};
  int rejected = 0;
  for (int i = 0; i < n_samples; ++i) {
    auto rng = substream(seed, static_cast<std::uint64_t>(i));
    const SpacePoint sigma = sample_member(system, rng, rejected);
    ++report.samples;
    std::vector<Fiber> left;
    std::vector<Fiber> right;
    for (Direction dir : {Direction::Backward, Direction::Forward}) {
      const double stop = dir == Direction::Forward ? N + 0.5 : -N - 0.5;
      const FlowResult r = advance_to_plane(system, sigma, stop, dir, budget, options);
      for (const auto& e : r.itinerary.events) {
        if (e.kind != EventKind::PlaneHit) continue;
        if (e.position.x == -N) left.push_back(e.position.fiber);
        if (e.position.x == N) right.push_back(e.position.fiber);
      }
    }
    const int nl = count_distinct(left);
    const int nr = count_distinct(right);
    if (nl > 1 || nr > 1) {
      std::ostringstream os;
      os << nl << " distinct hits of x = " << -N << ", " << nr << " of x = " << N;
      report.fail({report.check, sigma, os.str()});
    }
  }
  return report;
}

CheckReport check_confinement(const DisplayedSystem& system, const SpacePoint& sigma, double T,
                              const FlowBudget& budget) {
  CheckReport report;
  report.check = "confinement";
  const double N = system.N();
  FlowOptions options;
  options.recording = Recording::All;
  options.watch_planes = diagnostic_planes(system);
  const FlowResult r = flow(system, sigma, T, budget, options);
  if (r.status != FlowStatus::Completed || distance(r.end, sigma) > kFiberTolerance) {
    std::ostringstream os;
    os << "check_confinement: " << point_text(sigma) << " does not return after time " << T << " ("
       << to_string(r.status) << ", end " << point_text(r.end) << ")";
    throw PreconditionError(os.str());
  }
  auto probe = [&](const SpacePoint& q, const std::string& what) {
    ++report.samples;
    report.max_error = std::max(report.max_error, std::abs(q.x));
    if (!(std::abs(q.x) < N)) report.fail({report.check, q, what + " outside |x| < " + std::to_string(system.N())});
  };
  for (const auto& e : r.itinerary.events) {
    probe(e.position, to_string(e.kind));
    if (e.kind == EventKind::Jump) probe(e.target, "jump target");
  }
  constexpr int kGrid = 64;
  for (int i = 0; i <= kGrid; ++i) probe(flow_point(system, sigma, T * i / kGrid, budget), "grid sample");
  report.notes = "max |x| along the orbit";
  return report;
}

SpacePoint marked_point(const DisplayedSystem& system, int level) {
  if (level < 1 || level > system.depth()) throw PreconditionError("marked_point: level out of range");
  return flow_point(system, system.level(level).anchor(), 0.5);
}

nlohmann::json report_json(const CheckReport& report) {
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"check", v.check},
                          {"witness", {v.witness.x, v.witness.fiber.y, v.witness.fiber.z}},
                          {"detail", v.detail}});
  }
  nlohmann::json j{{"check", report.check},
                   {"passed", report.passed},
                   {"samples", report.samples},
                   {"excluded", report.excluded},
                   {"max_error", report.max_error},
                   {"violations", violations}};
  if (!report.notes.empty()) j["notes"] = report.notes;
  return j;
}

nlohmann::json report_json(const FlatFractionReport& report) {
  nlohmann::json witnesses = nlohmann::json::array();
  for (const auto& w : report.nonflat_witnesses) witnesses.push_back({w.x, w.fiber.y, w.fiber.z});
  return {{"check", "flat-fraction"},
          {"samples", report.samples},
          {"flat", report.flat},
          {"fraction", report.fraction()},
          {"rejected", report.rejected},
          {"failures", report.failures},
          {"nonflat_classified", report.nonflat_classified},
          {"classified_fraction", report.classified_fraction()},
          {"stall_tags", report.stall_tags},
          {"nonflat_witnesses", witnesses}};
}

nlohmann::json report_json(const JetOrderResult& result) {
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& u : result.directions) dirs.push_back({u.x, u.fiber.y, u.fiber.z});
  return {{"check", "jet-order"},
          {"slope", result.at_floor ? nlohmann::json(nullptr) : nlohmann::json(result.slope)},
          {"at_floor", result.at_floor},
          {"base_defect", result.base_defect},
          {"floor", result.floor},
          {"deltas", result.deltas},
          {"directions", dirs},
          {"errors", result.errors},
          {"used", result.used}};
}

}  // namespace glueflow
