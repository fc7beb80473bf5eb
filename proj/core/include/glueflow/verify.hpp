#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "glueflow/flow.hpp"
#include "glueflow/region.hpp"

namespace glueflow {

inline constexpr double kFiberTolerance = 1e-6;

// Planar part of a catalogued bad set.
enum class BadSetTag { C0, Cstar, C0orZV, CstarOrZH, InheritedNonflat };

const char* to_string(BadSetTag tag);

struct BadSet {
  int level = 0;
  // Index j of the exclusion set Z'_j.
  int index = 0;
  // NaN for the inherited set, which is not tied to a plane.
  double plane = 0.0;
  BadSetTag tag = BadSetTag::C0;
};

struct BadSetCatalog {
  std::vector<BadSet> sets;
};

BadSetCatalog bad_set_catalog(const DisplayedSystem& system);

// Distance from v to the planar part of a set of the given level.
double planar_distance(const LevelParams& params, BadSetTag tag, Fiber v);

struct StallClass {
  bool classified = false;
  BadSet set;
  double distance = kInf;
  std::string label() const;
};

// Nearest catalogued set of the event's level whose plane lies within 1.5 of
// the event. Unclassified beyond distance 1e-2.
StallClass classify_stall(const DisplayedSystem& system, const TrajectoryEvent& event,
                          const BadSetCatalog& catalog);

enum class FlatFailure { None, Stall, FiberMismatch, Budget, Unreachable };

const char* to_string(FlatFailure failure);

struct FlatnessResult {
  bool flat = false;
  // Fiber at -N (when both plane hits exist).
  Fiber fiber;
  FlatFailure failure = FlatFailure::None;
  double mismatch = 0.0;
  std::optional<TrajectoryEvent> terminal;
};

FlatnessResult is_flat(const DisplayedSystem& system, const SpacePoint& sigma, const FlowBudget& budget = {});

struct FlatFractionReport {
  int samples = 0;
  int flat = 0;
  int rejected = 0;
  std::map<std::string, int> failures;
  int nonflat_classified = 0;
  std::map<std::string, int> stall_tags;
  std::vector<SpacePoint> nonflat_witnesses;

  double fraction() const { return samples == 0 ? 1.0 : static_cast<double>(flat) / samples; }
  double classified_fraction() const {
    const int nonflat = samples - flat;
    return nonflat == 0 ? 1.0 : static_cast<double>(nonflat_classified) / nonflat;
  }
};

// Uniform samples from M inside (-N, N) x [-3, 3]^2, rejection-sampled.
FlatFractionReport flat_fraction(const DisplayedSystem& system, int n, const FlowBudget& budget = {},
                                 std::uint64_t seed = 1);

struct JetOrderOptions {
  std::vector<double> deltas;  // default: 9 log-spaced values in [1e-3, 1e-1]
  int directions = 4;
  std::uint64_t seed = 7;
  // Errors below max(noise_floor, 100 * |Phi_T(base) - base|) are dropped from the fit.
  double noise_floor = 1e-10;
};

struct JetOrderResult {
  double slope = 0.0;
  bool at_floor = false;
  double base_defect = 0.0;
  double floor = 0.0;
  std::vector<double> deltas;
  std::vector<SpacePoint> directions;
  // errors[i][j]: direction i, delta j.
  std::vector<std::vector<double>> errors;
  int used = 0;
};

// Log-log slope of |Phi_T(base + d u) - (base + d u)| against d. Throws
// PreconditionError unless base returns to itself within 1e-6 after time T.
JetOrderResult jet_order(const DisplayedSystem& system, const SpacePoint& base, double T,
                         const JetOrderOptions& options = {}, const FlowBudget& budget = {});

// Log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

struct CheckReport {
  std::string check;
  bool passed = true;
  int samples = 0;
  int excluded = 0;
  std::vector<Violation> violations;
  double max_error = 0.0;
  std::string notes;

  void fail(Violation v) {
    passed = false;
    violations.push_back(std::move(v));
  }
};

// Flow from (-N, w) for lambda1(w) lands on (N, w); w sampled in the disk W of `level`.
CheckReport check_crossing_fiber(const DisplayedSystem& system, int level, int n_samples, std::uint64_t seed = 1,
                           const FlowBudget& budget = {});

// Flow from (-N-6, w) for the return time lands on (-N-6, psi(w)).
CheckReport check_return_map(const DisplayedSystem& system, int level, int n_samples, std::uint64_t seed = 1,
                           const FlowBudget& budget = {});

enum class Regime { B0MinusBstar, BstarMinusCstar, Outside };

const char* to_string(Regime regime);

// Points the forward orbit of (-N', v) must visit in order, for the top level.
std::vector<SpacePoint> expected_waypoints(const DisplayedSystem& system, Fiber v, Regime regime);

// Observed (x, fiber) points: plane hits, jump sources and jump targets.
std::vector<SpacePoint> observed_points(const Itinerary& itinerary);

// True when `expected` occurs as a subsequence of `observed` within tol.
bool contains_in_order(const std::vector<SpacePoint>& observed, const std::vector<SpacePoint>& expected,
                       double tol = kFiberTolerance, std::size_t* matched = nullptr);

// Fiber sampled in the regime for the top level, away from the circles and axes.
Fiber sample_regime(const LevelParams& params, Regime regime, std::mt19937_64& rng);

CheckReport check_itineraries(const DisplayedSystem& system, int n_per_regime, const FlowBudget& budget = {},
                              std::uint64_t seed = 1);

// Number of fibers among points that are pairwise more than tol apart.
int count_distinct(const std::vector<Fiber>& fibers, double tol = 1e-4);

// Orbits of sampled points hit each of x = -N and x = N at most once.
CheckReport check_crossing_uniqueness(const DisplayedSystem& system, int n_samples, const FlowBudget& budget = {},
                                      std::uint64_t seed = 1);

// A T-periodic point's orbit stays inside |x| < N. Throws PreconditionError
// when sigma does not return within 1e-6.
CheckReport check_confinement(const DisplayedSystem& system, const SpacePoint& sigma, double T,
                              const FlowBudget& budget = {});

// Marked periodic point of a level: half a time unit past (-N-6, w0).
SpacePoint marked_point(const DisplayedSystem& system, int level);

nlohmann::json report_json(const CheckReport& report);
nlohmann::json report_json(const FlatFractionReport& report);
nlohmann::json report_json(const JetOrderResult& result);

}  // namespace glueflow
