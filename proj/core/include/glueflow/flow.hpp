#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "glueflow/region.hpp"
#include "glueflow/types.hpp"

namespace glueflow {

struct FlowBudget {
  double max_time = 1e6;
  long max_jumps = 200'000;
  double stall_speed = 1e-9;
};

enum class EventKind { Segment, Jump, PlaneHit, Stall, BudgetExhausted };

const char* to_string(EventKind kind);

struct TrajectoryEvent {
  EventKind kind = EventKind::Segment;
  // Elapsed time since the start of the flow (non-negative, either direction).
  double time = 0.0;
  SpacePoint position;
  int level = 0;
  // Jump: rule id 1..8 (negative for the inverse direction). Segment: the cell kind.
  int rule = 0;
  CellKind cell = CellKind::Base;
  // Jump target; for stalls, the vanishing plane.
  SpacePoint target;
  double speed = 0.0;
  Direction direction = Direction::Forward;
};

struct Itinerary {
  SpacePoint start;
  Direction direction = Direction::Forward;
  std::vector<TrajectoryEvent> events;
};

enum class FlowStatus { Completed, PlaneHit, Stalled, BudgetExhausted, Unreachable };

const char* to_string(FlowStatus status);

struct FlowResult {
  FlowStatus status = FlowStatus::Completed;
  SpacePoint end;
  double elapsed = 0.0;
  long jumps = 0;
  Itinerary itinerary;
  // Stall or budget event, when the flow ended early.
  std::optional<TrajectoryEvent> terminal;

  bool ok() const { return status == FlowStatus::Completed || status == FlowStatus::PlaneHit; }
};

enum class Recording { None, Jumps, All };

struct FlowOptions {
  Recording recording = Recording::None;
  // Extra planes whose crossings are recorded as plane-hit events.
  std::vector<double> watch_planes;
};

// Flow for time t (backward when t < 0). Stalls and budget exhaustion are
// reported in the result status.
FlowResult flow(const DisplayedSystem& system, const SpacePoint& sigma, double t,
                const FlowBudget& budget = {}, const FlowOptions& options = {});

// As flow, but throws FlowError unless the flow completed.
SpacePoint flow_point(const DisplayedSystem& system, const SpacePoint& sigma, double t,
                      const FlowBudget& budget = {});

// Flow until the first crossing of the plane x = x_target.
FlowResult advance_to_plane(const DisplayedSystem& system, const SpacePoint& sigma, double x_target,
                            Direction direction, const FlowBudget& budget = {},
                            const FlowOptions& options = {});

// Integral of dx / speed over [x_a, x_b] in the given slab of `level`.
double travel_time(const DisplayedSystem& system, int level, SpeedTag tag, double x_a, double x_b,
                   Fiber fiber);
double travel_time(const LevelParams& params, SpeedTag tag, double x_a, double x_b, Fiber fiber);

// Diagnostic planes of every level: -N+0.5, N-0.5, N+1.5, N+3.5, N+5.5,
// N+7.5, -N-5.5 and the outer planes +-N'.
std::vector<double> diagnostic_planes(const DisplayedSystem& system);

// Events from sigma forward until the orbit leaves through x = N (top level)
// or the budget is spent.
Itinerary orbit_itinerary(const DisplayedSystem& system, const SpacePoint& sigma,
                          const FlowBudget& budget = {});

void write_itinerary_csv(const Itinerary& itinerary, std::ostream& out);
std::string itinerary_json(const Itinerary& itinerary);

}  // namespace glueflow
