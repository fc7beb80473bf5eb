#pragma once

#include <string>
#include <vector>

#include "glueflow/flow.hpp"
#include "glueflow/jet.hpp"
#include "glueflow/region.hpp"

namespace glueflow {

// Fiber v with (-N, v) and (N, v) both on the orbit of sigma0.
Fiber compute_w0(const DisplayedSystem& system, const SpacePoint& sigma0, const FlowBudget& budget = {});

struct Crossing {
  double time = 0.0;
  Fiber end;
  // Signed ids of the rules fired on the way, prefixed by their level (level * 100 + rule).
  std::vector<int> signature;
};

// Flow from (-N, w) to the plane x = N of the system. Throws FlowError on stall or budget.
Crossing inner_crossing(const DisplayedSystem& system, Fiber w, const FlowBudget& budget = {});

// Crossing time; throws FiberMismatchError when the crossing changes the fiber by more than 1e-6.
double lambda1(const DisplayedSystem& system, Fiber w, const FlowBudget& budget = {});
double lambda2(const LevelParams& params, Fiber w);
double lambda3(const LevelParams& params, Fiber w);

// lambda0 + lambda1 + lambda2 + lambda3 for level `level` of the system.
double return_time(const DisplayedSystem& system, int level, Fiber w, const FlowBudget& budget = {});

struct ExtendOptions {
  double ode_tolerance = kDefaultOdeTolerance;
  double initial_W_radius = 0.25;
  double min_W_radius = 1.0 / (1 << 20);
  double taylor_step = 1e-2;
};

struct BuildReport {
  int level = 0;
  int N = 0;
  int k = 0;
  SpacePoint sigma0;
  Fiber w0;
  double W_radius = 0.0;
  int W_halvings = 0;
  std::vector<int> signature;
  double lambda1_w0 = 0.0;
  double lambda2_w0 = 0.0;
  double lambda3_w0 = 0.0;
  double T0 = 0.0;
  int T = 0;
  TaylorResult taylor;
  Lambda0Diagnostics lambda0;
  double a0 = 0.0;
  double return_time_defect = 0.0;  // Lambda(w0) - T
};

DisplayedSystem extend(const DisplayedSystem& system, const SpacePoint& sigma0, int k,
                       const FlowBudget& budget = {}, BuildReport* report = nullptr,
                       const ExtendOptions& options = {});

std::string build_report_json(const BuildReport& report);

}  // namespace glueflow
