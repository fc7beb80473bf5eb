#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "glueflow/builder.hpp"
#include "glueflow/flow.hpp"
#include "glueflow/region.hpp"
#include "glueflow/verify.hpp"

namespace glueflow {

// Scrambled Halton points in bases 2, 3, 5 pushed onto R^3 coordinate-wise
// by u -> scale * atanh(2u - 1). Index j starts at 1.
class DenseSequence {
 public:
  explicit DenseSequence(std::uint64_t seed, double scale = 4.0);

  SpacePoint operator()(std::size_t j) const;
  // Scrambled radical inverse of j in coordinate `axis`, in (0, 1).
  double unit(std::size_t j, int axis) const;
  std::vector<SpacePoint> prefix(std::size_t count) const;

 private:
  std::array<std::vector<int>, 3> perms_;
  double scale_;
};

struct LevelOutcome;

struct ConstructionConfig {
  int depth = 1;
  std::uint64_t seed = 1;
  FlowBudget budget;
  // Sample count for the Monte-Carlo checks of each level.
  int samples = 200;
  int max_candidates = 10'000;
  // Flat candidates gathered before choosing the one with the shortest crossing.
  int candidate_pool = 16;
  ExtendOptions extend;
  // Output directory; empty to skip writing files.
  std::string out_dir;
  // Called after each level is built and verified.
  std::function<void(const LevelOutcome&)> on_level;
};

struct LevelOutcome {
  int level = 0;
  std::size_t j = 0;
  SpacePoint omega;
  SpacePoint sigma;
  int candidates_tried = 0;
  int flat_found = 0;
  std::vector<std::string> rejected;
  BuildReport build;
  nlohmann::json verify;
  bool verified = false;
};

struct ConstructionState {
  std::vector<DisplayedSystem> systems;  // D_0 .. D_K
  std::vector<SpacePoint> sigmas;        // sigma_1 .. sigma_K
  std::vector<std::size_t> indices;      // j_1 .. j_K
  std::vector<LevelOutcome> outcomes;
  bool complete = false;
  std::string error;
};

// True when p lies in the interior of M restricted to |x| < N of the system.
bool in_open_core(const DisplayedSystem& system, const SpacePoint& p);

// Least j >= 1 not in `used` with omega_j in the open core of the system.
std::size_t next_index(const DenseSequence& omega, const DisplayedSystem& system,
                       const std::vector<std::size_t>& used, std::size_t limit = 1'000'000);

// Names accepted by verify_level, in the order they run.
const std::vector<std::string>& level_check_names();

struct LevelCheckOptions {
  int samples = 200;
  FlowBudget budget;
  // Subset of level_check_names(); empty runs all of them.
  std::vector<std::string> checks;
};

// Checks for the top level of `outer`, which extends `inner` by one level:
// return period, jet order at the marked point, periodicity of the seed
// point, confinement, the crossing-fiber and return-map checks, itineraries, crossing
// uniqueness, extension, displayed-system axioms and the flat fraction.
// `passed` is the conjunction of the gated checks that ran.
nlohmann::json verify_level(const DisplayedSystem& inner, const DisplayedSystem& outer,
                            const LevelCheckOptions& options, bool* passed);

// Runs the selection loop up to config.depth. Builder errors stop the loop
// and are recorded in the state; artifacts already produced stay on disk.
ConstructionState run_construction(const ConstructionConfig& config);

nlohmann::json construction_summary(const ConstructionState& state, const ConstructionConfig& config);

// CSV of the orbit of sigma over [0, t_max]: uniform samples plus event rows.
void dump_trajectory(const DisplayedSystem& system, const SpacePoint& sigma, double t_max, const std::string& path,
                     int grid = 200, const FlowBudget& budget = {});

}  // namespace glueflow
