#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glueflow/jet.hpp"
#include "glueflow/planar.hpp"
#include "glueflow/types.hpp"

namespace glueflow {

// Parameters of one extension. N is the half-width of the system being
// extended; the extension adds the slabs around S_N and has half-width N + 10.
struct LevelParams {
  int N = 1;
  int N_prime = 11;
  Fiber w0;
  int k = 1;
  int T = 0;
  double T0 = 0.0;
  JetMatchedFunction lambda0;
  DiskPair disks;
  double W_radius = 0.0;
  // Flat point of the inner system the extension was built from.
  SpacePoint sigma0;

  const PsiMap& psi() const { return disks.psi(); }

  // Marked periodic point: half a time unit past (-N-6, w0).
  SpacePoint anchor() const { return {-N - 6.0, w0}; }

  friend bool operator==(const LevelParams&, const LevelParams&) = default;
};

// Polynomial factors of the slab speeds; n is the inner half-width.
inline double alpha(int n, double x) { return (x + n + 7) * (x + n + 6); }
inline double beta(int n, double x) { return (x - n - 2) * (x - n - 3) * (x - n - 4) * (x - n - 5); }
inline double gamma(int n, double x) { return (x - n - 6) * (x - n - 7); }

// Speeds given precomputed zeta0 / zeta_star of the fiber.
inline double fold_speed(int n, double x, double zstar) {
  const double a = alpha(n, x);
  return -std::expm1(-(a * a + zstar * zstar));
}
inline double twist_speed(int n, double x, double z0, double zstar) {
  const double b = beta(n, x);
  const double c = gamma(n, x);
  return std::expm1(-(b * b + z0 * z0)) * std::expm1(-(c * c + zstar * zstar));
}

class DisplayedSystem {
 public:
  DisplayedSystem() = default;
  explicit DisplayedSystem(std::vector<LevelParams> levels);

  const std::vector<LevelParams>& levels() const { return levels_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  // Half-width of the whole system.
  int N() const { return levels_.empty() ? 1 : levels_.back().N_prime; }
  // Half-width of the system made of the first `level` levels.
  int N_at(int level) const { return level == 0 ? 1 : levels_[level - 1].N_prime; }
  const LevelParams& level(int index) const { return levels_.at(index - 1); }

  DisplayedSystem prefix(int depth) const;
  DisplayedSystem with_level(LevelParams params) const;

  friend bool operator==(const DisplayedSystem&, const DisplayedSystem&) = default;

 private:
  std::vector<LevelParams> levels_;
};

DisplayedSystem build_level0();

// Left = x <= -N-9, Fold = the f slab around -N-6.5, Shift = the
// lambda0-dependent slab ending at -N, Twist = the g h slab from N+1 to N+8,
// Right = x >= N+9. Base is level 0.
enum class CellKind { Base, Left, Fold, Shift, Twist, Right };
enum class FiberPredicate { All, NotCstar, OutsideBstar, OutsideB0 };
enum class SpeedTag { Unit, Fold, Twist };

const char* to_string(CellKind kind);
const char* to_string(FiberPredicate predicate);
const char* to_string(SpeedTag tag);

struct Cell {
  int level = 0;
  CellKind kind = CellKind::Base;
  double lo = -kInf;
  double hi = kInf;
  bool lo_closed = false;
  bool hi_closed = false;
  FiberPredicate predicate = FiberPredicate::All;
  SpeedTag speed = SpeedTag::Unit;
};

struct Location {
  bool member = false;
  // A fiber predicate deciding the answer was within the membership band.
  bool ambiguous = false;
  Cell cell;
};

Location locate(const DisplayedSystem& system, const SpacePoint& sigma);

// Throws NotInManifoldError outside M.
double speed(const DisplayedSystem& system, const SpacePoint& sigma);

enum class FiberMap { Identity, Psi, PsiInverse };
enum class FiberCondition { Any, InB0MinusC0, InBstarMinusCstar };

const char* to_string(FiberMap map);

// A gluing in its forward orientation: a trajectory reaching source_x moving
// forward continues from target_x with the mapped fiber. Backward flow uses
// the inverse. target_x is NaN for rule 2, whose target -N - lambda0(v)
// depends on the fiber.
struct JumpRule {
  int id = 0;
  double source_x = 0.0;
  bool source_owned = false;
  FiberCondition condition = FiberCondition::Any;
  double target_x = 0.0;
  bool target_owned = false;
  FiberMap map = FiberMap::Identity;
};

std::vector<JumpRule> jump_rules(const LevelParams& params);

struct Violation {
  std::string check;
  SpacePoint witness;
  std::string detail;
};

struct ValidationReport {
  int samples = 0;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_displayed_axioms(const DisplayedSystem& system, int sample_count,
                                           std::uint64_t seed = 1);

// Throws PreconditionError unless outer has exactly one more level.
ValidationReport check_extension(const DisplayedSystem& inner, const DisplayedSystem& outer,
                                 int sample_count, std::uint64_t seed = 1);

}  // namespace glueflow
