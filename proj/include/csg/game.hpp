#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csg/rng.hpp"

namespace csg {

// Comparison tolerances used throughout.
inline constexpr double kTieTol = 1e-9;     // expected-utility ties
inline constexpr double kGeoTol = 1e-9;     // halfspace slack checks
inline constexpr double kDedupeTol = 1e-7;  // vertex deduplication (L-inf)

struct Context {
  std::vector<double> vec;
  std::string label;  // empty for unlabeled (box-space) contexts
};

// Stable identity of a context: label if present, else the raw bytes of vec.
std::string context_key(const Context& z);

struct MixedStrategy {
  std::vector<double> probs;

  int size() const { return static_cast<int>(probs.size()); }
  double operator[](int i) const { return probs[i]; }
  bool valid(double tol = kTieTol) const;
};

MixedStrategy unit_mass(int a, int num_actions);

enum class UtilityKind { Tabular, LinearClipped };

// Leader or follower utility over (context, leader action, follower action).
// Tabular: per-context-label table, row-major [A][A_f]; the label "*" acts as
// a fallback for any context. LinearClipped: u = clamp(<z, theta[al][af]>, 0, 1).
struct UtilityModel {
  UtilityKind kind = UtilityKind::Tabular;
  std::map<std::string, std::vector<double>> tables;
  std::vector<std::vector<std::vector<double>>> theta;  // [A][A_f][d]
  bool declared_context_free = false;

  double eval(const Context& z, int a_l, int a_f, int A, int A_f) const;
};

struct ContextSpace {
  enum class Kind { Finite, Box };
  Kind kind = Kind::Finite;
  std::vector<Context> contexts;  // Finite
  int dim = 1;                    // Box
  std::vector<double> lo, hi;     // Box bounds

  // Representative context used when a computation needs some fixed z
  // (context-free follower utilities only).
  Context probe() const;
};

struct GameInstance {
  int num_leader_actions = 0;    // A
  int num_follower_actions = 0;  // A_f
  int num_types = 0;             // K
  UtilityModel leader_utility;
  std::vector<UtilityModel> follower_utilities;
  std::vector<std::string> type_names;
  ContextSpace context_space;

  void validate() const;
};

double eval_utility(const UtilityModel& model, const GameInstance& inst,
                    const Context& z, int a_l, int a_f);

double leader_utility(const GameInstance& inst, const Context& z, int a_l,
                      int a_f);

// Sum over leader actions of x[a_l] * u(z, a_l, a_f).
double expected_leader_utility(const GameInstance& inst, const Context& z,
                               const MixedStrategy& x, int a_f);

// Argmax follower action against commitment x; expected utilities within
// kTieTol are tied and the tie goes to the higher action index.
int follower_best_response(const GameInstance& inst, int type_idx,
                           const Context& z, const MixedStrategy& x);

struct RoundRecord {
  int t = 0;
  Context context;
  MixedStrategy strategy;
  int follower_type = -1;
  int follower_action = -1;
  int leader_action = -1;
  double realized_utility = 0.0;
  double expected_utility = 0.0;
};

RoundRecord play_round(const GameInstance& inst, const Context& z,
                       const MixedStrategy& x, int type_idx, Rng& rng);

// True when every follower utility model provably ignores the context:
// Tabular with one effective table, or LinearClipped declared context-free.
bool follower_utilities_context_free(const GameInstance& inst);

// JSON instance files; schema documented in the README.
GameInstance load_instance(const std::string& path);
GameInstance parse_instance(const std::string& json_text);
std::string instance_to_json(const GameInstance& inst);

}  // namespace csg
