#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csg/game.hpp"

namespace csg {

// Enumeration caps; beyond these the computation errors out.
inline constexpr int kMaxLeaderActions = 8;
inline constexpr int kMaxRegions = 4096;

// Constraint <normal, x> + offset >= 0 (weak) or > 0 (strict).
struct Halfspace {
  std::vector<double> normal;
  double offset = 0.0;
  bool strict = false;
};

// Halfspaces whose intersection is the best-response region X_z(sigma):
// follower-utility difference constraints plus the simplex constraints.
std::vector<Halfspace> region_halfspaces(const GameInstance& inst,
                                         const Context& z,
                                         const std::vector<int>& sigma);

// Vertices of the closed polytope (strict constraints relaxed to weak),
// found by solving all (A-1)-subsets of tight constraints together with
// sum(x) = 1. Deduplicated and sorted lexicographically.
std::vector<MixedStrategy> closure_vertices(
    const std::vector<Halfspace>& halfspaces, int A);

// Decides non-emptiness of the open region by maximizing the minimum strict
// slack over the closure (epigraph lift, solved by vertex enumeration).
// Returns a strictly interior witness, or nullopt when the region is empty.
std::optional<MixedStrategy> region_feasibility(
    const GameInstance& inst, const Context& z, const std::vector<int>& sigma,
    const std::vector<Halfspace>& halfspaces,
    const std::vector<MixedStrategy>& vertices);

struct Region {
  std::vector<int> sigma;
  std::vector<Halfspace> halfspaces;
  std::vector<MixedStrategy> closure_vertices;
  std::optional<MixedStrategy> witness;
};

struct ExtremePoint {
  MixedStrategy x;
  std::vector<int> sigma;       // best response of each type at x
  MixedStrategy source_vertex;  // closure vertex x was derived from
};

struct ExtremePointSet {
  Context z;
  double delta = 0.0;
  std::vector<ExtremePoint> points;
};

// True iff every type's best response at x equals sigma (the ground-truth
// membership test).
bool in_region(const GameInstance& inst, const Context& z,
               const MixedStrategy& x, const std::vector<int>& sigma);

// Enumerates all nonempty regions for context z.
std::vector<Region> enumerate_regions(const GameInstance& inst,
                                      const Context& z);

// Delta-approximate extreme points: per nonempty region, each closure vertex
// or its within-delta pull toward the region witness.
ExtremePointSet approx_extreme_points(const GameInstance& inst,
                                      const Context& z, double delta);

struct IndicatorEntry {
  std::vector<int> bits;  // bits[i] = 1 iff sigma(i) == realizer_action
  MixedStrategy realizer_x;
  int realizer_action = -1;
};

// W = { indicator of (sigma == a_f) : nonempty sigma, a_f }, deduplicated,
// each with a realizing (strategy, follower action). Requires context-free
// follower utilities.
std::vector<IndicatorEntry> indicator_set(const GameInstance& inst,
                                          double delta);

// Human-readable per-context region report for golden tests and the CLI.
std::string region_report(const GameInstance& inst, const Context& z,
                          double delta);

}  // namespace csg
