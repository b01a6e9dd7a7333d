#pragma once

#include <memory>
#include <string>
#include <vector>

#include "csg/game.hpp"

namespace csg {

// Produces the (context, follower type) stream for one run. Histories passed
// in contain only completed rounds, so an adversarial follower never sees the
// current round's context through this interface.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Context next_context(const std::vector<RoundRecord>& history) = 0;

  // When true the follower type is a function of the committed strategy and
  // must be requested through next_follower_committed.
  virtual bool follower_after_commit() const { return false; }

  virtual int next_follower(const std::vector<RoundRecord>& history) = 0;

  virtual int next_follower_committed(const std::vector<RoundRecord>& history,
                                      const Context& z,
                                      const MixedStrategy& x) {
    (void)z;
    (void)x;
    return next_follower(history);
  }
};

// Online linear thresholding adversary: presents the midpoint of the current
// consistency interval, then labels to cap the learner's per-round utility at
// 1/2, shrinking the interval to stay consistent with some threshold. The
// interval endpoints are dyadic rationals tracked exactly as a binary digit
// string (doubles run out of mantissa after ~50 halvings).
class OLTEnvironment : public Environment {
 public:
  Context next_context(const std::vector<RoundRecord>& history) override;
  bool follower_after_commit() const override { return true; }
  int next_follower(const std::vector<RoundRecord>& history) override;
  int next_follower_committed(const std::vector<RoundRecord>& history,
                              const Context& z,
                              const MixedStrategy& x) override;

  // Interval [lo, hi) = [0.path, 0.path + 2^-|path|) in binary.
  const std::string& path() const { return path_; }
  double lo() const;
  double hi() const;

  // Committed labels, +1 or -1 per round.
  const std::vector<int>& labels() const { return labels_; }
  // Exact midpoints presented, as binary digit strings (round t's context is
  // 0.midpoints()[t] in binary).
  const std::vector<std::string>& midpoints() const { return midpoints_; }

  // Replays every historical label against the final interval's midpoint
  // threshold: label +1 requires omega_t > s, label -1 requires omega_t <= s.
  bool consistent() const;

 private:
  std::string path_;
  std::vector<int> labels_;
  std::vector<std::string> midpoints_;
};

GameInstance build_olt_instance();

// Scenario presets. `bandit` selects the non-adaptive follower variant where
// the adaptive one is outside the bandit algorithms' guarantee.
std::unique_ptr<Environment> make_scenario(const std::string& name,
                                           const GameInstance& inst, int T,
                                           std::uint64_t seed, bool bandit);

const std::vector<std::string>& scenario_names();

}  // namespace csg
