#include "csg/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csg {

namespace {

double binary_fraction(const std::string& bits) {
  double v = 0.0;
  double scale = 0.5;
  for (char c : bits) {
    if (c == '1') v += scale;
    scale *= 0.5;
    if (scale == 0.0) break;
  }
  return v;
}

// Compares two binary fractions 0.a vs 0.b; shorter strings are zero-padded.
int compare_fraction(const std::string& a, const std::string& b) {
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const char ca = i < a.size() ? a[i] : '0';
    const char cb = i < b.size() ? b[i] : '0';
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  return 0;
}

}  // namespace

Context OLTEnvironment::next_context(const std::vector<RoundRecord>&) {
  Context z;
  z.vec = {binary_fraction(path_ + "1")};
  return z;
}

int OLTEnvironment::next_follower(const std::vector<RoundRecord>&) {
  throw std::logic_error("OLT adversary labels only after the leader commits");
}

int OLTEnvironment::next_follower_committed(const std::vector<RoundRecord>&,
                                            const Context&,
                                            const MixedStrategy& x) {
  const double g = x[0];
  const int y = g >= 0.5 ? -1 : +1;
  midpoints_.push_back(path_ + "1");
  labels_.push_back(y);
  // y=+1 forces the threshold below the midpoint (hi' = omega), y=-1 above.
  path_.push_back(y == +1 ? '0' : '1');
  return y == +1 ? 0 : 1;
}

double OLTEnvironment::lo() const { return binary_fraction(path_); }

double OLTEnvironment::hi() const {
  return binary_fraction(path_) + std::pow(0.5, std::min<std::size_t>(path_.size(), 1074));
}

bool OLTEnvironment::consistent() const {
  const std::string s = path_ + "1";
  for (std::size_t t = 0; t < labels_.size(); ++t) {
    const int cmp = compare_fraction(midpoints_[t], s);
    if (labels_[t] == +1 && cmp <= 0) return false;
    if (labels_[t] == -1 && cmp > 0) return false;
  }
  return true;
}

GameInstance build_olt_instance() {
  GameInstance inst;
  inst.num_leader_actions = 2;
  inst.num_follower_actions = 2;
  inst.num_types = 2;
  inst.type_names = {"alpha1", "alpha2"};
  auto tab = [](std::vector<double> flat) {
    UtilityModel m;
    m.kind = UtilityKind::Tabular;
    m.tables["*"] = std::move(flat);
    return m;
  };
  inst.leader_utility = tab({1, 0, 0, 1});          // 1{a_l == a_f}
  inst.follower_utilities.push_back(tab({1, 0, 1, 0}));  // always plays a_0
  inst.follower_utilities.push_back(tab({0, 1, 0, 1}));  // always plays a_1
  inst.context_space.kind = ContextSpace::Kind::Box;
  inst.context_space.dim = 1;
  inst.context_space.lo = {0.0};
  inst.context_space.hi = {1.0};
  return inst;
}

namespace {

class PresetEnv : public Environment {
 public:
  enum class ContextMode { Rotation, Stochastic };
  enum class FollowerMode { Stochastic, Sequence, AdaptivePunish };

  PresetEnv(const GameInstance& inst, ContextMode cm, FollowerMode fm,
            std::vector<double> probs, std::vector<int> seq, std::uint64_t seed)
      : inst_(inst),
        context_mode_(cm),
        follower_mode_(fm),
        probs_(std::move(probs)),
        seq_(std::move(seq)),
        rng_(seed) {
    if (inst_.context_space.kind != ContextSpace::Kind::Finite)
      throw std::runtime_error("scenario requires a finite context space");
  }

  Context next_context(const std::vector<RoundRecord>& history) override {
    const auto& ctxs = inst_.context_space.contexts;
    if (context_mode_ == ContextMode::Rotation)
      return ctxs[history.size() % ctxs.size()];
    return ctxs[rng_.uniform_int(static_cast<int>(ctxs.size()))];
  }

  int next_follower(const std::vector<RoundRecord>& history) override {
    switch (follower_mode_) {
      case FollowerMode::Stochastic:
        return rng_.sample(probs_);
      case FollowerMode::Sequence: {
        if (history.size() >= seq_.size())
          throw std::runtime_error("follower sequence exhausted");
        return seq_[history.size()];
      }
      case FollowerMode::AdaptivePunish:
        return punish(history);
    }
    return 0;
  }

 private:
  // Picks the type the learner's recent strategies fare worst against.
  int punish(const std::vector<RoundRecord>& history) const {
    if (history.empty()) return 0;
    const std::size_t window = std::min<std::size_t>(history.size(), 64);
    int best = 0;
    double best_val = 0.0;
    for (int i = 0; i < inst_.num_types; ++i) {
      double total = 0.0;
      for (std::size_t t = history.size() - window; t < history.size(); ++t) {
        const auto& rec = history[t];
        const int b = follower_best_response(inst_, i, rec.context, rec.strategy);
        total += expected_leader_utility(inst_, rec.context, rec.strategy, b);
      }
      if (i == 0 || total < best_val) {
        best = i;
        best_val = total;
      }
    }
    return best;
  }

  const GameInstance& inst_;
  ContextMode context_mode_;
  FollowerMode follower_mode_;
  std::vector<double> probs_;
  std::vector<int> seq_;
  Rng rng_;
};

}  // namespace

std::unique_ptr<Environment> make_scenario(const std::string& name,
                                           const GameInstance& inst, int T,
                                           std::uint64_t seed, bool bandit) {
  const int K = inst.num_types;
  if (name == "olt-lower-bound") return std::make_unique<OLTEnvironment>();
  if (name == "stoch-follower-adv-context") {
    std::vector<double> uniform(K, 1.0 / K);
    return std::make_unique<PresetEnv>(inst, PresetEnv::ContextMode::Rotation,
                                       PresetEnv::FollowerMode::Stochastic,
                                       std::move(uniform), std::vector<int>{},
                                       seed);
  }
  if (name == "stoch-context-adv-follower") {
    if (bandit) {
      // Non-adaptive adversarial sequence: deterministic round-robin, fixed
      // before the run and never responding to play.
      std::vector<int> seq(T);
      for (int t = 0; t < T; ++t) seq[t] = t % K;
      return std::make_unique<PresetEnv>(
          inst, PresetEnv::ContextMode::Stochastic,
          PresetEnv::FollowerMode::Sequence, std::vector<double>{},
          std::move(seq), seed);
    }
    return std::make_unique<PresetEnv>(
        inst, PresetEnv::ContextMode::Stochastic,
        PresetEnv::FollowerMode::AdaptivePunish, std::vector<double>{},
        std::vector<int>{}, seed);
  }
  if (name == "fully-stochastic") {
    std::vector<double> probs(K);
    double total = 0.0;
    for (int i = 0; i < K; ++i) total += K - i;
    for (int i = 0; i < K; ++i) probs[i] = (K - i) / total;
    return std::make_unique<PresetEnv>(inst, PresetEnv::ContextMode::Stochastic,
                                       PresetEnv::FollowerMode::Stochastic,
                                       std::move(probs), std::vector<int>{},
                                       seed);
  }
  throw std::runtime_error("unknown scenario '" + name + "'");
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "stoch-follower-adv-context", "stoch-context-adv-follower",
      "fully-stochastic", "olt-lower-bound"};
  return names;
}

}  // namespace csg
