#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "csg/game.hpp"
#include "csg/geometry.hpp"
#include "csg/rng.hpp"
#include "csg/spanner.hpp"

namespace csg {

// Hyperparameter defaults.
double default_delta(int T);                     // min(1/T, 1e-3)
int default_grid_resolution(int T);              // min(T, 40)
int default_explore_rounds(const GameInstance&, int T, int spanner_rank);
int default_block_count(const GameInstance&, int T, int spanner_rank);

// All weight vectors omega in the K-simplex with M*omega integral,
// lexicographic by first coordinate ascending.
std::vector<std::vector<double>> weight_grid(int M, int K);

// Exponential weights over a finite expert set; probabilities are
// softmax(-eta * cumulative loss) with max-subtraction for stability.
class HedgeState {
 public:
  HedgeState(int num_experts, double eta);

  std::vector<double> probabilities() const;
  int sample(Rng& rng) const;
  void update(const std::vector<double>& losses);
  double eta() const { return eta_; }
  const std::vector<double>& cumulative_loss() const { return cum_loss_; }

 private:
  std::vector<double> cum_loss_;
  double eta_;
};

// Per-context evaluation shared by the policy-class learners: the extreme
// point menu plus each point's leader utility against every follower type.
struct ContextEval {
  ExtremePointSet E;
  std::vector<std::vector<double>> type_utility;  // [point][type]
};

class PolicyClass {
 public:
  PolicyClass(const GameInstance& inst, double delta, int M);

  const std::vector<std::vector<double>>& omegas() const { return omegas_; }
  int size() const { return static_cast<int>(omegas_.size()); }

  const ContextEval& context_eval(const Context& z);

  // Index into eval.E.points of argmax_x sum_i omega[i] * u(z, x, b_i(z,x));
  // first index wins on ties.
  static int select(const std::vector<double>& omega, const ContextEval& eval);

 private:
  const GameInstance& inst_;
  double delta_;
  std::vector<std::vector<double>> omegas_;
  std::unordered_map<std::string, ContextEval> cache_;
  bool cache_enabled_;
};

// Uniform online-learner contract: observe context, commit a strategy,
// receive feedback (follower type or follower action).
class Learner {
 public:
  virtual ~Learner() = default;
  virtual MixedStrategy step(const Context& z) = 0;
  virtual void observe_full(const Context& z, const MixedStrategy& x,
                            int type_idx) {
    (void)z, (void)x, (void)type_idx;
  }
  virtual void observe_bandit(const Context& z, const MixedStrategy& x,
                              int follower_action) {
    (void)z, (void)x, (void)follower_action;
  }
  virtual bool bandit_feedback() const { return false; }
};

enum class EstimatorKind { TypeFreq, ActionFreq };

// Greedy full-feedback learner: best extreme point against the estimated
// follower distribution (uniform prior before the first observation).
class GreedyLearner : public Learner {
 public:
  GreedyLearner(const GameInstance& inst, double delta, EstimatorKind kind);

  MixedStrategy step(const Context& z) override;
  void observe_full(const Context& z, const MixedStrategy& x,
                    int type_idx) override;

  std::vector<double> type_estimate() const;

 private:
  const ContextEval& context_eval(const Context& z);

  const GameInstance& inst_;
  double delta_;
  EstimatorKind kind_;
  std::vector<int> type_counts_;
  std::vector<int> type_history_;
  std::unordered_map<std::string, ContextEval> cache_;
  bool cache_enabled_;
};

// Full-feedback Hedge over the weight-grid policy class.
class HedgeLearner : public Learner {
 public:
  HedgeLearner(const GameInstance& inst, int T, double delta, int M,
               std::optional<double> eta, std::uint64_t seed);

  MixedStrategy step(const Context& z) override;
  void observe_full(const Context& z, const MixedStrategy& x,
                    int type_idx) override;

  const HedgeState& hedge() const { return hedge_; }
  PolicyClass& policies() { return policies_; }

 private:
  const GameInstance& inst_;
  PolicyClass policies_;
  HedgeState hedge_;
  Rng rng_;
};

// Replays one explore phase: plays each spanner realizer N times against
// i.i.d. types from `probs`, returning the observed match frequency per
// spanner element. Shared by the bandit learner and its variance tests.
std::vector<double> simulate_explore_estimates(const GameInstance& inst,
                                               const Spanner& spanner, int N,
                                               const std::vector<double>& probs,
                                               Rng& rng);

// p_hat(1{sigma = a_f}) reconstructed through spanner coefficients.
double indicator_estimate(const Spanner& spanner, const std::vector<int>& bits,
                          const std::vector<double>& element_estimates);

// Explore-then-exploit bandit learner (context-free follower utilities).
class BanditGreedyLearner : public Learner {
 public:
  BanditGreedyLearner(const GameInstance& inst, int T, double delta,
                      std::optional<int> N);

  MixedStrategy step(const Context& z) override;
  void observe_bandit(const Context& z, const MixedStrategy& x,
                      int follower_action) override;
  bool bandit_feedback() const override { return true; }

  int explore_rounds_per_element() const { return N_; }
  const Spanner& spanner() const { return spanner_; }

 private:
  void finalize_estimates();

  const GameInstance& inst_;
  double delta_;
  int T_;
  int N_;
  ExtremePointSet E_;
  Spanner spanner_;
  int t_ = 0;
  std::vector<int> match_counts_;
  bool estimates_ready_ = false;
  std::vector<std::vector<double>> point_af_estimate_;  // [point][a_f]
  std::unordered_map<std::string, int> exploit_cache_;
};

// Loss estimate for one policy choice given the block's one-shot spanner
// element estimates; range [-K*A_f, K*A_f].
double block_loss_estimate(const GameInstance& inst, const Spanner& spanner,
                           const Context& z, const MixedStrategy& x,
                           const std::vector<int>& sigma,
                           const std::vector<double>& element_estimates);

// Block-Hedge bandit learner for stochastic contexts.
class BlockHedgeLearner : public Learner {
 public:
  BlockHedgeLearner(const GameInstance& inst, int T, double delta, int M,
                    std::optional<int> Z, std::optional<double> eta,
                    std::uint64_t seed);

  MixedStrategy step(const Context& z) override;
  void observe_bandit(const Context& z, const MixedStrategy& x,
                      int follower_action) override;
  bool bandit_feedback() const override { return true; }

  int block_count() const { return Z_; }
  int block_size() const { return block_size_; }
  const HedgeState& hedge() const { return hedge_; }
  const Spanner& spanner() const { return spanner_; }
  PolicyClass& policies() { return policies_; }

 private:
  void start_block();
  void end_block();

  const GameInstance& inst_;
  double delta_;
  int T_;
  int Z_;
  int block_size_;
  Spanner spanner_;
  PolicyClass policies_;
  HedgeState hedge_;
  Rng rng_;
  int t_ = 0;
  // Current block state.
  std::vector<int> slot_element_;     // spanner element per slot, -1 = hedge
  int context_slot_ = 0;
  std::vector<double> element_estimates_;
  std::vector<Context> slot_context_;
};

struct LearnerConfig {
  std::string alg;  // greedy-typefreq | greedy-actionfreq | hedge |
                    // bandit-greedy | bandit-blockhedge
  int T = 0;
  double delta = 0.0;  // 0 = default
  std::optional<double> eta;
  std::optional<int> M;
  std::optional<int> N;
  std::optional<int> Z;
  std::uint64_t seed = 0;
};

std::unique_ptr<Learner> make_learner(const GameInstance& inst,
                                      const LearnerConfig& cfg);

}  // namespace csg
