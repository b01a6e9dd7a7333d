#include "csg/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csg {

double default_delta(int T) {
  return std::min(1.0 / std::max(T, 1), 1e-3);
}

int default_grid_resolution(int T) { return std::min(T, 40); }

int default_explore_rounds(const GameInstance& inst, int T, int spanner_rank) {
  if (spanner_rank <= 0) return 0;
  const double A_f = inst.num_follower_actions;
  const double K = inst.num_types;
  const double raw =
      std::cbrt(A_f * A_f * static_cast<double>(T) * T * std::log(T) / K);
  int N = static_cast<int>(std::ceil(raw));
  return std::clamp(N, 1, std::max(1, T / spanner_rank));
}

int default_block_count(const GameInstance& inst, int T, int spanner_rank) {
  const double A_f = inst.num_follower_actions;
  const double raw = std::pow(static_cast<double>(T), 2.0 / 3.0) /
                     std::cbrt(A_f * std::log(T));
  int Z = std::max(1, static_cast<int>(std::ceil(raw)));
  Z = std::min(Z, std::max(1, T / (spanner_rank + 1)));
  return Z;
}

std::vector<std::vector<double>> weight_grid(int M, int K) {
  if (M < 1 || K < 1) throw std::invalid_argument("weight_grid: M, K >= 1");
  std::vector<std::vector<double>> out;
  std::vector<int> counts(K, 0);
  // Compositions of M into K parts, first coordinate ascending.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == K - 1) {
      counts[pos] = remaining;
      std::vector<double> omega(K);
      for (int i = 0; i < K; ++i) omega[i] = static_cast<double>(counts[i]) / M;
      out.push_back(std::move(omega));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  rec(rec, 0, M);
  return out;
}

HedgeState::HedgeState(int num_experts, double eta)
    : cum_loss_(num_experts, 0.0), eta_(eta) {
  if (num_experts < 1) throw std::invalid_argument("HedgeState: empty expert set");
  if (!(eta >= 0.0)) throw std::invalid_argument("HedgeState: eta must be >= 0");
}

std::vector<double> HedgeState::probabilities() const {
  const double lo = *std::min_element(cum_loss_.begin(), cum_loss_.end());
  std::vector<double> p(cum_loss_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(-eta_ * (cum_loss_[i] - lo));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

int HedgeState::sample(Rng& rng) const {
  const auto p = probabilities();
  return rng.sample(p);
}

void HedgeState::update(const std::vector<double>& losses) {
  if (losses.size() != cum_loss_.size())
    throw std::invalid_argument("HedgeState::update: size mismatch");
  for (std::size_t i = 0; i < losses.size(); ++i) cum_loss_[i] += losses[i];
}

namespace {

ContextEval build_context_eval(const GameInstance& inst, const Context& z,
                               double delta) {
  ContextEval eval;
  eval.E = approx_extreme_points(inst, z, delta);
  eval.type_utility.resize(eval.E.points.size());
  for (std::size_t p = 0; p < eval.E.points.size(); ++p) {
    const auto& pt = eval.E.points[p];
    eval.type_utility[p].resize(inst.num_types);
    for (int i = 0; i < inst.num_types; ++i)
      eval.type_utility[p][i] =
          expected_leader_utility(inst, z, pt.x, pt.sigma[i]);
  }
  return eval;
}

}  // namespace

PolicyClass::PolicyClass(const GameInstance& inst, double delta, int M)
    : inst_(inst),
      delta_(delta),
      omegas_(weight_grid(M, inst.num_types)),
      cache_enabled_(inst.context_space.kind == ContextSpace::Kind::Finite) {}

const ContextEval& PolicyClass::context_eval(const Context& z) {
  const std::string key = context_key(z);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  if (!cache_enabled_ && !cache_.empty()) cache_.clear();
  return cache_.emplace(key, build_context_eval(inst_, z, delta_)).first->second;
}

int PolicyClass::select(const std::vector<double>& omega,
                        const ContextEval& eval) {
  if (eval.E.points.empty())
    throw std::runtime_error("policy selection over empty extreme point set");
  int best = 0;
  double best_score = -1.0;
  for (std::size_t p = 0; p < eval.E.points.size(); ++p) {
    double score = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i)
      score += omega[i] * eval.type_utility[p][i];
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(p);
    }
  }
  return best;
}

GreedyLearner::GreedyLearner(const GameInstance& inst, double delta,
                             EstimatorKind kind)
    : inst_(inst),
      delta_(delta),
      kind_(kind),
      type_counts_(inst.num_types, 0),
      cache_enabled_(inst.context_space.kind == ContextSpace::Kind::Finite) {}

const ContextEval& GreedyLearner::context_eval(const Context& z) {
  const std::string key = context_key(z);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  if (!cache_enabled_ && !cache_.empty()) cache_.clear();
  return cache_.emplace(key, build_context_eval(inst_, z, delta_)).first->second;
}

std::vector<double> GreedyLearner::type_estimate() const {
  const int total =
      static_cast<int>(type_history_.size());
  std::vector<double> p(inst_.num_types);
  for (int i = 0; i < inst_.num_types; ++i)
    p[i] = total == 0 ? 1.0 / inst_.num_types
                      : static_cast<double>(type_counts_[i]) / total;
  return p;
}

MixedStrategy GreedyLearner::step(const Context& z) {
  const ContextEval& eval = context_eval(z);
  if (eval.E.points.empty())
    throw std::runtime_error("greedy step: empty extreme point set");
  const bool uniform_action_prior =
      kind_ == EstimatorKind::ActionFreq && type_history_.empty();
  const std::vector<double> p = type_estimate();
  int best = 0;
  double best_score = -1.0;
  for (std::size_t pt = 0; pt < eval.E.points.size(); ++pt) {
    double score = 0.0;
    if (uniform_action_prior) {
      for (int a_f = 0; a_f < inst_.num_follower_actions; ++a_f)
        score += expected_leader_utility(inst_, z, eval.E.points[pt].x, a_f) /
                 inst_.num_follower_actions;
    } else {
      // TypeFreq directly; ActionFreq replayed over the type history gives
      // the same weighted sum with empirical type frequencies.
      for (int i = 0; i < inst_.num_types; ++i)
        score += p[i] * eval.type_utility[pt][i];
    }
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(pt);
    }
  }
  return eval.E.points[best].x;
}

void GreedyLearner::observe_full(const Context&, const MixedStrategy&,
                                 int type_idx) {
  ++type_counts_[type_idx];
  type_history_.push_back(type_idx);
}

HedgeLearner::HedgeLearner(const GameInstance& inst, int T, double delta, int M,
                           std::optional<double> eta, std::uint64_t seed)
    : inst_(inst),
      policies_(inst, delta, M),
      hedge_(policies_.size(),
             eta ? *eta
                 : std::sqrt(std::log(std::max(2, policies_.size())) /
                             std::max(T, 1))),
      rng_(seed) {}

MixedStrategy HedgeLearner::step(const Context& z) {
  const ContextEval& eval = policies_.context_eval(z);
  const int idx = hedge_.sample(rng_);
  return eval.E.points[PolicyClass::select(policies_.omegas()[idx], eval)].x;
}

void HedgeLearner::observe_full(const Context& z, const MixedStrategy&,
                                int type_idx) {
  const ContextEval& eval = policies_.context_eval(z);
  std::vector<double> losses(policies_.size());
  for (int j = 0; j < policies_.size(); ++j) {
    const int p = PolicyClass::select(policies_.omegas()[j], eval);
    losses[j] = -eval.type_utility[p][type_idx];
    if (losses[j] < -1.0 - kTieTol || losses[j] > kTieTol)
      throw std::logic_error("hedge loss outside [-1, 0]");
  }
  hedge_.update(losses);
}

std::vector<double> simulate_explore_estimates(const GameInstance& inst,
                                               const Spanner& spanner, int N,
                                               const std::vector<double>& probs,
                                               Rng& rng) {
  const Context probe = inst.context_space.probe();
  std::vector<double> est(spanner.rank(), 0.0);
  for (int i = 0; i < spanner.rank(); ++i) {
    const auto& el = spanner.elements()[i];
    int matches = 0;
    for (int n = 0; n < N; ++n) {
      const int type = rng.sample(probs);
      if (follower_best_response(inst, type, probe, el.realizer_x) ==
          el.realizer_action)
        ++matches;
    }
    est[i] = static_cast<double>(matches) / N;
  }
  return est;
}

double indicator_estimate(const Spanner& spanner, const std::vector<int>& bits,
                          const std::vector<double>& element_estimates) {
  const auto lam = spanner.coefficients(bits);
  double v = 0.0;
  for (std::size_t i = 0; i < lam.size(); ++i)
    v += lam[i] * element_estimates[i];
  return v;
}

BanditGreedyLearner::BanditGreedyLearner(const GameInstance& inst, int T,
                                         double delta, std::optional<int> N)
    : inst_(inst),
      delta_(delta),
      T_(T),
      E_(approx_extreme_points(inst, inst.context_space.probe(), delta)),
      spanner_(barycentric_spanner(indicator_set(inst, delta))) {
  const int r = spanner_.rank();
  N_ = N ? *N : default_explore_rounds(inst, T, r);
  if (r > 0 && static_cast<long long>(N_) * r > T)
    throw std::runtime_error("invalid config: N * spanner rank exceeds T");
  match_counts_.assign(std::max(r, 0), 0);
}

MixedStrategy BanditGreedyLearner::step(const Context& z) {
  const int r = spanner_.rank();
  if (t_ < N_ * r) {
    return spanner_.elements()[t_ / N_].realizer_x;
  }
  if (!estimates_ready_) finalize_estimates();
  const std::string key = context_key(z);
  auto it = exploit_cache_.find(key);
  int best;
  if (it != exploit_cache_.end()) {
    best = it->second;
  } else {
    best = 0;
    double best_score = -1e300;
    for (std::size_t p = 0; p < E_.points.size(); ++p) {
      double score = 0.0;
      for (int a_f = 0; a_f < inst_.num_follower_actions; ++a_f)
        score += point_af_estimate_[p][a_f] *
                 expected_leader_utility(inst_, z, E_.points[p].x, a_f);
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(p);
      }
    }
    exploit_cache_.emplace(key, best);
  }
  return E_.points[best].x;
}

void BanditGreedyLearner::observe_bandit(const Context&, const MixedStrategy&,
                                         int follower_action) {
  const int r = spanner_.rank();
  if (t_ < N_ * r) {
    const int element = t_ / N_;
    if (follower_action == spanner_.elements()[element].realizer_action)
      ++match_counts_[element];
  }
  ++t_;
}

void BanditGreedyLearner::finalize_estimates() {
  const int r = spanner_.rank();
  std::vector<double> element_est(r);
  for (int i = 0; i < r; ++i)
    element_est[i] = static_cast<double>(match_counts_[i]) / std::max(N_, 1);
  point_af_estimate_.assign(E_.points.size(),
                            std::vector<double>(inst_.num_follower_actions));
  const double K = inst_.num_types;
  for (std::size_t p = 0; p < E_.points.size(); ++p) {
    for (int a_f = 0; a_f < inst_.num_follower_actions; ++a_f) {
      std::vector<int> bits(inst_.num_types);
      for (int i = 0; i < inst_.num_types; ++i)
        bits[i] = E_.points[p].sigma[i] == a_f ? 1 : 0;
      const double est = indicator_estimate(spanner_, bits, element_est);
      if (est < -K - 1e-6 || est > K + 1.0 + 1e-6)
        throw std::logic_error("reconstructed indicator estimate out of range");
      point_af_estimate_[p][a_f] = est;
    }
  }
  estimates_ready_ = true;
}

double block_loss_estimate(const GameInstance& inst, const Spanner& spanner,
                           const Context& z, const MixedStrategy& x,
                           const std::vector<int>& sigma,
                           const std::vector<double>& element_estimates) {
  double loss = 0.0;
  for (int a_f = 0; a_f < inst.num_follower_actions; ++a_f) {
    std::vector<int> bits(inst.num_types);
    for (int i = 0; i < inst.num_types; ++i)
      bits[i] = sigma[i] == a_f ? 1 : 0;
    loss -= indicator_estimate(spanner, bits, element_estimates) *
            expected_leader_utility(inst, z, x, a_f);
  }
  return loss;
}

BlockHedgeLearner::BlockHedgeLearner(const GameInstance& inst, int T,
                                     double delta, int M, std::optional<int> Z,
                                     std::optional<double> eta,
                                     std::uint64_t seed)
    : inst_(inst),
      delta_(delta),
      T_(T),
      spanner_(barycentric_spanner(indicator_set(inst, delta))),
      policies_(inst, delta, M),
      hedge_(policies_.size(), 0.0),
      rng_(seed) {
  const int r = spanner_.rank();
  Z_ = Z ? *Z : default_block_count(inst, T, r);
  if (Z_ < 1 || Z_ > T)
    throw std::runtime_error("invalid config: Z must be in [1, T]");
  block_size_ = T / Z_;
  if (block_size_ < r + 1)
    throw std::runtime_error("invalid config: block size below spanner rank + 1");
  // Unit-scale Hedge rate. The worst-case loss bound K * A_f would shrink eta
  // by another constant, but realized block losses stay near unit scale (the
  // spanner coefficients are in [-1, 1] and utilities in [0, 1]) and the
  // conservative rate leaves the weights noise-dominated at practical
  // horizons.
  const double default_eta =
      std::sqrt(std::log(std::max(2, policies_.size())) / Z_);
  hedge_ = HedgeState(policies_.size(), eta ? *eta : default_eta);
}

void BlockHedgeLearner::start_block() {
  const int r = spanner_.rank();
  slot_element_.assign(block_size_, -1);
  const auto slots = rng_.sample_distinct(block_size_, r);
  for (int i = 0; i < r; ++i) slot_element_[slots[i]] = i;
  context_slot_ = rng_.uniform_int(block_size_);
  element_estimates_.assign(r, 0.0);
  slot_context_.assign(block_size_, Context{});
}

MixedStrategy BlockHedgeLearner::step(const Context& z) {
  auto hedge_play = [&]() {
    const ContextEval& eval = policies_.context_eval(z);
    const int idx = hedge_.sample(rng_);
    return eval.E.points[PolicyClass::select(policies_.omegas()[idx], eval)].x;
  };
  if (t_ >= Z_ * block_size_) return hedge_play();  // trailing rounds
  const int slot = t_ % block_size_;
  if (slot == 0) start_block();
  slot_context_[slot] = z;
  const int element = slot_element_[slot];
  if (element >= 0) return spanner_.elements()[element].realizer_x;
  return hedge_play();
}

void BlockHedgeLearner::observe_bandit(const Context&, const MixedStrategy&,
                                       int follower_action) {
  if (t_ < Z_ * block_size_) {
    const int slot = t_ % block_size_;
    const int element = slot_element_[slot];
    if (element >= 0)
      element_estimates_[element] =
          follower_action == spanner_.elements()[element].realizer_action
              ? 1.0
              : 0.0;
    if (slot == block_size_ - 1) end_block();
  }
  ++t_;
}

void BlockHedgeLearner::end_block() {
  const Context& z = slot_context_[context_slot_];
  const ContextEval& eval = policies_.context_eval(z);
  const double range = static_cast<double>(inst_.num_types) *
                       inst_.num_follower_actions;
  std::vector<double> losses(policies_.size());
  for (int j = 0; j < policies_.size(); ++j) {
    const int p = PolicyClass::select(policies_.omegas()[j], eval);
    losses[j] = block_loss_estimate(inst_, spanner_, z, eval.E.points[p].x,
                                    eval.E.points[p].sigma, element_estimates_);
    if (std::abs(losses[j]) > range + 1e-9)
      throw std::logic_error("block loss estimate outside [-K*A_f, K*A_f]");
  }
  hedge_.update(losses);
}

std::unique_ptr<Learner> make_learner(const GameInstance& inst,
                                      const LearnerConfig& cfg) {
  const double delta =
      cfg.delta > 0.0 ? cfg.delta : default_delta(cfg.T);
  const int M = cfg.M ? *cfg.M : default_grid_resolution(cfg.T);
  if (cfg.alg == "greedy-typefreq")
    return std::make_unique<GreedyLearner>(inst, delta, EstimatorKind::TypeFreq);
  if (cfg.alg == "greedy-actionfreq")
    return std::make_unique<GreedyLearner>(inst, delta,
                                           EstimatorKind::ActionFreq);
  if (cfg.alg == "hedge")
    return std::make_unique<HedgeLearner>(inst, cfg.T, delta, M, cfg.eta,
                                          cfg.seed);
  if (cfg.alg == "bandit-greedy")
    return std::make_unique<BanditGreedyLearner>(inst, cfg.T, delta, cfg.N);
  if (cfg.alg == "bandit-blockhedge")
    return std::make_unique<BlockHedgeLearner>(inst, cfg.T, delta, M, cfg.Z,
                                               cfg.eta, cfg.seed);
  throw std::runtime_error("unknown alg '" + cfg.alg + "'");
}

}  // namespace csg
