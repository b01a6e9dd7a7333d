#include <cmath>

#include "csg/environments.hpp"
#include "csg/harness.hpp"
#include "csg/learners.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace csg;
using namespace csg::testing;

TEST_CASE("weight grid combinatorics") {
  const auto g1 = weight_grid(5, 1);
  REQUIRE(g1.size() == 1);
  CHECK(g1[0][0] == doctest::Approx(1.0));

  const auto g2 = weight_grid(2, 2);
  REQUIRE(g2.size() == 3);
  CHECK(g2[0] == std::vector<double>{0.0, 1.0});
  CHECK(g2[1] == std::vector<double>{0.5, 0.5});
  CHECK(g2[2] == std::vector<double>{1.0, 0.0});

  // |grid| = C(M+K-1, K-1).
  const auto g3 = weight_grid(6, 3);
  CHECK(g3.size() == 28);
}

TEST_CASE("hedge state probabilities") {
  SUBCASE("zero losses are uniform") {
    HedgeState h(4, 0.7);
    for (double p : h.probabilities()) CHECK(p == doctest::Approx(0.25));
  }
  SUBCASE("two-expert closed form") {
    HedgeState h(2, 0.5);
    h.update({-1.0, 0.0});
    const auto p = h.probabilities();
    const double e = std::exp(0.5);
    CHECK(p[0] == doctest::Approx(e / (e + 1.0)).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(1.0 / (e + 1.0)).epsilon(1e-12));
  }
  SUBCASE("single expert always sampled") {
    HedgeState h(1, 0.3);
    Rng rng(1);
    for (int i = 0; i < 10; ++i) CHECK(h.sample(rng) == 0);
  }
  SUBCASE("stable under large cumulative losses") {
    HedgeState h(3, 1.0);
    h.update({-10000.0, -9999.0, -500.0});
    const auto p = h.probabilities();
    double sum = 0.0;
    for (double v : p) {
      CHECK(std::isfinite(v));
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[0] > p[1]);
  }
}

TEST_CASE("hand-computed two-expert hedge trajectory over 5 rounds") {
  const double eta = 0.4;
  HedgeState h(2, eta);
  const double losses[5][2] = {
      {-1.0, 0.0}, {0.0, -0.5}, {-0.25, -0.75}, {0.0, 0.0}, {-1.0, -0.25}};
  double cum0 = 0.0, cum1 = 0.0;
  for (int t = 0; t < 5; ++t) {
    h.update({losses[t][0], losses[t][1]});
    cum0 += losses[t][0];
    cum1 += losses[t][1];
    const double w0 = std::exp(-eta * cum0), w1 = std::exp(-eta * cum1);
    const auto p = h.probabilities();
    CHECK(std::abs(p[0] - w0 / (w0 + w1)) < 1e-12);
    CHECK(std::abs(p[1] - w1 / (w0 + w1)) < 1e-12);
  }
}

TEST_CASE("greedy estimator arithmetic") {
  const GameInstance inst =
      load_instance(std::string(INSTANCE_DIR) + "/rotation_k2.json");
  GreedyLearner learner(inst, 1e-3, EstimatorKind::TypeFreq);
  const auto prior = learner.type_estimate();
  CHECK(prior[0] == doctest::Approx(0.5));
  const Context z = inst.context_space.contexts[0];
  learner.observe_full(z, unit_mass(0, 2), 0);
  learner.observe_full(z, unit_mass(0, 2), 0);
  learner.observe_full(z, unit_mass(0, 2), 1);
  const auto p = learner.type_estimate();
  CHECK(p[0] == doctest::Approx(2.0 / 3.0));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("greedy step matches exhaustive evaluation over the menu") {
  const GameInstance inst =
      load_instance(std::string(INSTANCE_DIR) + "/threshold_k2.json");
  GreedyLearner learner(inst, 1e-3, EstimatorKind::TypeFreq);
  const Context z = inst.context_space.contexts[2];
  // Feed a 3:1 type history, then check the argmax by hand.
  learner.observe_full(z, unit_mass(0, 2), 0);
  learner.observe_full(z, unit_mass(0, 2), 0);
  learner.observe_full(z, unit_mass(0, 2), 0);
  learner.observe_full(z, unit_mass(0, 2), 1);
  const MixedStrategy chosen = learner.step(z);
  const auto E = approx_extreme_points(inst, z, 1e-3);
  double best = -1.0;
  MixedStrategy best_x;
  for (const auto& pt : E.points) {
    const double v =
        0.75 * expected_leader_utility(inst, z, pt.x, pt.sigma[0]) +
        0.25 * expected_leader_utility(inst, z, pt.x, pt.sigma[1]);
    if (v > best) {
      best = v;
      best_x = pt.x;
    }
  }
  CHECK(chosen.probs == best_x.probs);
}

TEST_CASE("typefreq estimate concentrates on stochastic runs") {
  const GameInstance inst =
      load_instance(std::string(INSTANCE_DIR) + "/rotation_k2.json");
  const int T = 1000;
  const std::vector<double> p_true = {0.7, 0.3};
  Rng rng(7);
  GreedyLearner learner(inst, default_delta(T), EstimatorKind::TypeFreq);
  const Context z = inst.context_space.contexts[0];
  for (int t = 1; t <= T; ++t) {
    learner.observe_full(z, unit_mass(0, 2), rng.sample(p_true));
    if (t == 10 || t == 100 || t == 1000) {
      const auto p = learner.type_estimate();
      double tv = 0.0;
      for (int i = 0; i < 2; ++i) tv += std::abs(p[i] - p_true[i]);
      tv *= 0.5;
      CHECK(tv <= 2.0 * 2.0 * std::sqrt(std::log(2.0 * T) / t));
    }
  }
}

TEST_CASE("bandit greedy explore then exploit") {
  const GameInstance olt = build_olt_instance();
  const int T = 200;
  SUBCASE("deterministic followers give exact estimates") {
    BanditGreedyLearner learner(olt, T, 1e-3, 20);
    const Context z{{0.5}, ""};
    // All followers type 0 during explore.
    for (int t = 0; t < 40; ++t) {
      const MixedStrategy x = learner.step(z);
      learner.observe_bandit(z, x, follower_best_response(olt, 0, z, x));
    }
    // Exploit phase: optimal pure commitment against type 0 is a0.
    const MixedStrategy x = learner.step(z);
    CHECK(x[0] == doctest::Approx(1.0));
  }
  SUBCASE("oversized explore budget is rejected") {
    CHECK_THROWS(BanditGreedyLearner(olt, 100, 1e-3, 51));
  }
  SUBCASE("default explore rounds respect the budget") {
    BanditGreedyLearner learner(olt, T, 1e-3, std::nullopt);
    CHECK(learner.explore_rounds_per_element() * learner.spanner().rank() <= T);
    CHECK(learner.explore_rounds_per_element() >= 1);
  }
}

TEST_CASE("explore phase variance stays under K/N") {
  const GameInstance olt = build_olt_instance();
  const Spanner spanner = barycentric_spanner(indicator_set(olt, 1e-3));
  const int N = 50;
  const std::vector<double> probs = {0.6, 0.4};
  Rng rng(11);
  const int reps = 400;
  std::vector<double> samples(reps);
  for (int rep = 0; rep < reps; ++rep) {
    const auto est = simulate_explore_estimates(olt, spanner, N, probs, rng);
    samples[rep] = indicator_estimate(spanner, {1, 0}, est);
  }
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= reps;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= reps;
  const double bound = 2.0 / N;  // K/N
  CHECK(var <= bound + 3.0 * bound / std::sqrt(reps));
  CHECK(std::abs(mean - probs[0]) < 0.1);
}

TEST_CASE("block hedge configuration") {
  const GameInstance olt = build_olt_instance();
  SUBCASE("degenerate single block updates hedge once") {
    BlockHedgeLearner learner(olt, 50, 1e-3, 10, 1, std::nullopt, 3);
    CHECK(learner.block_count() == 1);
    CHECK(learner.block_size() == 50);
    const Context z{{0.5}, ""};
    for (int t = 0; t < 50; ++t) {
      const MixedStrategy x = learner.step(z);
      learner.observe_bandit(z, x, follower_best_response(olt, 0, z, x));
    }
    // One update happened; cumulative losses are no longer all zero.
    double total = 0.0;
    for (double c : learner.hedge().cumulative_loss()) total += std::abs(c);
    CHECK(total > 0.0);
  }
  SUBCASE("too-small blocks are rejected") {
    CHECK_THROWS(BlockHedgeLearner(olt, 10, 1e-3, 10, 5, std::nullopt, 3));
  }
  SUBCASE("default block count keeps blocks above rank + 1") {
    BlockHedgeLearner learner(olt, 2000, 1e-3, 10, std::nullopt, std::nullopt, 3);
    CHECK(learner.block_size() >= learner.spanner().rank() + 1);
  }
}

TEST_CASE("block loss estimate expands correctly for K=1") {
  Rng rng(13);
  GameInstance inst = random_instance(rng, 2, 2, 1, 0);
  const auto W = indicator_set(inst, 1e-3);
  const Spanner s = barycentric_spanner(W);
  const Context z = inst.context_space.contexts[0];
  const auto E = approx_extreme_points(inst, z, 1e-3);
  REQUIRE_FALSE(E.points.empty());
  const auto& pt = E.points[0];
  const std::vector<double> est(s.rank(), 1.0);
  const double loss = block_loss_estimate(inst, s, z, pt.x, pt.sigma, est);
  // Hand expansion: -sum_af lambda(1{sigma=af}) * phat * u(z, x, af).
  double expect = 0.0;
  for (int a_f = 0; a_f < 2; ++a_f) {
    const std::vector<int> bits = {pt.sigma[0] == a_f ? 1 : 0};
    double lam = 0.0;
    const auto coeffs = s.coefficients(bits);
    for (std::size_t i = 0; i < coeffs.size(); ++i) lam += coeffs[i] * est[i];
    expect -= lam * expected_leader_utility(inst, z, pt.x, a_f);
  }
  CHECK(loss == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(loss) <= 1.0 * 2.0 + 1e-9);
}

TEST_CASE("learner factory") {
  const GameInstance inst =
      load_instance(std::string(INSTANCE_DIR) + "/rotation_k2.json");
  for (const char* alg :
       {"greedy-typefreq", "greedy-actionfreq", "hedge", "bandit-greedy",
        "bandit-blockhedge"}) {
    LearnerConfig cfg;
    cfg.alg = alg;
    cfg.T = 100;
    cfg.seed = 5;
    CHECK(make_learner(inst, cfg) != nullptr);
  }
  LearnerConfig bad;
  bad.alg = "nope";
  bad.T = 10;
  CHECK_THROWS(make_learner(inst, bad));
}

TEST_CASE("hedge losses stay in the declared range") {
  const GameInstance inst =
      load_instance(std::string(INSTANCE_DIR) + "/threshold_k2.json");
  HedgeLearner learner(inst, 100, 1e-3, 10, std::nullopt, 17);
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const Context& z = inst.context_space.contexts[rng.uniform_int(8)];
    const MixedStrategy x = learner.step(z);
    CHECK(x.valid(1e-6));
    learner.observe_full(z, x, rng.uniform_int(2));
  }
}
