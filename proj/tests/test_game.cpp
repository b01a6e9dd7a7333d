#include <cmath>

#include "csg/environments.hpp"
#include "csg/game.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace csg;
using namespace csg::testing;

TEST_CASE("tabular lookup and linear clipping") {
  GameInstance inst;
  inst.num_leader_actions = 2;
  inst.num_follower_actions = 2;
  inst.num_types = 1;
  UtilityModel tab;
  tab.kind = UtilityKind::Tabular;
  tab.tables["c0"] = {0.1, 0.7, 0.3, 0.9};
  inst.leader_utility = tab;
  inst.follower_utilities = {tab};
  Context z{{0.0}, "c0"};
  CHECK(eval_utility(tab, inst, z, 0, 1) == 0.7);

  Context unknown{{0.0}, "nope"};
  CHECK_THROWS(eval_utility(tab, inst, unknown, 0, 0));

  UtilityModel lin;
  lin.kind = UtilityKind::LinearClipped;
  lin.theta = {{{0.0, 0.0}, {2.0, 0.0}}, {{0.0, 0.0}, {0.0, 0.0}}};
  Context zv{{1.0, 0.0}, ""};
  CHECK(eval_utility(lin, inst, zv, 0, 0) == 0.0);   // zero theta
  CHECK(eval_utility(lin, inst, zv, 0, 1) == 1.0);   // clamped at 1
}

TEST_CASE("expected leader utility") {
  const GameInstance inst = build_olt_instance();
  Context z{{0.5}, ""};
  MixedStrategy x{{0.3, 0.7}};
  CHECK(expected_leader_utility(inst, z, x, 1) == doctest::Approx(0.7));
  CHECK(expected_leader_utility(inst, z, unit_mass(0, 2), 0) ==
        doctest::Approx(leader_utility(inst, z, 0, 0)));

  // Midpoint of a utility column.
  Rng rng(7);
  GameInstance r = random_instance(rng, 2, 2, 1, 1);
  Context zc = r.context_space.contexts[0];
  MixedStrategy half{{0.5, 0.5}};
  const double expect =
      0.5 * (leader_utility(r, zc, 0, 1) + leader_utility(r, zc, 1, 1));
  CHECK(expected_leader_utility(r, zc, half, 1) == doctest::Approx(expect));
}

TEST_CASE("best response ties go to the higher action index") {
  Rng rng(11);
  GameInstance inst = random_instance(rng, 2, 3, 1, 1);
  // Identical utilities across follower actions: pure tie-break case.
  for (auto& [label, flat] : inst.follower_utilities[0].tables)
    flat = {0.4, 0.4, 0.4, 0.4, 0.4, 0.4};
  Context z = inst.context_space.contexts[0];
  MixedStrategy x{{0.5, 0.5}};
  CHECK(follower_best_response(inst, 0, z, x) == 2);
}

TEST_CASE("olt instance responses are strategy independent") {
  const GameInstance inst = build_olt_instance();
  Rng rng(3);
  Context z{{0.37}, ""};
  for (int trial = 0; trial < 20; ++trial) {
    const MixedStrategy x = random_strategy(rng, 2);
    CHECK(follower_best_response(inst, 0, z, x) == 0);
    CHECK(follower_best_response(inst, 1, z, x) == 1);
  }
}

TEST_CASE("best response matches brute-force oracle on random instances") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int A = 1 + rng.uniform_int(4);
    const int A_f = 1 + rng.uniform_int(4);
    const int K = 1 + rng.uniform_int(3);
    GameInstance inst = random_instance(rng, A, A_f, K, 2);
    for (int rep = 0; rep < 20; ++rep) {
      const Context& z =
          inst.context_space.contexts[rng.uniform_int(2)];
      const MixedStrategy x = random_strategy(rng, A);
      const int type = rng.uniform_int(K);
      CHECK(follower_best_response(inst, type, z, x) ==
            brute_best_response(inst, type, z, x));
    }
  }
}

TEST_CASE("best response invariant to constant shifts of follower utility") {
  Rng rng(19);
  GameInstance inst = random_instance(rng, 3, 3, 1, 1);
  GameInstance shifted = inst;
  // Add 0.2 to every entry (stays within tabular bounds by construction
  // scaling first).
  for (auto& [label, flat] : inst.follower_utilities[0].tables)
    for (double& v : flat) v *= 0.5;
  shifted = inst;
  for (auto& [label, flat] : shifted.follower_utilities[0].tables)
    for (double& v : flat) v += 0.2;
  const Context z = inst.context_space.contexts[0];
  for (int rep = 0; rep < 50; ++rep) {
    const MixedStrategy x = random_strategy(rng, 3);
    CHECK(follower_best_response(inst, 0, z, x) ==
          follower_best_response(shifted, 0, z, x));
  }
}

TEST_CASE("expected utility is linear in the strategy") {
  Rng rng(23);
  GameInstance inst = random_instance(rng, 4, 3, 1, 1);
  const Context z = inst.context_space.contexts[0];
  for (int rep = 0; rep < 30; ++rep) {
    const MixedStrategy a = random_strategy(rng, 4);
    const MixedStrategy b = random_strategy(rng, 4);
    const double lam = rng.uniform();
    std::vector<double> mix(4);
    for (int i = 0; i < 4; ++i) mix[i] = lam * a[i] + (1 - lam) * b[i];
    const double lhs =
        expected_leader_utility(inst, z, MixedStrategy{mix}, 2);
    const double rhs = lam * expected_leader_utility(inst, z, a, 2) +
                       (1 - lam) * expected_leader_utility(inst, z, b, 2);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("play_round records consistent utilities") {
  const GameInstance inst = build_olt_instance();
  Context z{{0.5}, ""};
  Rng rng(5);
  // Unit mass, deterministic follower: realized == expected.
  RoundRecord rec = play_round(inst, z, unit_mass(0, 2), 0, rng);
  CHECK(rec.realized_utility == doctest::Approx(rec.expected_utility));
  CHECK(rec.realized_utility == doctest::Approx(1.0));
  CHECK(rec.follower_action == 0);
}

TEST_CASE("monte carlo realized utility matches the closed form") {
  Rng rng(31);
  GameInstance inst = random_instance(rng, 3, 2, 2, 1);
  const Context z = inst.context_space.contexts[0];
  const MixedStrategy x = random_strategy(rng, 3);
  const int type = 1;
  const int n = 100000;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    total += play_round(inst, z, x, type, rng).realized_utility;
  const double mean = total / n;
  const double expect = expected_leader_utility(
      inst, z, x, follower_best_response(inst, type, z, x));
  // Hoeffding 3-sigma band for [0,1] variables.
  CHECK(std::abs(mean - expect) < 3.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("instance json round trip") {
  Rng rng(41);
  GameInstance inst = random_instance(rng, 2, 3, 2, 3);
  const std::string text = instance_to_json(inst);
  const GameInstance back = parse_instance(text);
  CHECK(back.num_leader_actions == inst.num_leader_actions);
  CHECK(back.num_follower_actions == inst.num_follower_actions);
  CHECK(back.num_types == inst.num_types);
  for (int i = 0; i < inst.num_types; ++i)
    CHECK(back.follower_utilities[i].tables ==
          inst.follower_utilities[i].tables);
  CHECK(back.context_space.contexts.size() ==
        inst.context_space.contexts.size());
}

TEST_CASE("context-free detection") {
  const GameInstance olt = build_olt_instance();
  CHECK(follower_utilities_context_free(olt));
  Rng rng(43);
  GameInstance varied = random_instance(rng, 2, 2, 1, 2);
  CHECK_FALSE(follower_utilities_context_free(varied));
}
