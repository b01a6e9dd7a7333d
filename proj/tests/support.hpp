#pragma once

#include <string>
#include <vector>

#include "csg/game.hpp"
#include "csg/rng.hpp"

namespace csg::testing {

inline UtilityModel random_tabular(Rng& rng, int A, int A_f,
                                   const std::vector<std::string>& labels) {
  UtilityModel m;
  m.kind = UtilityKind::Tabular;
  for (const auto& label : labels) {
    std::vector<double> flat(static_cast<std::size_t>(A) * A_f);
    for (double& v : flat) v = rng.uniform();
    m.tables[label] = std::move(flat);
  }
  return m;
}

// Random tabular instance over `num_labels` finite contexts; pass
// num_labels = 0 for a single context-free "*" table per utility.
inline GameInstance random_instance(Rng& rng, int A, int A_f, int K,
                                    int num_labels) {
  std::vector<std::string> labels;
  if (num_labels == 0) {
    labels.push_back("*");
  } else {
    for (int j = 0; j < num_labels; ++j) labels.push_back("c" + std::to_string(j));
  }
  GameInstance inst;
  inst.num_leader_actions = A;
  inst.num_follower_actions = A_f;
  inst.num_types = K;
  inst.leader_utility = random_tabular(rng, A, A_f, labels);
  for (int i = 0; i < K; ++i) {
    inst.type_names.push_back("t" + std::to_string(i));
    inst.follower_utilities.push_back(random_tabular(rng, A, A_f, labels));
  }
  inst.context_space.kind = ContextSpace::Kind::Finite;
  const int n_ctx = num_labels == 0 ? 1 : num_labels;
  for (int j = 0; j < n_ctx; ++j) {
    Context z;
    z.label = num_labels == 0 ? "" : labels[j];
    z.vec = {static_cast<double>(j)};
    inst.context_space.contexts.push_back(std::move(z));
  }
  return inst;
}

inline MixedStrategy random_strategy(Rng& rng, int A) {
  std::vector<double> p(A);
  double total = 0.0;
  for (double& v : p) {
    v = -std::log(1.0 - rng.uniform());
    total += v;
  }
  for (double& v : p) v /= total;
  return MixedStrategy{std::move(p)};
}

// Independent brute-force best response: full scan with the explicit
// tie-toward-higher-index rule.
inline int brute_best_response(const GameInstance& inst, int type_idx,
                               const Context& z, const MixedStrategy& x) {
  const auto& uf = inst.follower_utilities[type_idx];
  std::vector<double> eu(inst.num_follower_actions, 0.0);
  for (int a_f = 0; a_f < inst.num_follower_actions; ++a_f)
    for (int a_l = 0; a_l < inst.num_leader_actions; ++a_l)
      eu[a_f] += x[a_l] * eval_utility(uf, inst, z, a_l, a_f);
  double best = eu[0];
  for (double v : eu) best = std::max(best, v);
  int pick = 0;
  for (int a_f = 0; a_f < inst.num_follower_actions; ++a_f)
    if (eu[a_f] >= best - 1e-9) pick = a_f;
  return pick;
}

// All points of the A-simplex with coordinates on a 1/steps grid.
inline std::vector<MixedStrategy> simplex_grid(int A, int steps) {
  std::vector<MixedStrategy> out;
  std::vector<int> c(A, 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == A - 1) {
      c[pos] = remaining;
      std::vector<double> p(A);
      for (int i = 0; i < A; ++i) p[i] = static_cast<double>(c[i]) / steps;
      out.push_back(MixedStrategy{std::move(p)});
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      c[pos] = k;
      self(self, pos + 1, remaining - k);
    }
  };
  rec(rec, 0, steps);
  return out;
}

}  // namespace csg::testing
