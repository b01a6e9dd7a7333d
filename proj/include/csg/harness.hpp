#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csg/environments.hpp"
#include "csg/game.hpp"
#include "csg/learners.hpp"

namespace csg {

struct Transcript {
  std::vector<RoundRecord> records;
  std::string instance_ref;
  std::string scenario;
  std::string alg;
  std::uint64_t seed = 0;
};

struct RegretReport {
  std::vector<double> cumulative_regret;
  std::vector<double> benchmark_utility;  // cumulative
  std::vector<double> learner_utility;    // cumulative
  double benchmark_slack_bound = 1.0;     // E-restriction undershoot bound
  std::string alg;
  std::uint64_t seed = 0;
};

struct AggregateReport {
  std::vector<double> mean_regret;
  std::vector<double> std_regret;
  std::vector<double> mean_avg_regret;
  int num_seeds = 0;
};

// One full episode: environment emits (context, type), learner commits,
// feedback routed per the learner's declared mode.
Transcript run_episode(const GameInstance& inst, Environment& env,
                       Learner& learner, int T, std::uint64_t seed);

// Optimal-in-hindsight strategy per distinct context, restricted to the
// delta-approximate extreme points.
std::map<std::string, MixedStrategy> benchmark_policy(
    const GameInstance& inst, const std::vector<Context>& contexts,
    const std::vector<int>& types, double delta);

RegretReport compute_regret(const GameInstance& inst,
                            const Transcript& transcript, double delta);

AggregateReport aggregate_reports(const std::vector<RegretReport>& reports);

// Least-squares slope of log R vs log T; nonpositive R floored at 1e-6.
// Returns {slope, standard error}.
std::pair<double, double> fit_regret_exponent(const std::vector<double>& Ts,
                                              const std::vector<double>& Rs);

struct RunConfig {
  std::string instance_path;  // empty = use `instance` directly
  GameInstance instance;
  bool instance_loaded = false;
  std::string scenario;
  std::string alg;
  int T = 0;
  int num_seeds = 1;
  std::uint64_t base_seed = 1;
  double delta = 0.0;  // 0 = default
  std::optional<double> eta;
  std::optional<int> M, N, Z;
  std::string out_dir;  // empty = no files
};

struct RunResult {
  AggregateReport aggregate;
  std::vector<RegretReport> reports;
  int T = 0;
};

// Runs all seeds (in parallel when CSG_THREADS allows), optionally writing
// per-seed transcript CSVs, aggregate.csv, and meta.json into out_dir.
RunResult run_experiment(const RunConfig& cfg);

struct SweepResult {
  std::vector<double> Ts;
  std::vector<double> final_regret;  // mean R(T) at each horizon
  double slope = 0.0;
  double slope_stderr = 0.0;
};

SweepResult run_sweep(RunConfig base, const std::vector<int>& Ts);

}  // namespace csg
