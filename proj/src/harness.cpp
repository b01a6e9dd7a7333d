#include "csg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace csg {

namespace {

constexpr std::uint64_t kEnvSeedSalt = 0x8f14a3c59d1b27e5ULL;
constexpr std::uint64_t kPlaySeedSalt = 0x2545f4914f6cdd1dULL;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct BenchmarkEntry {
  MixedStrategy x;
  std::vector<double> type_utility;  // utility of x against each type
};

std::map<std::string, BenchmarkEntry> benchmark_internal(
    const GameInstance& inst, const std::vector<Context>& contexts,
    const std::vector<int>& types, double delta) {
  if (contexts.size() != types.size())
    throw std::invalid_argument("benchmark: contexts/types length mismatch");
  std::map<std::string, std::vector<std::size_t>> groups;
  std::map<std::string, Context> reps;
  for (std::size_t t = 0; t < contexts.size(); ++t) {
    const std::string key = context_key(contexts[t]);
    groups[key].push_back(t);
    reps.emplace(key, contexts[t]);
  }
  std::map<std::string, BenchmarkEntry> out;
  for (const auto& [key, rounds] : groups) {
    const Context& z = reps.at(key);
    const ExtremePointSet E = approx_extreme_points(inst, z, delta);
    if (E.points.empty())
      throw std::runtime_error("benchmark: empty extreme point set");
    int best = 0;
    double best_total = -1.0;
    std::vector<double> best_tu;
    for (std::size_t p = 0; p < E.points.size(); ++p) {
      std::vector<double> tu(inst.num_types);
      for (int i = 0; i < inst.num_types; ++i)
        tu[i] = expected_leader_utility(inst, z, E.points[p].x,
                                        E.points[p].sigma[i]);
      double total = 0.0;
      for (std::size_t t : rounds) total += tu[types[t]];
      if (total > best_total) {
        best_total = total;
        best = static_cast<int>(p);
        best_tu = std::move(tu);
      }
    }
    out.emplace(key, BenchmarkEntry{E.points[best].x, std::move(best_tu)});
  }
  return out;
}

int thread_budget() {
  if (const char* env = std::getenv("CSG_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

Transcript run_episode(const GameInstance& inst, Environment& env,
                       Learner& learner, int T, std::uint64_t seed) {
  Transcript tr;
  tr.seed = seed;
  tr.records.reserve(T);
  Rng rng(seed ^ kPlaySeedSalt);
  for (int t = 0; t < T; ++t) {
    const Context z = env.next_context(tr.records);
    int type = -1;
    if (!env.follower_after_commit()) type = env.next_follower(tr.records);
    const MixedStrategy x = learner.step(z);
    if (env.follower_after_commit())
      type = env.next_follower_committed(tr.records, z, x);
    RoundRecord rec = play_round(inst, z, x, type, rng);
    rec.t = t;
    if (learner.bandit_feedback())
      learner.observe_bandit(z, x, rec.follower_action);
    else
      learner.observe_full(z, x, type);
    tr.records.push_back(std::move(rec));
  }
  return tr;
}

std::map<std::string, MixedStrategy> benchmark_policy(
    const GameInstance& inst, const std::vector<Context>& contexts,
    const std::vector<int>& types, double delta) {
  std::map<std::string, MixedStrategy> out;
  for (auto& [key, entry] : benchmark_internal(inst, contexts, types, delta))
    out.emplace(key, entry.x);
  return out;
}

RegretReport compute_regret(const GameInstance& inst,
                            const Transcript& transcript, double delta) {
  const std::size_t T = transcript.records.size();
  std::vector<Context> contexts(T);
  std::vector<int> types(T);
  for (std::size_t t = 0; t < T; ++t) {
    contexts[t] = transcript.records[t].context;
    types[t] = transcript.records[t].follower_type;
  }
  const auto bench = benchmark_internal(inst, contexts, types, delta);
  RegretReport rep;
  rep.alg = transcript.alg;
  rep.seed = transcript.seed;
  rep.cumulative_regret.resize(T);
  rep.benchmark_utility.resize(T);
  rep.learner_utility.resize(T);
  double cum_bench = 0.0, cum_learn = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& entry = bench.at(context_key(contexts[t]));
    cum_bench += entry.type_utility[types[t]];
    cum_learn += transcript.records[t].expected_utility;
    rep.benchmark_utility[t] = cum_bench;
    rep.learner_utility[t] = cum_learn;
    rep.cumulative_regret[t] = cum_bench - cum_learn;
  }
  return rep;
}

AggregateReport aggregate_reports(const std::vector<RegretReport>& reports) {
  if (reports.empty())
    throw std::invalid_argument("aggregate_reports: no reports");
  const std::size_t T = reports.front().cumulative_regret.size();
  for (const auto& r : reports)
    if (r.cumulative_regret.size() != T)
      throw std::invalid_argument("aggregate_reports: mismatched horizons");
  AggregateReport agg;
  agg.num_seeds = static_cast<int>(reports.size());
  agg.mean_regret.resize(T);
  agg.std_regret.resize(T);
  agg.mean_avg_regret.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    double mean = 0.0;
    for (const auto& r : reports) mean += r.cumulative_regret[t];
    mean /= agg.num_seeds;
    double var = 0.0;
    for (const auto& r : reports) {
      const double d = r.cumulative_regret[t] - mean;
      var += d * d;
    }
    var /= agg.num_seeds;
    agg.mean_regret[t] = mean;
    agg.std_regret[t] = std::sqrt(var);
    agg.mean_avg_regret[t] = mean / static_cast<double>(t + 1);
  }
  return agg;
}

std::pair<double, double> fit_regret_exponent(const std::vector<double>& Ts,
                                              const std::vector<double>& Rs) {
  if (Ts.size() != Rs.size() || Ts.size() < 2)
    throw std::invalid_argument("fit_regret_exponent: need >= 2 points");
  const std::size_t n = Ts.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::log(Ts[i]);
    ys[i] = std::log(std::max(Rs[i], 1e-6));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - my - slope * (xs[i] - mx);
    ssr += e * e;
  }
  const double se = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return {slope, se};
}

RunResult run_experiment(const RunConfig& cfg) {
  if (cfg.T < 1) throw std::runtime_error("invalid config: T must be >= 1");
  if (cfg.num_seeds < 1)
    throw std::runtime_error("invalid config: seeds must be >= 1");
  GameInstance local;
  const GameInstance* inst = &cfg.instance;
  if (!cfg.instance_loaded) {
    if (cfg.instance_path.empty())
      throw std::runtime_error("invalid config: instance missing");
    local = load_instance(cfg.instance_path);
    inst = &local;
  }
  const bool bandit = cfg.alg.rfind("bandit-", 0) == 0;

  std::vector<Transcript> transcripts(cfg.num_seeds);
  std::vector<RegretReport> reports(cfg.num_seeds);
  std::vector<std::string> errors(cfg.num_seeds);
  const double delta = cfg.delta > 0.0 ? cfg.delta : default_delta(cfg.T);

  auto run_seed = [&](int i) {
    try {
      const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(i);
      auto env = make_scenario(cfg.scenario, *inst, cfg.T, seed ^ kEnvSeedSalt,
                               bandit);
      LearnerConfig lc;
      lc.alg = cfg.alg;
      lc.T = cfg.T;
      lc.delta = delta;
      lc.eta = cfg.eta;
      lc.M = cfg.M;
      lc.N = cfg.N;
      lc.Z = cfg.Z;
      lc.seed = seed;
      auto learner = make_learner(*inst, lc);
      Transcript tr = run_episode(*inst, *env, *learner, cfg.T, seed);
      tr.instance_ref = cfg.instance_path;
      tr.scenario = cfg.scenario;
      tr.alg = cfg.alg;
      reports[i] = compute_regret(*inst, tr, delta);
      transcripts[i] = std::move(tr);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  const int workers = std::min(thread_budget(), cfg.num_seeds);
  if (workers <= 1) {
    for (int i = 0; i < cfg.num_seeds; ++i) run_seed(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < cfg.num_seeds; i += workers) run_seed(i);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors)
    if (!err.empty()) throw std::runtime_error(err);

  RunResult result;
  result.T = cfg.T;
  result.aggregate = aggregate_reports(reports);
  result.reports = std::move(reports);

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    for (int i = 0; i < cfg.num_seeds; ++i) {
      const auto& tr = transcripts[i];
      std::ofstream out(fs::path(cfg.out_dir) /
                        ("transcript_seed" + std::to_string(i) + ".csv"));
      out << "t,context,follower_type,follower_action,leader_action,"
             "expected_utility,realized_utility,cumulative_regret\n";
      for (std::size_t t = 0; t < tr.records.size(); ++t) {
        const auto& rec = tr.records[t];
        std::string ctx = rec.context.label;
        if (ctx.empty() && !rec.context.vec.empty())
          ctx = fmt_double(rec.context.vec[0]);
        out << rec.t << ',' << ctx << ',' << rec.follower_type << ','
            << rec.follower_action << ',' << rec.leader_action << ','
            << fmt_double(rec.expected_utility) << ','
            << fmt_double(rec.realized_utility) << ','
            << fmt_double(result.reports[i].cumulative_regret[t]) << '\n';
      }
    }
    std::ofstream agg(fs::path(cfg.out_dir) / "aggregate.csv");
    agg << "t,mean_regret,std_regret,mean_avg_regret\n";
    for (std::size_t t = 0; t < result.aggregate.mean_regret.size(); ++t)
      agg << (t + 1) << ',' << fmt_double(result.aggregate.mean_regret[t])
          << ',' << fmt_double(result.aggregate.std_regret[t]) << ','
          << fmt_double(result.aggregate.mean_avg_regret[t]) << '\n';
    nlohmann::json meta;
    meta["instance"] = cfg.instance_path;
    meta["scenario"] = cfg.scenario;
    meta["alg"] = cfg.alg;
    meta["T"] = cfg.T;
    meta["seeds"] = cfg.num_seeds;
    meta["base_seed"] = cfg.base_seed;
    meta["delta"] = delta;
    if (cfg.eta) meta["eta"] = *cfg.eta;
    if (cfg.M) meta["M"] = *cfg.M;
    if (cfg.N) meta["N"] = *cfg.N;
    if (cfg.Z) meta["Z"] = *cfg.Z;
    std::ofstream(fs::path(cfg.out_dir) / "meta.json") << meta.dump(2) << '\n';
  }
  return result;
}

SweepResult run_sweep(RunConfig base, const std::vector<int>& Ts) {
  SweepResult sweep;
  const std::string out_root = base.out_dir;
  for (int T : Ts) {
    RunConfig cfg = base;
    cfg.T = T;
    if (!out_root.empty())
      cfg.out_dir = (std::filesystem::path(out_root) /
                     ("T" + std::to_string(T)))
                        .string();
    const RunResult res = run_experiment(cfg);
    sweep.Ts.push_back(T);
    sweep.final_regret.push_back(res.aggregate.mean_regret.back());
  }
  const auto [slope, se] = fit_regret_exponent(sweep.Ts, sweep.final_regret);
  sweep.slope = slope;
  sweep.slope_stderr = se;
  if (!out_root.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_root);
    std::ofstream csv(fs::path(out_root) / "summary.csv");
    csv << "T,mean_final_regret\n";
    for (std::size_t i = 0; i < sweep.Ts.size(); ++i)
      csv << static_cast<long long>(sweep.Ts[i]) << ','
          << fmt_double(sweep.final_regret[i]) << '\n';
    nlohmann::json j;
    j["T"] = sweep.Ts;
    j["mean_final_regret"] = sweep.final_regret;
    j["slope"] = sweep.slope;
    j["slope_stderr"] = sweep.slope_stderr;
    std::ofstream(fs::path(out_root) / "summary.json") << j.dump(2) << '\n';
  }
  return sweep;
}

}  // namespace csg
