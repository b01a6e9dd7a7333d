#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "csg/geometry.hpp"
#include "csg/harness.hpp"
#include "json.hpp"

namespace {

int cmd_run(const csg::RunConfig& cfg) {
  const csg::RunResult res = csg::run_experiment(cfg);
  std::printf("T=%d seeds=%d final mean regret %.6f (avg %.6f)\n", cfg.T,
              cfg.num_seeds, res.aggregate.mean_regret.back(),
              res.aggregate.mean_avg_regret.back());
  return 0;
}

int cmd_sweep(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + config_path);
  nlohmann::json j = nlohmann::json::parse(in);
  csg::RunConfig cfg;
  cfg.instance_path = j.at("instance").get<std::string>();
  cfg.scenario = j.at("scenario").get<std::string>();
  cfg.alg = j.at("alg").get<std::string>();
  cfg.num_seeds = j.value("seeds", 1);
  cfg.base_seed = j.value("base_seed", 1);
  cfg.delta = j.value("delta", 0.0);
  if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
  if (j.contains("M")) cfg.M = j["M"].get<int>();
  if (j.contains("N")) cfg.N = j["N"].get<int>();
  if (j.contains("Z")) cfg.Z = j["Z"].get<int>();
  cfg.out_dir = j.value("out", "");
  const auto Ts = j.at("T").get<std::vector<int>>();
  const csg::SweepResult sweep = csg::run_sweep(cfg, Ts);
  for (std::size_t i = 0; i < sweep.Ts.size(); ++i)
    std::printf("T=%d mean final regret %.6f\n",
                static_cast<int>(sweep.Ts[i]), sweep.final_regret[i]);
  std::printf("log-log slope %.4f (stderr %.4f)\n", sweep.slope,
              sweep.slope_stderr);
  return 0;
}

int cmd_regions(const std::string& instance_path, const std::string& label,
                double delta) {
  const csg::GameInstance inst = csg::load_instance(instance_path);
  csg::Context z;
  bool found = false;
  if (inst.context_space.kind == csg::ContextSpace::Kind::Finite) {
    for (const auto& c : inst.context_space.contexts)
      if (c.label == label) {
        z = c;
        found = true;
        break;
      }
  }
  if (!found) throw std::runtime_error("unknown context label: " + label);
  std::cout << csg::region_report(inst, z, delta > 0 ? delta : 1e-3);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online Stackelberg learning with side information"};
  app.require_subcommand(1);

  csg::RunConfig cfg;
  auto* run = app.add_subcommand("run", "Run one experiment configuration");
  run->add_option("--instance", cfg.instance_path, "Instance JSON file")
      ->required();
  run->add_option("--scenario", cfg.scenario, "Scenario preset name")
      ->required();
  run->add_option("--alg", cfg.alg, "Learner name")->required();
  run->add_option("--T", cfg.T, "Horizon")->required();
  run->add_option("--seeds", cfg.num_seeds, "Number of seeds");
  run->add_option("--seed", cfg.base_seed, "Base seed");
  run->add_option("--delta", cfg.delta, "Extreme point tolerance");
  double eta = 0.0;
  auto* eta_opt = run->add_option("--eta", eta, "Hedge learning rate");
  int M = 0, N = 0, Z = 0;
  auto* m_opt = run->add_option("--M", M, "Weight grid resolution");
  auto* n_opt = run->add_option("--N", N, "Explore rounds per spanner element");
  auto* z_opt = run->add_option("--Z", Z, "Block count");
  run->add_option("--out", cfg.out_dir, "Output directory");

  std::string sweep_config;
  auto* sweep = app.add_subcommand("sweep", "Horizon scaling study");
  sweep->add_option("--config", sweep_config, "Sweep config JSON")->required();

  std::string regions_instance, regions_label;
  double regions_delta = 0.0;
  auto* regions = app.add_subcommand("regions", "Dump region geometry report");
  regions->add_option("--instance", regions_instance, "Instance JSON file")
      ->required();
  regions->add_option("--context", regions_label, "Context label")->required();
  regions->add_option("--delta", regions_delta, "Extreme point tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (*eta_opt) cfg.eta = eta;
      if (*m_opt) cfg.M = M;
      if (*n_opt) cfg.N = N;
      if (*z_opt) cfg.Z = Z;
      return cmd_run(cfg);
    }
    if (sweep->parsed()) return cmd_sweep(sweep_config);
    if (regions->parsed())
      return cmd_regions(regions_instance, regions_label, regions_delta);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
