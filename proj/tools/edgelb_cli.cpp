// edgelb: experiment runner for the edge load-balancing simulator.
//
//   edgelb run         --config exp.json [--out DIR] [--seed N] [--users 1,3,5] [--repeats N]
//                      [--policy MO,LT,HA] [--decision-log] [--aggregate] [--jobs N]
//   edgelb gamma-sweep --config exp.json [same flags]
//   edgelb validate    --profiles p.json --nodes n.json | --config exp.json

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgelb/errors.hpp"
#include "edgelb/experiment.hpp"

namespace {

void add_grid_flags(CLI::App* cmd, std::string& config, edgelb::RunOverrides& ov, std::string& out,
                    std::uint64_t& seed, std::vector<std::uint32_t>& users, std::uint32_t& repeats,
                    std::vector<std::string>& policies) {
  cmd->add_option("--config", config, "Experiment config (JSON)")->required();
  cmd->add_option("--out", out, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", seed, "Base seed");
  cmd->add_option("--users", users, "Comma-separated concurrency levels")->delimiter(',');
  cmd->add_option("--repeats", repeats, "Runs per grid point");
  cmd->add_option("--policy", policies, "Comma-separated policies: RR,RND,LC,LE,LT,HA,MO,MO_gamma_<n>")
      ->delimiter(',');
  cmd->add_flag("--decision-log", ov.decision_log, "Write decisions/*.jsonl per grid cell");
  cmd->add_flag("--aggregate", ov.aggregate, "Write aggregate.csv (mean, stddev, min, max over repeats)");
  cmd->add_option("--jobs", ov.jobs, "Parallel simulations (0 = hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective edge load balancer: simulator and experiment runner"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> users;
  std::uint32_t repeats = 0;
  std::vector<std::string> policies;
  edgelb::RunOverrides ov;

  auto* run = app.add_subcommand("run", "Run policies x users x repeats and write CSV outputs");
  add_grid_flags(run, config, ov, out, seed, users, repeats, policies);
  auto* sweep = app.add_subcommand("gamma-sweep", "Run the MO policy at gamma in {0, .25, .5, .75, 1}");
  add_grid_flags(sweep, config, ov, out, seed, users, repeats, policies);

  std::string profiles;
  std::string nodes;
  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Validate profile and node files and print a summary");
  validate->add_option("--profiles", profiles, "Profile table (JSON)");
  validate->add_option("--nodes", nodes, "Node registry (JSON)");
  validate->add_option("--config", validate_config, "Take both paths from an experiment config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : edgelb::exit_code::kConfig;
  }

  auto collect = [&](CLI::App* cmd) {
    if (cmd->count("--out") > 0) ov.out = out;
    if (cmd->count("--seed") > 0) ov.seed = seed;
    if (cmd->count("--users") > 0) ov.users = users;
    if (cmd->count("--repeats") > 0) ov.repeats = repeats;
    if (cmd->count("--policy") > 0) ov.policies = policies;
  };

  if (run->parsed()) {
    collect(run);
    return edgelb::cmd_run(config, ov, std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    collect(sweep);
    return edgelb::cmd_gamma_sweep(config, ov, std::cout, std::cerr);
  }

  if (!validate_config.empty()) {
    try {
      const auto cfg = edgelb::load_experiment_config(validate_config);
      if (profiles.empty()) profiles = cfg.base.profiles.string();
      if (nodes.empty()) nodes = cfg.base.nodes.string();
    } catch (const edgelb::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return edgelb::exit_code::kConfig;
    }
  }
  if (profiles.empty() || nodes.empty()) {
    std::cerr << "error: validate needs --profiles and --nodes (or --config)\n";
    return edgelb::exit_code::kConfig;
  }
  return edgelb::cmd_validate(profiles, nodes, std::cout, std::cerr);
}
