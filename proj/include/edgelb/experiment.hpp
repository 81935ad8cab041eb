#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgelb/metrics.hpp"
#include "edgelb/policy.hpp"
#include "edgelb/simulator.hpp"

namespace edgelb {

struct PolicySpec {
  PolicyKind kind;
  std::string label;
};

PolicySpec make_policy_spec(PolicyKind kind);

// Parses RR, RND, LC, LE, LT, HA, MO or MO_gamma_<n>. MO entries take
// `mo_defaults` for whatever the name does not fix.
PolicySpec parse_policy_name(std::string_view name, const MoParams& mo_defaults);

struct ExperimentConfig {
  SimConfig base;  // base.params.policy and clients.num_users are set per grid cell
  std::vector<std::uint32_t> users = kDefaultUserSweep;
  std::vector<PolicySpec> policies;
  std::uint32_t repeats = 3;
  std::filesystem::path output_dir = "out";

  // Throws ConfigError.
  void validate() const;
};

// Relative file references resolve against `base_dir`.
ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
// Fully resolved config, as written to config-echo.json.
std::string experiment_config_json(const ExperimentConfig& cfg);

// Flags that override config fields (flags win).
struct RunOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::uint32_t>> users;
  std::optional<std::uint32_t> repeats;
  std::optional<std::vector<std::string>> policies;
  bool decision_log = false;
  bool aggregate = false;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

void apply_overrides(ExperimentConfig& cfg, const RunOverrides& overrides);

// Per-cell seed: mix64 chain over (base, fnv1a64(label), users, repeat).
std::uint64_t cell_seed(std::uint64_t base_seed, std::string_view label, std::uint32_t users, std::uint32_t repeat);

struct GridCell {
  PolicySpec policy;
  std::uint32_t users = 0;
  std::uint32_t repeat = 0;
  std::uint64_t seed = 0;
};

// Grid order: policy, then users, then repeat.
std::vector<GridCell> expand_grid(const ExperimentConfig& cfg);

struct CellOutcome {
  GridCell cell;
  MetricsSummary summary;
  std::vector<double> latencies;
  std::optional<SimResult> result;  // kept only when decision logs are requested
};

// Runs every cell (possibly in parallel); outcomes come back in grid order.
std::vector<CellOutcome> run_grid(const ExperimentConfig& cfg, bool keep_results, unsigned jobs);

// Replaces the configured policies with MO at gamma in {0, .25, .5, .75, 1},
// keeping the first configured MO entry's delta_map. Throws ConfigError if
// the config has no MO policy.
std::vector<PolicySpec> gamma_sweep_policies(const ExperimentConfig& cfg);

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 1;
inline constexpr int kRuntime = 2;
}  // namespace exit_code

int cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err);
int cmd_gamma_sweep(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& out,
                    std::ostream& err);
int cmd_validate(const std::filesystem::path& profiles_path, const std::filesystem::path& nodes_path,
                 std::ostream& out, std::ostream& err);

}  // namespace edgelb
