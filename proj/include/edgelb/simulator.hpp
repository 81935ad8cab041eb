#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "edgelb/policy.hpp"
#include "edgelb/profiles.hpp"
#include "edgelb/workload.hpp"

namespace edgelb {

// Run parameters that do not involve files.
struct SimParams {
  PolicyKind policy = policies::MultiObjective{};
  ClientConfig clients{1, 0.0, 100, std::nullopt};
  double gateway_overhead_ms = 0.0;
  double service_jitter_sigma = 0.0;  // lognormal sigma, mean-preserving
  double miscount_prob = 0.0;
  // Count assumed for a stream's first frame; unset means the frame's own
  // true count (a warm-up detection).
  std::optional<std::uint32_t> first_frame_count;
  std::uint64_t seed = 1;
  double snapshot_staleness_ms = 0.0;
  // Keep the full policy decision per request (needed for decision logs).
  bool record_audit = false;

  // Throws InvalidArgument.
  void validate() const;
};

using TraceSource = std::variant<std::filesystem::path, TraceGenConfig>;

struct SimConfig {
  SimParams params;
  std::filesystem::path profiles;
  std::filesystem::path nodes;
  TraceSource trace = TraceGenConfig{};
};

struct RequestRecord {
  std::uint64_t request_id = 0;
  std::uint32_t client_id = 0;
  double dispatch_time = 0.0;
  double completion_time = 0.0;
  Group true_group;
  Group estimated_group;
  NodeId node_id;
  PairId pair_id;
  std::uint32_t queue_len_at_decision = 0;  // as seen by the policy
  double service_ms = 0.0;
  double latency_ms = 0.0;
  double energy_mwh_charged = 0.0;
  double map_credited = 0.0;
};

// Single-server FIFO queue of one edge node plus its accounting.
struct NodeState {
  NodeId node_id;
  PairId pair_id;
  std::size_t pair_index = 0;
  std::deque<std::uint64_t> fifo;  // front is in service
  double busy_until = 0.0;
  double cumulative_busy_ms = 0.0;
  double cumulative_energy_mwh = 0.0;
  std::uint64_t completed_count = 0;
  // (time, count after the change); only kept when snapshots may be stale.
  std::vector<std::pair<double, std::uint32_t>> history;
  bool track_history = false;

  std::uint32_t queue_length() const { return static_cast<std::uint32_t>(fifo.size()); }
  // Count after every change with time <= t; 0 for t <= 0.
  std::uint32_t queue_length_at(double t) const;
  void note_change(double now);
};

struct NodeSummary {
  NodeId node_id;
  PairId pair_id;
  double busy_ms = 0.0;
  double energy_mwh = 0.0;
  std::uint64_t completed = 0;
};

struct SimResult {
  std::vector<RequestRecord> records;  // request_id order
  std::vector<NodeSummary> nodes;      // registry order
  double duration_ms = 0.0;            // simulated time of the last completion
  std::uint64_t issued = 0;
  std::uint32_t max_in_flight = 0;
  std::vector<Decision> audits;  // parallel to records when record_audit is set
};

QueueSnapshot snapshot_queues(std::span<const NodeState> nodes, double now, double staleness_ms);

// t * exp(sigma * Z - sigma^2 / 2); sigma = 0 returns t without drawing.
double sample_service_time(double t_ms, double sigma, std::mt19937_64& rng);

struct DecisionEvent {
  double time = 0.0;
  std::uint64_t request_id = 0;
  Group true_group;
  Group estimated_group;
  const QueueSnapshot& snapshot;
  const Decision& decision;
};
using DecisionObserver = std::function<void(const DecisionEvent&)>;

// Closed-loop discrete-event run on already loaded inputs. Deterministic for a
// fixed SimParams::seed.
SimResult simulate(const ProfileTable& table, const NodeRegistry& registry, const FrameTrace& trace,
                   const SimParams& params, const DecisionObserver& observer = {});

// Loads the referenced files and runs. Input failures surface as ConfigError.
SimResult run_sim(const SimConfig& cfg);

FrameTrace resolve_trace(const TraceSource& source);

std::string serialize_result(const SimResult& result);
// One JSON object (no trailing newline) with the record fields, plus the
// feasible set and candidate scores when `audit` carries them.
std::string decision_log_line(const RequestRecord& record, const Decision* audit);

}  // namespace edgelb
