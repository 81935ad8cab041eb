#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "edgelb/profiles.hpp"

namespace edgelb {

// Position of a node in NodeRegistry order.
using NodeIndex = std::size_t;

// Requests currently at each node (in service + waiting), aligned with
// registry order. q = 0 means the node is idle.
class QueueSnapshot {
 public:
  QueueSnapshot() = default;
  explicit QueueSnapshot(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {}
  static QueueSnapshot idle(std::size_t num_nodes) { return QueueSnapshot(std::vector<std::uint32_t>(num_nodes, 0)); }

  std::uint32_t operator[](NodeIndex i) const { return counts_[i]; }
  std::size_t size() const { return counts_.size(); }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  bool operator==(const QueueSnapshot&) const = default;

 private:
  std::vector<std::uint32_t> counts_;
};

struct MoParams {
  double gamma = 0.5;      // latency weight in [0, 1]; 1 - gamma goes to energy
  double delta_map = 0.1;  // tolerated mAP loss relative to the best pair, >= 0

  // Throws InvalidArgument when out of range.
  void validate() const;
};

struct CandidateScore {
  NodeIndex node = 0;
  NodeId node_id;
  double expected_latency_ms = 0.0;
  double latency_norm = 0.0;
  double energy_norm = 0.0;
  double score = 0.0;
};

struct Decision {
  NodeIndex node = 0;
  NodeId node_id;
  PairId pair_id;
  // Filled by the multi-objective policy only.
  std::vector<PairId> feasible_set;
  std::vector<CandidateScore> per_candidate;
  bool tiebreak_applied = false;
};

// Candidate set C_g(delta): pairs whose mAP for g reaches the threshold.
// Returned as pair indices in table order; never empty.
std::vector<std::size_t> feasible_pairs(const ProfileTable& table, Group g, double delta);

// Same, with the maximum taken only over pairs flagged in `deployed`
// (pairs that no node hosts cannot be selected). At least one flag must be set.
std::vector<std::size_t> feasible_pairs(const ProfileTable& table, Group g, double delta,
                                        const std::vector<bool>& deployed);

// Queue-aware delay estimate t * (1 + q).
constexpr double expected_latency(double t_ms, std::uint32_t q) { return t_ms * (1.0 + static_cast<double>(q)); }

// Min-max normalization over the candidate set. A zero-range input maps to all zeros.
std::vector<double> min_max_normalize(std::span<const double> values);

// Weighted-sum scalarization gamma * l + (1 - gamma) * e.
constexpr double score(double l_norm, double e_norm, double gamma) {
  return gamma * l_norm + (1.0 - gamma) * e_norm;
}

// Two-stage selection: accuracy filter, then argmin of the weighted score over
// every node hosting a feasible pair. Ties on the score go to lower energy,
// then lower profiled time, then registry order.
Decision select_mo(const ProfileTable& table, const NodeRegistry& registry, const QueueSnapshot& snapshot, Group g,
                   const MoParams& params);

struct RrState {
  std::uint64_t counter = 0;
};

std::pair<NodeIndex, RrState> select_rr(const NodeRegistry& registry, RrState state);
NodeIndex select_rnd(const NodeRegistry& registry, std::mt19937_64& rng);
NodeIndex select_lc(const NodeRegistry& registry, const QueueSnapshot& snapshot);
NodeIndex select_le(const ProfileTable& table, const NodeRegistry& registry, Group g);
NodeIndex select_lt(const ProfileTable& table, const NodeRegistry& registry, const QueueSnapshot& snapshot, Group g);
NodeIndex select_ha(const ProfileTable& table, const NodeRegistry& registry, Group g);

namespace policies {
struct MultiObjective {
  MoParams params;
  bool operator==(const MultiObjective& o) const {
    return params.gamma == o.params.gamma && params.delta_map == o.params.delta_map;
  }
};
struct RoundRobin {
  bool operator==(const RoundRobin&) const = default;
};
struct Random {
  std::uint64_t seed = 0;
  bool operator==(const Random&) const = default;
};
struct LeastConnection {
  bool operator==(const LeastConnection&) const = default;
};
struct LowestEnergy {
  bool operator==(const LowestEnergy&) const = default;
};
struct LowestTime {
  bool operator==(const LowestTime&) const = default;
};
struct HighestAccuracy {
  bool operator==(const HighestAccuracy&) const = default;
};
}  // namespace policies

using PolicyKind = std::variant<policies::MultiObjective, policies::RoundRobin, policies::Random,
                                policies::LeastConnection, policies::LowestEnergy, policies::LowestTime,
                                policies::HighestAccuracy>;

// Short name used in outputs: RR, RND, LC, LE, LT, HA, or MO_gamma_<100*gamma>
// (with gamma = 1 written as MO_gamma_1).
std::string policy_label(const PolicyKind& policy);

// Owns the explicit per-run policy state (RR counter, RND generator) and
// routes a request to the selected policy.
class Dispatcher {
 public:
  // `run_seed` is mixed into the RND policy's own seed so repeats differ.
  Dispatcher(PolicyKind policy, std::uint64_t run_seed = 0);

  Decision dispatch(const ProfileTable& table, const NodeRegistry& registry, const QueueSnapshot& snapshot, Group g);

  const PolicyKind& policy() const { return policy_; }

 private:
  PolicyKind policy_;
  RrState rr_;
  std::mt19937_64 rnd_;
};

}  // namespace edgelb
