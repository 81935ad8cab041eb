#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace edgelb {

inline constexpr int kNumGroups = 5;

// Object-count bucket of a frame: 0, 1, 2, 3 objects, or 4+ (index 4).
class Group {
 public:
  constexpr Group() = default;
  // Throws InvalidArgument outside [0, 4].
  explicit Group(int index);

  constexpr int index() const { return index_; }
  auto operator<=>(const Group&) const = default;

  static std::array<Group, kNumGroups> all();

 private:
  int index_ = 0;
};

using PairId = std::string;
using NodeId = std::string;

struct DeviceModelPair {
  PairId pair_id;
  std::string device;
  std::string model;
  std::string runtime;  // metadata only

  bool operator==(const DeviceModelPair&) const = default;
};

struct ProfileEntry {
  PairId pair_id;
  Group group;
  double inference_time_ms = 0.0;  // > 0
  double energy_mwh = 0.0;         // >= 0, idle power excluded
  double map = 0.0;                // [0, 1]

  bool operator==(const ProfileEntry&) const = default;
};

// Offline profiling knowledge base: one entry per (pair, group), dense.
// Immutable after construction.
class ProfileTable {
 public:
  // Validates dense coverage, key uniqueness and value ranges.
  // Throws ValidationError naming the first offending location.
  ProfileTable(std::vector<DeviceModelPair> pairs, std::vector<ProfileEntry> entries);

  const std::vector<DeviceModelPair>& pairs() const { return pairs_; }
  std::size_t num_pairs() const { return pairs_.size(); }

  std::optional<std::size_t> find_pair(std::string_view pair_id) const;
  // Throws ValidationError for an unknown id.
  std::size_t pair_index(std::string_view pair_id) const;

  const ProfileEntry& entry(std::size_t pair_index, Group g) const {
    return entries_[pair_index * kNumGroups + static_cast<std::size_t>(g.index())];
  }
  const ProfileEntry& entry(std::string_view pair_id, Group g) const {
    return entry(pair_index(pair_id), g);
  }

  // Entries ordered by (pair order, group).
  const std::vector<ProfileEntry>& entries() const { return entries_; }

  bool operator==(const ProfileTable& other) const {
    return pairs_ == other.pairs_ && entries_ == other.entries_;
  }

 private:
  std::vector<DeviceModelPair> pairs_;
  std::vector<ProfileEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// mAP^max_g: best profiled accuracy over all pairs for group g.
double best_map(const ProfileTable& table, Group g);

// mAP^thr_g = best_map(g) - delta. May be negative, which admits every pair.
// Throws InvalidArgument if delta < 0.
double accuracy_threshold(const ProfileTable& table, Group g, double delta);

ProfileTable parse_profiles(std::string_view json_text);
ProfileTable load_profiles(const std::filesystem::path& path);
std::string serialize_profiles(const ProfileTable& table);

struct Node {
  NodeId node_id;
  PairId pair_id;
  std::size_t pair_index = 0;  // index into the owning ProfileTable

  bool operator==(const Node&) const = default;
};

// Physical edge nodes in stable file order. Several nodes may host the same
// pair (replicas).
class NodeRegistry {
 public:
  // Throws ValidationError on duplicate node ids, unknown pairs or an empty list.
  NodeRegistry(std::vector<Node> nodes, const ProfileTable& table);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  const Node& operator[](std::size_t i) const { return nodes_[i]; }

  std::optional<std::size_t> find_node(std::string_view node_id) const;

  // True if at least one node hosts the pair.
  bool hosts(std::size_t pair_index) const { return hosted_[pair_index]; }
  const std::vector<bool>& hosted_mask() const { return hosted_; }

 private:
  std::vector<Node> nodes_;
  std::vector<bool> hosted_;
};

NodeRegistry parse_nodes(std::string_view json_text, const ProfileTable& table);
NodeRegistry load_nodes(const std::filesystem::path& path, const ProfileTable& table);
std::string serialize_nodes(const NodeRegistry& registry);

}  // namespace edgelb
