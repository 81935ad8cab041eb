#include "edgelb/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "edgelb/errors.hpp"
#include "io.hpp"
#include "json.hpp"

namespace edgelb {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void check_schema_version(const json& doc, std::string_view what) {
  if (!doc.is_object()) {
    throw ParseError(std::string(what) + ": top level must be an object");
  }
  auto it = doc.find("schema_version");
  if (it == doc.end()) {
    throw ValidationError(std::string(what) + ": missing schema_version");
  }
  if (!it->is_number_integer() || it->get<int>() != kSchemaVersion) {
    throw ValidationError(std::string(what) + ": unsupported schema_version " + it->dump());
  }
}

template <typename T>
T field(const json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field '" + name + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + ": field '" + name + "' has wrong type");
  }
}

const json& array_field(const json& doc, const char* name, std::string_view what) {
  auto it = doc.find(name);
  if (it == doc.end() || !it->is_array()) {
    throw ParseError(std::string(what) + ": '" + name + "' must be an array");
  }
  return *it;
}

}  // namespace

Group::Group(int index) : index_(index) {
  if (index < 0 || index >= kNumGroups) {
    throw InvalidArgument("group index " + std::to_string(index) + " outside [0, 4]");
  }
}

std::array<Group, kNumGroups> Group::all() {
  return {Group{0}, Group{1}, Group{2}, Group{3}, Group{4}};
}

ProfileTable::ProfileTable(std::vector<DeviceModelPair> pairs, std::vector<ProfileEntry> entries)
    : pairs_(std::move(pairs)) {
  if (pairs_.empty()) {
    throw ValidationError("profile table: at least one pair required");
  }
  std::set<std::tuple<std::string, std::string, std::string>> combos;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& p = pairs_[i];
    if (p.pair_id.empty()) {
      throw ValidationError("pairs[" + std::to_string(i) + "]: empty pair_id");
    }
    if (!index_.emplace(p.pair_id, i).second) {
      throw ValidationError("pairs[" + std::to_string(i) + "]: duplicate pair_id '" + p.pair_id + "'");
    }
    if (!combos.emplace(p.device, p.model, p.runtime).second) {
      throw ValidationError("pairs[" + std::to_string(i) + "]: duplicate device/model/runtime for '" +
                            p.pair_id + "'");
    }
  }

  std::vector<std::optional<ProfileEntry>> cells(pairs_.size() * kNumGroups);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& e = entries[i];
    const std::string where = "entries[" + std::to_string(i) + "] (pair '" + e.pair_id +
                              "', group " + std::to_string(e.group.index()) + ")";
    auto idx = find_pair(e.pair_id);
    if (!idx) {
      throw ValidationError(where + ": unknown pair_id");
    }
    if (!(std::isfinite(e.inference_time_ms) && e.inference_time_ms > 0.0)) {
      throw ValidationError(where + ": inference_time_ms must be > 0");
    }
    if (!(std::isfinite(e.energy_mwh) && e.energy_mwh >= 0.0)) {
      throw ValidationError(where + ": energy_mwh must be >= 0");
    }
    if (!(e.map >= 0.0 && e.map <= 1.0)) {
      throw ValidationError(where + ": map must lie in [0, 1]");
    }
    auto& cell = cells[*idx * kNumGroups + static_cast<std::size_t>(e.group.index())];
    if (cell) {
      throw ValidationError(where + ": duplicate entry");
    }
    cell = std::move(e);
  }

  entries_.reserve(cells.size());
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    for (int g = 0; g < kNumGroups; ++g) {
      auto& cell = cells[p * kNumGroups + static_cast<std::size_t>(g)];
      if (!cell) {
        throw ValidationError("pair '" + pairs_[p].pair_id + "', group " + std::to_string(g) +
                              ": missing entry");
      }
      entries_.push_back(std::move(*cell));
    }
  }
}

std::optional<std::size_t> ProfileTable::find_pair(std::string_view pair_id) const {
  auto it = index_.find(std::string(pair_id));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::size_t ProfileTable::pair_index(std::string_view pair_id) const {
  if (auto idx = find_pair(pair_id)) {
    return *idx;
  }
  throw ValidationError("unknown pair_id '" + std::string(pair_id) + "'");
}

double best_map(const ProfileTable& table, Group g) {
  double best = table.entry(0, g).map;
  for (std::size_t p = 1; p < table.num_pairs(); ++p) {
    best = std::max(best, table.entry(p, g).map);
  }
  return best;
}

double accuracy_threshold(const ProfileTable& table, Group g, double delta) {
  if (!(delta >= 0.0)) {
    throw InvalidArgument("accuracy tolerance must be >= 0");
  }
  return best_map(table, g) - delta;
}

ProfileTable parse_profiles(std::string_view json_text) {
  const json doc = parse_json(json_text, "profiles");
  check_schema_version(doc, "profiles");

  std::vector<DeviceModelPair> pairs;
  const auto& jpairs = array_field(doc, "pairs", "profiles");
  for (std::size_t i = 0; i < jpairs.size(); ++i) {
    const std::string where = "pairs[" + std::to_string(i) + "]";
    const auto& jp = jpairs[i];
    if (!jp.is_object()) {
      throw ParseError(where + ": expected an object");
    }
    pairs.push_back({field<std::string>(jp, "pair_id", where), field<std::string>(jp, "device", where),
                     field<std::string>(jp, "model", where), field<std::string>(jp, "runtime", where)});
  }

  std::vector<ProfileEntry> entries;
  const auto& jentries = array_field(doc, "entries", "profiles");
  for (std::size_t i = 0; i < jentries.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "]";
    const auto& je = jentries[i];
    if (!je.is_object()) {
      throw ParseError(where + ": expected an object");
    }
    const int g = field<int>(je, "group", where);
    if (g < 0 || g >= kNumGroups) {
      throw ValidationError(where + ": group " + std::to_string(g) + " outside [0, 4]");
    }
    entries.push_back({field<std::string>(je, "pair_id", where), Group{g},
                       field<double>(je, "inference_time_ms", where), field<double>(je, "energy_mwh", where),
                       field<double>(je, "map", where)});
  }
  return ProfileTable(std::move(pairs), std::move(entries));
}

ProfileTable load_profiles(const std::filesystem::path& path) {
  const std::string text = detail::read_text_file(path);
  try {
    return parse_profiles(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string serialize_profiles(const ProfileTable& table) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["pairs"] = json::array();
  for (const auto& p : table.pairs()) {
    doc["pairs"].push_back({{"pair_id", p.pair_id}, {"device", p.device}, {"model", p.model}, {"runtime", p.runtime}});
  }
  doc["entries"] = json::array();
  for (const auto& e : table.entries()) {
    doc["entries"].push_back({{"pair_id", e.pair_id},
                              {"group", e.group.index()},
                              {"inference_time_ms", e.inference_time_ms},
                              {"energy_mwh", e.energy_mwh},
                              {"map", e.map}});
  }
  return doc.dump(2) + "\n";
}

NodeRegistry::NodeRegistry(std::vector<Node> nodes, const ProfileTable& table)
    : nodes_(std::move(nodes)), hosted_(table.num_pairs(), false) {
  if (nodes_.empty()) {
    throw ValidationError("node registry: at least one node required");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& n = nodes_[i];
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (n.node_id.empty()) {
      throw ValidationError(where + ": empty node_id");
    }
    if (!seen.insert(n.node_id).second) {
      throw ValidationError(where + ": duplicate node_id '" + n.node_id + "'");
    }
    auto idx = table.find_pair(n.pair_id);
    if (!idx) {
      throw ValidationError(where + ": node '" + n.node_id + "' references unknown pair_id '" + n.pair_id + "'");
    }
    n.pair_index = *idx;
    hosted_[*idx] = true;
  }
}

std::optional<std::size_t> NodeRegistry::find_node(std::string_view node_id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].node_id == node_id) {
      return i;
    }
  }
  return std::nullopt;
}

NodeRegistry parse_nodes(std::string_view json_text, const ProfileTable& table) {
  const json doc = parse_json(json_text, "nodes");
  check_schema_version(doc, "nodes");
  std::vector<Node> nodes;
  const auto& jnodes = array_field(doc, "nodes", "nodes");
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (!jnodes[i].is_object()) {
      throw ParseError(where + ": expected an object");
    }
    nodes.push_back({field<std::string>(jnodes[i], "node_id", where), field<std::string>(jnodes[i], "pair_id", where)});
  }
  return NodeRegistry(std::move(nodes), table);
}

NodeRegistry load_nodes(const std::filesystem::path& path, const ProfileTable& table) {
  const std::string text = detail::read_text_file(path);
  try {
    return parse_nodes(text, table);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string serialize_nodes(const NodeRegistry& registry) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["nodes"] = json::array();
  for (const auto& n : registry.nodes()) {
    doc["nodes"].push_back({{"node_id", n.node_id}, {"pair_id", n.pair_id}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace edgelb
