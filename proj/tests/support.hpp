#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "edgelb/profiles.hpp"

namespace edgelb::test {

struct PairSpec {
  std::string id;
  std::array<double, kNumGroups> time_ms;
  std::array<double, kNumGroups> energy_mwh;
  std::array<double, kNumGroups> map;
};

// Same values in every group.
inline PairSpec flat(std::string id, double t, double e, double m) {
  return PairSpec{std::move(id), {t, t, t, t, t}, {e, e, e, e, e}, {m, m, m, m, m}};
}

inline ProfileTable make_table(const std::vector<PairSpec>& specs) {
  std::vector<DeviceModelPair> pairs;
  std::vector<ProfileEntry> entries;
  for (const auto& s : specs) {
    pairs.push_back({s.id, "dev-" + s.id, "model-" + s.id, "rt"});
    for (int g = 0; g < kNumGroups; ++g) {
      entries.push_back({s.id, Group{g}, s.time_ms[g], s.energy_mwh[g], s.map[g]});
    }
  }
  return ProfileTable(std::move(pairs), std::move(entries));
}

// One node per pair, node ids n0, n1, ... in pair order.
inline NodeRegistry one_node_each(const ProfileTable& table) {
  std::vector<Node> nodes;
  for (std::size_t p = 0; p < table.num_pairs(); ++p) {
    nodes.push_back({"n" + std::to_string(p), table.pairs()[p].pair_id});
  }
  return NodeRegistry(std::move(nodes), table);
}

inline std::vector<PairSpec> random_pairs(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> t(1.0, 100.0);
  std::uniform_real_distribution<double> e(0.01, 0.5);
  std::uniform_real_distribution<double> m(0.0, 1.0);
  std::vector<PairSpec> out;
  for (std::size_t i = 0; i < n; ++i) {
    PairSpec s;
    s.id = "p" + std::to_string(i);
    for (int g = 0; g < kNumGroups; ++g) {
      s.time_ms[g] = t(rng);
      s.energy_mwh[g] = e(rng);
      s.map[g] = m(rng);
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string fixture(const std::string& name) { return std::string(EDGELB_FIXTURES) + "/" + name; }

}  // namespace edgelb::test
