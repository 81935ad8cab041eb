#include "edgelb/policy.hpp"

#include <algorithm>
#include <cmath>

#include "edgelb/errors.hpp"
#include "edgelb/seeding.hpp"

namespace edgelb {

void MoParams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("gamma must lie in [0, 1]");
  }
  if (!(delta_map >= 0.0) || !std::isfinite(delta_map)) {
    throw InvalidArgument("delta_map must be a finite value >= 0");
  }
}

std::vector<std::size_t> feasible_pairs(const ProfileTable& table, Group g, double delta,
                                        const std::vector<bool>& deployed) {
  if (!(delta >= 0.0)) {
    throw InvalidArgument("accuracy tolerance must be >= 0");
  }
  double best = -1.0;
  bool any = false;
  for (std::size_t p = 0; p < table.num_pairs(); ++p) {
    if (deployed[p]) {
      best = any ? std::max(best, table.entry(p, g).map) : table.entry(p, g).map;
      any = true;
    }
  }
  if (!any) {
    throw InvalidArgument("no deployed pair");
  }
  const double threshold = best - delta;
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < table.num_pairs(); ++p) {
    if (deployed[p] && table.entry(p, g).map >= threshold) {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<std::size_t> feasible_pairs(const ProfileTable& table, Group g, double delta) {
  return feasible_pairs(table, g, delta, std::vector<bool>(table.num_pairs(), true));
}

std::vector<double> min_max_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) {
    return out;
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (range > 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out[i] = (values[i] - *lo) / range;
    }
  }
  return out;
}

Decision select_mo(const ProfileTable& table, const NodeRegistry& registry, const QueueSnapshot& snapshot, Group g,
                   const MoParams& params) {
  params.validate();
  if (snapshot.size() != registry.size()) {
    throw InvalidArgument("queue snapshot does not cover the registry");
  }

  Decision d;
  const auto feasible = feasible_pairs(table, g, params.delta_map, registry.hosted_mask());
  std::vector<bool> is_feasible(table.num_pairs(), false);
  for (auto p : feasible) {
    is_feasible[p] = true;
    d.feasible_set.push_back(table.pairs()[p].pair_id);
  }

  std::vector<double> latency;
  std::vector<double> energy;
  for (NodeIndex n = 0; n < registry.size(); ++n) {
    const auto& node = registry[n];
    if (!is_feasible[node.pair_index]) {
      continue;
    }
    const auto& e = table.entry(node.pair_index, g);
    CandidateScore c;
    c.node = n;
    c.node_id = node.node_id;
    c.expected_latency_ms = expected_latency(e.inference_time_ms, snapshot[n]);
    latency.push_back(c.expected_latency_ms);
    energy.push_back(e.energy_mwh);
    d.per_candidate.push_back(std::move(c));
  }

  const auto l_norm = min_max_normalize(latency);
  const auto e_norm = min_max_normalize(energy);
  for (std::size_t i = 0; i < d.per_candidate.size(); ++i) {
    auto& c = d.per_candidate[i];
    c.latency_norm = l_norm[i];
    c.energy_norm = e_norm[i];
    c.score = score(l_norm[i], e_norm[i], params.gamma);
  }

  // Candidates are in registry order, so a strict comparison leaves the
  // earliest node in front on a full tie.
  auto entry_of = [&](const CandidateScore& c) -> const ProfileEntry& {
    return table.entry(registry[c.node].pair_index, g);
  };
  std::size_t best = 0;
  std::size_t at_min = 1;
  for (std::size_t i = 1; i < d.per_candidate.size(); ++i) {
    const auto& c = d.per_candidate[i];
    const auto& b = d.per_candidate[best];
    if (c.score < b.score) {
      best = i;
      at_min = 1;
      continue;
    }
    if (c.score > b.score) {
      continue;
    }
    ++at_min;
    const auto& ce = entry_of(c);
    const auto& be = entry_of(b);
    if (ce.energy_mwh < be.energy_mwh ||
        (ce.energy_mwh == be.energy_mwh && ce.inference_time_ms < be.inference_time_ms)) {
      best = i;
    }
  }

  d.node = d.per_candidate[best].node;
  d.node_id = registry[d.node].node_id;
  d.pair_id = registry[d.node].pair_id;
  d.tiebreak_applied = at_min > 1;
  return d;
}

std::pair<NodeIndex, RrState> select_rr(const NodeRegistry& registry, RrState state) {
  const NodeIndex n = static_cast<NodeIndex>(state.counter % registry.size());
  ++state.counter;
  return {n, state};
}

NodeIndex select_rnd(const NodeRegistry& registry, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, registry.size() - 1);
  return pick(rng);
}

NodeIndex select_lc(const NodeRegistry& registry, const QueueSnapshot& snapshot) {
  NodeIndex best = 0;
  for (NodeIndex n = 1; n < registry.size(); ++n) {
    if (snapshot[n] < snapshot[best]) {
      best = n;
    }
  }
  return best;
}

namespace {

// First node (registry order) hosting the given pair.
NodeIndex first_host(const NodeRegistry& registry, std::size_t pair_index) {
  for (NodeIndex n = 0; n < registry.size(); ++n) {
    if (registry[n].pair_index == pair_index) {
      return n;
    }
  }
  throw InvalidArgument("pair is not hosted by any node");
}

// Best hosted pair under `better`, first in table order on ties.
template <typename Better>
std::size_t best_hosted_pair(const ProfileTable& table, const NodeRegistry& registry, Group g, Better better) {
  std::size_t best = table.num_pairs();
  for (std::size_t p = 0; p < table.num_pairs(); ++p) {
    if (!registry.hosts(p)) {
      continue;
    }
    if (best == table.num_pairs() || better(table.entry(p, g), table.entry(best, g))) {
      best = p;
    }
  }
  return best;
}

}  // namespace

NodeIndex select_le(const ProfileTable& table, const NodeRegistry& registry, Group g) {
  const auto p = best_hosted_pair(table, registry, g, [](const ProfileEntry& a, const ProfileEntry& b) {
    return a.energy_mwh < b.energy_mwh;
  });
  return first_host(registry, p);
}

NodeIndex select_ha(const ProfileTable& table, const NodeRegistry& registry, Group g) {
  const auto p = best_hosted_pair(table, registry, g, [](const ProfileEntry& a, const ProfileEntry& b) {
    return a.map > b.map;
  });
  return first_host(registry, p);
}

NodeIndex select_lt(const ProfileTable& table, const NodeRegistry& registry, const QueueSnapshot& snapshot, Group g) {
  NodeIndex best = 0;
  double best_latency = 0.0;
  for (NodeIndex n = 0; n < registry.size(); ++n) {
    const double l = expected_latency(table.entry(registry[n].pair_index, g).inference_time_ms, snapshot[n]);
    if (n == 0 || l < best_latency) {
      best = n;
      best_latency = l;
    }
  }
  return best;
}

namespace {

std::string gamma_suffix(double gamma) {
  if (gamma == 1.0) {
    return "1";
  }
  return std::to_string(static_cast<long>(std::lround(gamma * 100.0)));
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string policy_label(const PolicyKind& policy) {
  return std::visit(overloaded{
                        [](const policies::MultiObjective& mo) { return "MO_gamma_" + gamma_suffix(mo.params.gamma); },
                        [](const policies::RoundRobin&) { return std::string("RR"); },
                        [](const policies::Random&) { return std::string("RND"); },
                        [](const policies::LeastConnection&) { return std::string("LC"); },
                        [](const policies::LowestEnergy&) { return std::string("LE"); },
                        [](const policies::LowestTime&) { return std::string("LT"); },
                        [](const policies::HighestAccuracy&) { return std::string("HA"); },
                    },
                    policy);
}

Dispatcher::Dispatcher(PolicyKind policy, std::uint64_t run_seed) : policy_(std::move(policy)) {
  if (const auto* rnd = std::get_if<policies::Random>(&policy_)) {
    rnd_.seed(derive_seed(rnd->seed, run_seed));
  }
  if (const auto* mo = std::get_if<policies::MultiObjective>(&policy_)) {
    mo->params.validate();
  }
}

Decision Dispatcher::dispatch(const ProfileTable& table, const NodeRegistry& registry, const QueueSnapshot& snapshot,
                              Group g) {
  auto fixed = [&](NodeIndex n) {
    Decision d;
    d.node = n;
    d.node_id = registry[n].node_id;
    d.pair_id = registry[n].pair_id;
    return d;
  };
  return std::visit(overloaded{
                        [&](const policies::MultiObjective& mo) {
                          return select_mo(table, registry, snapshot, g, mo.params);
                        },
                        [&](const policies::RoundRobin&) {
                          auto [n, next] = select_rr(registry, rr_);
                          rr_ = next;
                          return fixed(n);
                        },
                        [&](const policies::Random&) { return fixed(select_rnd(registry, rnd_)); },
                        [&](const policies::LeastConnection&) { return fixed(select_lc(registry, snapshot)); },
                        [&](const policies::LowestEnergy&) { return fixed(select_le(table, registry, g)); },
                        [&](const policies::LowestTime&) { return fixed(select_lt(table, registry, snapshot, g)); },
                        [&](const policies::HighestAccuracy&) { return fixed(select_ha(table, registry, g)); },
                    },
                    policy_);
}

}  // namespace edgelb
