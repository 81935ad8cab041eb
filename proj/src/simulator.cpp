#include "edgelb/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "edgelb/errors.hpp"
#include "edgelb/estimator.hpp"
#include "edgelb/seeding.hpp"
#include "json.hpp"

namespace edgelb {

using nlohmann::json;

namespace {

constexpr std::uint64_t kJitterStream = 1;
constexpr std::uint64_t kMiscountStream = 2;

struct Event {
  enum class Kind { Issue, Complete };
  double time;
  std::uint64_t seq;
  Kind kind;
  std::uint32_t target;  // client for Issue, node for Complete
};

struct LaterFirst {
  bool operator()(const Event& a, const Event& b) const {
    return a.time > b.time || (a.time == b.time && a.seq > b.seq);
  }
};

struct Client {
  std::uint32_t id = 0;
  std::size_t offset = 0;
  std::uint32_t issued = 0;
  StreamState stream;
};

struct Pending {
  std::uint32_t true_count = 0;
};

}  // namespace

void SimParams::validate() const {
  clients.validate();
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(name) + " must be a finite value >= 0");
    }
  };
  non_negative(gateway_overhead_ms, "gateway_overhead_ms");
  non_negative(service_jitter_sigma, "service_jitter_sigma");
  non_negative(snapshot_staleness_ms, "snapshot_staleness_ms");
  if (!(miscount_prob >= 0.0 && miscount_prob <= 1.0)) {
    throw InvalidArgument("miscount_prob must lie in [0, 1]");
  }
  if (const auto* mo = std::get_if<policies::MultiObjective>(&policy)) {
    mo->params.validate();
  }
}

std::uint32_t NodeState::queue_length_at(double t) const {
  if (t <= 0.0) {
    return 0;
  }
  auto it = std::upper_bound(history.begin(), history.end(), t,
                             [](double v, const std::pair<double, std::uint32_t>& h) { return v < h.first; });
  return it == history.begin() ? 0 : std::prev(it)->second;
}

void NodeState::note_change(double now) {
  if (track_history) {
    history.emplace_back(now, queue_length());
  }
}

QueueSnapshot snapshot_queues(std::span<const NodeState> nodes, double now, double staleness_ms) {
  if (!(staleness_ms >= 0.0)) {
    throw InvalidArgument("staleness must be >= 0");
  }
  std::vector<std::uint32_t> counts;
  counts.reserve(nodes.size());
  for (const auto& n : nodes) {
    counts.push_back(staleness_ms == 0.0 ? n.queue_length() : n.queue_length_at(now - staleness_ms));
  }
  return QueueSnapshot(std::move(counts));
}

double sample_service_time(double t_ms, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) {
    return t_ms;
  }
  const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
  return t_ms * std::exp(sigma * z - 0.5 * sigma * sigma);
}

SimResult simulate(const ProfileTable& table, const NodeRegistry& registry, const FrameTrace& trace,
                   const SimParams& params, const DecisionObserver& observer) {
  params.validate();

  std::mt19937_64 jitter_rng(derive_seed(params.seed, kJitterStream));
  std::mt19937_64 miscount_rng(derive_seed(params.seed, kMiscountStream));
  Dispatcher dispatcher(params.policy, params.seed);

  std::vector<NodeState> nodes;
  nodes.reserve(registry.size());
  for (const auto& n : registry.nodes()) {
    NodeState s;
    s.node_id = n.node_id;
    s.pair_id = n.pair_id;
    s.pair_index = n.pair_index;
    s.track_history = params.snapshot_staleness_ms > 0.0;
    nodes.push_back(std::move(s));
  }

  const auto num_users = params.clients.num_users;
  std::vector<Client> clients(num_users);
  for (std::uint32_t c = 0; c < num_users; ++c) {
    clients[c].id = c;
    clients[c].offset = user_trace_offset(c, num_users, trace.size());
    clients[c].stream.stream_id = c;
  }

  SimResult result;
  std::vector<Pending> pending;
  std::priority_queue<Event, std::vector<Event>, LaterFirst> events;
  std::uint64_t seq = 0;
  std::uint32_t in_flight = 0;
  auto schedule = [&](double time, Event::Kind kind, std::uint32_t target) {
    events.push(Event{time, seq++, kind, target});
  };

  auto start_service = [&](std::uint32_t node_idx, double now) {
    auto& node = nodes[node_idx];
    auto& rec = result.records[node.fifo.front()];
    const auto& entry = table.entry(node.pair_index, rec.true_group);
    rec.service_ms =
        sample_service_time(entry.inference_time_ms, params.service_jitter_sigma, jitter_rng) + params.gateway_overhead_ms;
    node.busy_until = now + rec.service_ms;
    schedule(node.busy_until, Event::Kind::Complete, node_idx);
  };

  auto issue = [&](Client& client, double now) {
    if (params.clients.requests_per_user && client.issued >= *params.clients.requests_per_user) {
      return;
    }
    if (params.clients.total_duration_ms && now >= *params.clients.total_duration_ms) {
      return;
    }
    const std::uint32_t true_count = trace[(client.offset + client.issued) % trace.size()];
    ++client.issued;

    const Group true_group = count_to_group(true_count);
    const Group estimated = estimate_group(client.stream, params.first_frame_count.value_or(true_count));
    const QueueSnapshot snapshot = snapshot_queues(nodes, now, params.snapshot_staleness_ms);
    Decision decision = dispatcher.dispatch(table, registry, snapshot, estimated);

    RequestRecord rec;
    rec.request_id = result.records.size();
    rec.client_id = client.id;
    rec.dispatch_time = now;
    rec.true_group = true_group;
    rec.estimated_group = estimated;
    rec.node_id = decision.node_id;
    rec.pair_id = decision.pair_id;
    rec.queue_len_at_decision = snapshot[decision.node];

    if (observer) {
      observer(DecisionEvent{now, rec.request_id, true_group, estimated, snapshot, decision});
    }

    const auto node_idx = static_cast<std::uint32_t>(decision.node);
    result.records.push_back(std::move(rec));
    pending.push_back(Pending{true_count});
    if (params.record_audit) {
      result.audits.push_back(std::move(decision));
    }
    ++result.issued;
    in_flight += 1;
    result.max_in_flight = std::max(result.max_in_flight, in_flight);

    auto& node = nodes[node_idx];
    node.fifo.push_back(result.records.size() - 1);
    node.note_change(now);
    if (node.fifo.size() == 1) {
      start_service(node_idx, now);
    }
  };

  auto complete = [&](std::uint32_t node_idx, double now) {
    auto& node = nodes[node_idx];
    const std::uint64_t req = node.fifo.front();
    node.fifo.pop_front();
    node.note_change(now);

    auto& rec = result.records[req];
    const auto& entry = table.entry(node.pair_index, rec.true_group);
    rec.completion_time = now;
    rec.latency_ms = now - rec.dispatch_time;
    rec.energy_mwh_charged = entry.energy_mwh;
    rec.map_credited = entry.map;

    node.cumulative_busy_ms += rec.service_ms;
    node.cumulative_energy_mwh += rec.energy_mwh_charged;
    node.completed_count += 1;
    in_flight -= 1;
    result.duration_ms = std::max(result.duration_ms, now);

    auto& client = clients[rec.client_id];
    client.stream = update_after_response(client.stream, pending[req].true_count, params.miscount_prob, miscount_rng);

    if (!node.fifo.empty()) {
      start_service(node_idx, now);
    }
    schedule(now + params.clients.think_time_ms, Event::Kind::Issue, rec.client_id);
  };

  for (std::uint32_t c = 0; c < num_users; ++c) {
    schedule(0.0, Event::Kind::Issue, c);
  }
  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    if (ev.kind == Event::Kind::Issue) {
      issue(clients[ev.target], ev.time);
    } else {
      complete(ev.target, ev.time);
    }
  }

  result.nodes.reserve(nodes.size());
  for (const auto& n : nodes) {
    result.nodes.push_back({n.node_id, n.pair_id, n.cumulative_busy_ms, n.cumulative_energy_mwh, n.completed_count});
  }
  return result;
}

FrameTrace resolve_trace(const TraceSource& source) {
  if (const auto* path = std::get_if<std::filesystem::path>(&source)) {
    return load_trace(*path);
  }
  return generate_trace(std::get<TraceGenConfig>(source));
}

SimResult run_sim(const SimConfig& cfg) {
  try {
    const auto table = load_profiles(cfg.profiles);
    const auto registry = load_nodes(cfg.nodes, table);
    const auto trace = resolve_trace(cfg.trace);
    return simulate(table, registry, trace, cfg.params);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

namespace {

json record_json(const RequestRecord& r) {
  return json{{"request_id", r.request_id},
              {"client_id", r.client_id},
              {"dispatch_time", r.dispatch_time},
              {"completion_time", r.completion_time},
              {"true_group", r.true_group.index()},
              {"estimated_group", r.estimated_group.index()},
              {"node_id", r.node_id},
              {"pair_id", r.pair_id},
              {"queue_len_at_decision", r.queue_len_at_decision},
              {"service_ms", r.service_ms},
              {"latency_ms", r.latency_ms},
              {"energy_mwh_charged", r.energy_mwh_charged},
              {"map_credited", r.map_credited}};
}

}  // namespace

std::string serialize_result(const SimResult& result) {
  json doc;
  doc["schema_version"] = 1;
  doc["duration_ms"] = result.duration_ms;
  doc["issued"] = result.issued;
  doc["max_in_flight"] = result.max_in_flight;
  doc["records"] = json::array();
  for (const auto& r : result.records) {
    doc["records"].push_back(record_json(r));
  }
  doc["nodes"] = json::array();
  for (const auto& n : result.nodes) {
    doc["nodes"].push_back({{"node_id", n.node_id},
                            {"pair_id", n.pair_id},
                            {"busy_ms", n.busy_ms},
                            {"energy_mwh", n.energy_mwh},
                            {"completed", n.completed}});
  }
  return doc.dump();
}

std::string decision_log_line(const RequestRecord& record, const Decision* audit) {
  json line = record_json(record);
  if (audit != nullptr && !audit->per_candidate.empty()) {
    line["feasible_set"] = audit->feasible_set;
    line["tiebreak_applied"] = audit->tiebreak_applied;
    line["candidates"] = json::array();
    for (const auto& c : audit->per_candidate) {
      line["candidates"].push_back({{"node_id", c.node_id},
                                    {"expected_latency_ms", c.expected_latency_ms},
                                    {"latency_norm", c.latency_norm},
                                    {"energy_norm", c.energy_norm},
                                    {"score", c.score}});
    }
  }
  return line.dump();
}

}  // namespace edgelb
