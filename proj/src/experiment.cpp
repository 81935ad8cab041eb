#include "edgelb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "edgelb/errors.hpp"
#include "edgelb/seeding.hpp"
#include "io.hpp"
#include "json.hpp"

namespace edgelb {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kDefaultGamma = 0.5;
constexpr double kDefaultDelta = 0.1;

template <typename T>
T get_or(const json& obj, const char* name, T fallback) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) {
    return fallback;
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + name + "' has wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError(where + ": unknown field '" + it.key() + "'");
    }
  }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

PolicySpec parse_policy_json(const json& jp, std::size_t i) {
  const std::string where = "policies[" + std::to_string(i) + "]";
  if (!jp.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  reject_unknown(jp, {"kind", "gamma", "delta_map", "seed", "label"}, where);
  const auto kind = get_or<std::string>(jp, "kind", "");
  PolicyKind policy;
  if (kind == "MO") {
    MoParams params{get_or<double>(jp, "gamma", kDefaultGamma), get_or<double>(jp, "delta_map", kDefaultDelta)};
    try {
      params.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(where + ": " + e.what());
    }
    policy = policies::MultiObjective{params};
  } else if (kind == "RR") {
    policy = policies::RoundRobin{};
  } else if (kind == "RND") {
    policy = policies::Random{get_or<std::uint64_t>(jp, "seed", 0)};
  } else if (kind == "LC") {
    policy = policies::LeastConnection{};
  } else if (kind == "LE") {
    policy = policies::LowestEnergy{};
  } else if (kind == "LT") {
    policy = policies::LowestTime{};
  } else if (kind == "HA") {
    policy = policies::HighestAccuracy{};
  } else {
    throw ConfigError(where + ": unknown policy kind '" + kind + "'");
  }
  auto spec = make_policy_spec(policy);
  spec.label = get_or<std::string>(jp, "label", spec.label);
  return spec;
}

TraceSource parse_trace_source(const json& jt, const fs::path& base_dir) {
  if (!jt.is_object()) {
    throw ConfigError("trace: expected an object");
  }
  reject_unknown(jt, {"file", "generate"}, "trace");
  if (jt.contains("file") == jt.contains("generate")) {
    throw ConfigError("trace: exactly one of 'file' and 'generate' must be given");
  }
  if (jt.contains("file")) {
    return resolve(base_dir, get_or<std::string>(jt, "file", ""));
  }
  const auto& jg = jt.at("generate");
  if (!jg.is_object()) {
    throw ConfigError("trace.generate: expected an object");
  }
  reject_unknown(jg, {"length", "transition", "self_transition", "rho", "max_count", "seed"}, "trace.generate");
  TraceGenConfig g;
  g.length = get_or<std::size_t>(jg, "length", g.length);
  g.rho = get_or<double>(jg, "rho", g.rho);
  g.max_count = get_or<std::uint32_t>(jg, "max_count", g.max_count);
  g.seed = get_or<std::uint64_t>(jg, "seed", g.seed);
  if (jg.contains("transition") && jg.contains("self_transition")) {
    throw ConfigError("trace.generate: give either 'transition' or 'self_transition'");
  }
  if (jg.contains("self_transition")) {
    g.group_transition = sticky_transition(get_or<double>(jg, "self_transition", 0.9));
  } else if (jg.contains("transition")) {
    try {
      g.group_transition = jg.at("transition").get<TransitionMatrix>();
    } catch (const json::exception&) {
      throw ConfigError("trace.generate.transition must be a 5x5 array of numbers");
    }
  }
  try {
    g.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("trace.generate: ") + e.what());
  }
  return g;
}

json policy_json(const PolicySpec& spec) {
  json j;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, policies::MultiObjective>) {
          j = {{"kind", "MO"}, {"gamma", p.params.gamma}, {"delta_map", p.params.delta_map}};
        } else if constexpr (std::is_same_v<P, policies::Random>) {
          j = {{"kind", "RND"}, {"seed", p.seed}};
        } else {
          j = {{"kind", policy_label(p)}};
        }
      },
      spec.kind);
  j["label"] = spec.label;
  return j;
}

std::vector<std::uint32_t> users_from_json(const json& j) {
  try {
    return j.get<std::vector<std::uint32_t>>();
  } catch (const json::exception&) {
    throw ConfigError("'users' must be an array of positive integers");
  }
}

// Collects every file and directory an invocation creates so a failure can
// remove them again.
class OutputSet {
 public:
  explicit OutputSet(fs::path root) : root_(std::move(root)) {}

  void make_dirs(const fs::path& dir) {
    std::vector<fs::path> missing;
    for (fs::path p = dir; !p.empty() && !fs::exists(p); p = p.parent_path()) {
      missing.push_back(p);
      if (p == p.parent_path()) {
        break;
      }
    }
    fs::create_directories(dir);
    dirs_.insert(dirs_.end(), missing.begin(), missing.end());
  }

  std::ofstream open(const fs::path& rel) {
    const fs::path path = root_ / rel;
    make_dirs(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ConfigError("cannot write '" + path.string() + "'");
    }
    files_.push_back(path);
    return out;
  }

  void rollback() noexcept {
    std::error_code ec;
    for (const auto& f : files_) {
      fs::remove(f, ec);
    }
    // Deepest first; only directories this invocation created.
    auto dirs = dirs_;
    std::sort(dirs.begin(), dirs.end(),
              [](const fs::path& a, const fs::path& b) { return a.string().size() > b.string().size(); });
    for (const auto& d : dirs) {
      fs::remove(d, ec);
    }
  }

 private:
  fs::path root_;
  std::vector<fs::path> files_;
  std::vector<fs::path> dirs_;
};

void close_checked(std::ofstream& out, const std::string& name) {
  out.close();
  if (!out) {
    throw ConfigError("failed writing " + name);
  }
}

std::string cell_stem(const GridCell& cell) {
  return cell.policy.label + "_u" + std::to_string(cell.users) + "_r" + std::to_string(cell.repeat);
}

void write_outputs(const ExperimentConfig& cfg, const std::vector<CellOutcome>& outcomes, const RunOverrides& ov,
                   OutputSet& outputs) {
  {
    auto out = outputs.open("config-echo.json");
    out << experiment_config_json(cfg);
    close_checked(out, "config-echo.json");
  }
  {
    auto out = outputs.open("summary.csv");
    write_summary_header(out);
    for (const auto& o : outcomes) {
      write_summary_row(out, o.summary);
    }
    close_checked(out, "summary.csv");
  }
  {
    // Repeats of one (policy, users) point are pooled into a single CDF.
    auto out = outputs.open("cdf.csv");
    write_cdf_header(out);
    for (std::size_t i = 0; i < outcomes.size();) {
      std::vector<double> pooled;
      std::size_t j = i;
      for (; j < outcomes.size() && outcomes[j].cell.policy.label == outcomes[i].cell.policy.label &&
             outcomes[j].cell.users == outcomes[i].cell.users;
           ++j) {
        pooled.insert(pooled.end(), outcomes[j].latencies.begin(), outcomes[j].latencies.end());
      }
      const auto cdf = export_cdf(pooled);
      write_cdf_rows(out, outcomes[i].cell.policy.label, outcomes[i].cell.users, cdf);
      i = j;
    }
    close_checked(out, "cdf.csv");
  }
  {
    auto out = outputs.open("utilization.csv");
    out << "policy,users,seed,node_id,utilization\n";
    for (const auto& o : outcomes) {
      for (const auto& u : o.summary.utilization) {
        out << o.summary.policy << ',' << o.summary.num_users << ',' << o.summary.seed << ',' << u.node_id << ','
            << format_sig6(u.utilization) << '\n';
      }
    }
    close_checked(out, "utilization.csv");
  }
  if (ov.aggregate) {
    auto out = outputs.open("aggregate.csv");
    out << "policy,users,repeats";
    for (const char* m : {"avg_ms", "p90_ms", "throughput_rps", "mwh_per_req", "mean_map"}) {
      out << ',' << m << "_mean," << m << "_std," << m << "_min," << m << "_max";
    }
    out << '\n';
    for (std::size_t i = 0; i < outcomes.size(); i += cfg.repeats) {
      std::array<std::vector<double>, 5> cols;
      for (std::size_t j = i; j < i + cfg.repeats; ++j) {
        const auto& s = outcomes[j].summary;
        cols[0].push_back(s.avg_latency_ms);
        cols[1].push_back(s.p90_latency_ms);
        cols[2].push_back(s.throughput_rps);
        cols[3].push_back(s.energy_per_request_mwh);
        cols[4].push_back(s.mean_map);
      }
      out << outcomes[i].summary.policy << ',' << outcomes[i].summary.num_users << ',' << cfg.repeats;
      for (const auto& col : cols) {
        const auto d = dispersion(col);
        out << ',' << format_sig6(d.mean) << ',' << format_sig6(d.stddev) << ',' << format_sig6(d.min) << ','
            << format_sig6(d.max);
      }
      out << '\n';
    }
    close_checked(out, "aggregate.csv");
  }
  if (ov.decision_log) {
    for (const auto& o : outcomes) {
      const fs::path rel = fs::path("decisions") / (cell_stem(o.cell) + ".jsonl");
      auto out = outputs.open(rel);
      const auto& res = *o.result;
      for (std::size_t k = 0; k < res.records.size(); ++k) {
        out << decision_log_line(res.records[k], k < res.audits.size() ? &res.audits[k] : nullptr) << '\n';
      }
      close_checked(out, rel.string());
    }
  }
}

void print_table(std::ostream& out, const ExperimentConfig& cfg, const std::vector<CellOutcome>& outcomes) {
  out << std::left << std::setw(14) << "policy" << std::right << std::setw(6) << "users" << std::setw(12) << "avg_ms"
      << std::setw(12) << "p90_ms" << std::setw(10) << "req/s" << std::setw(12) << "mWh/req" << std::setw(9) << "mAP"
      << '\n';
  for (std::size_t i = 0; i < outcomes.size(); i += cfg.repeats) {
    MetricsSummary mean = outcomes[i].summary;
    for (std::size_t j = i + 1; j < i + cfg.repeats; ++j) {
      const auto& s = outcomes[j].summary;
      mean.avg_latency_ms += s.avg_latency_ms;
      mean.p90_latency_ms += s.p90_latency_ms;
      mean.throughput_rps += s.throughput_rps;
      mean.energy_per_request_mwh += s.energy_per_request_mwh;
      mean.mean_map += s.mean_map;
    }
    const double r = cfg.repeats;
    out << std::left << std::setw(14) << mean.policy << std::right << std::setw(6) << mean.num_users
        << std::setw(12) << format_sig6(mean.avg_latency_ms / r) << std::setw(12)
        << format_sig6(mean.p90_latency_ms / r) << std::setw(10) << format_sig6(mean.throughput_rps / r)
        << std::setw(12) << format_sig6(mean.energy_per_request_mwh / r) << std::setw(9)
        << format_sig6(mean.mean_map / r) << '\n';
  }
}

// Input problems map to exit 1, anything else to exit 2.
template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const EmptyTrace& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return exit_code::kRuntime;
  }
}

int execute_grid(ExperimentConfig cfg, const RunOverrides& ov, std::ostream& out) {
  cfg.validate();
  const auto outcomes = run_grid(cfg, ov.decision_log, ov.jobs);
  OutputSet outputs(cfg.output_dir);
  try {
    outputs.make_dirs(cfg.output_dir);
    write_outputs(cfg, outcomes, ov, outputs);
  } catch (...) {
    outputs.rollback();
    throw;
  }
  print_table(out, cfg, outcomes);
  out << "wrote " << outcomes.size() << " summary rows to " << (cfg.output_dir / "summary.csv").string() << '\n';
  return exit_code::kOk;
}

}  // namespace

PolicySpec make_policy_spec(PolicyKind kind) {
  auto label = policy_label(kind);
  return PolicySpec{std::move(kind), std::move(label)};
}

PolicySpec parse_policy_name(std::string_view name, const MoParams& mo_defaults) {
  if (name == "RR") return make_policy_spec(policies::RoundRobin{});
  if (name == "RND") return make_policy_spec(policies::Random{});
  if (name == "LC") return make_policy_spec(policies::LeastConnection{});
  if (name == "LE") return make_policy_spec(policies::LowestEnergy{});
  if (name == "LT") return make_policy_spec(policies::LowestTime{});
  if (name == "HA") return make_policy_spec(policies::HighestAccuracy{});
  if (name == "MO") return make_policy_spec(policies::MultiObjective{mo_defaults});
  constexpr std::string_view prefix = "MO_gamma_";
  if (name.substr(0, prefix.size()) == prefix) {
    const auto digits = name.substr(prefix.size());
    int value = -1;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && value >= 0 && value <= 100) {
      MoParams params = mo_defaults;
      params.gamma = value == 1 ? 1.0 : value / 100.0;
      return make_policy_spec(policies::MultiObjective{params});
    }
  }
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (users.empty()) {
    throw ConfigError("users list is empty");
  }
  if (std::any_of(users.begin(), users.end(), [](std::uint32_t u) { return u < 1; })) {
    throw ConfigError("every users entry must be >= 1");
  }
  if (repeats < 1) {
    throw ConfigError("repeats must be >= 1");
  }
  if (policies.empty()) {
    throw ConfigError("at least one policy is required");
  }
  std::set<std::string> labels;
  for (const auto& p : policies) {
    if (!labels.insert(p.label).second) {
      throw ConfigError("duplicate policy label '" + p.label + "'");
    }
  }
  SimParams probe = base.params;
  probe.clients.num_users = 1;
  try {
    probe.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_experiment_config(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  if (get_or<int>(doc, "schema_version", 0) != 1) {
    throw ConfigError("config: unsupported or missing schema_version");
  }
  reject_unknown(doc,
                 {"schema_version", "profiles", "nodes", "trace", "clients", "gateway_overhead_ms",
                  "service_jitter_sigma", "miscount_prob", "first_frame_count", "seed", "snapshot_staleness_ms",
                  "users", "repeats", "policies", "output_dir"},
                 "config");

  ExperimentConfig cfg;
  for (const char* required : {"profiles", "nodes", "trace", "policies"}) {
    if (!doc.contains(required)) {
      throw ConfigError(std::string("config: missing field '") + required + "'");
    }
  }
  cfg.base.profiles = resolve(base_dir, get_or<std::string>(doc, "profiles", ""));
  cfg.base.nodes = resolve(base_dir, get_or<std::string>(doc, "nodes", ""));
  cfg.base.trace = parse_trace_source(doc.at("trace"), base_dir);

  auto& params = cfg.base.params;
  params.clients = ClientConfig{};
  if (auto it = doc.find("clients"); it != doc.end()) {
    if (!it->is_object()) {
      throw ConfigError("clients: expected an object");
    }
    reject_unknown(*it, {"think_time_ms", "requests_per_user", "total_duration_ms"}, "clients");
    params.clients.think_time_ms = get_or<double>(*it, "think_time_ms", 0.0);
    if (it->contains("requests_per_user")) {
      params.clients.requests_per_user = get_or<std::uint32_t>(*it, "requests_per_user", 0);
    }
    if (it->contains("total_duration_ms")) {
      params.clients.total_duration_ms = get_or<double>(*it, "total_duration_ms", 0.0);
    }
  } else {
    params.clients.requests_per_user = 100;
  }
  params.gateway_overhead_ms = get_or<double>(doc, "gateway_overhead_ms", 0.0);
  params.service_jitter_sigma = get_or<double>(doc, "service_jitter_sigma", 0.0);
  params.miscount_prob = get_or<double>(doc, "miscount_prob", 0.0);
  if (auto it = doc.find("first_frame_count"); it != doc.end() && !it->is_null()) {
    params.first_frame_count = get_or<std::uint32_t>(doc, "first_frame_count", 0);
  }
  params.seed = get_or<std::uint64_t>(doc, "seed", 1);
  params.snapshot_staleness_ms = get_or<double>(doc, "snapshot_staleness_ms", 0.0);

  if (auto it = doc.find("users"); it != doc.end()) {
    cfg.users = users_from_json(*it);
  }
  cfg.repeats = get_or<std::uint32_t>(doc, "repeats", 3);
  const auto& jpolicies = doc.at("policies");
  if (!jpolicies.is_array()) {
    throw ConfigError("policies: expected an array");
  }
  for (std::size_t i = 0; i < jpolicies.size(); ++i) {
    cfg.policies.push_back(parse_policy_json(jpolicies[i], i));
  }
  if (doc.contains("output_dir")) {
    cfg.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "out"));
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::string text;
  try {
    text = detail::read_text_file(path);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  return parse_experiment_config(text, path.parent_path());
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
  const auto& p = cfg.base.params;
  json doc;
  doc["schema_version"] = 1;
  doc["profiles"] = cfg.base.profiles.string();
  doc["nodes"] = cfg.base.nodes.string();
  if (const auto* path = std::get_if<fs::path>(&cfg.base.trace)) {
    doc["trace"] = {{"file", path->string()}};
  } else {
    const auto& g = std::get<TraceGenConfig>(cfg.base.trace);
    doc["trace"] = {{"generate",
                     {{"length", g.length},
                      {"transition", g.group_transition},
                      {"rho", g.rho},
                      {"max_count", g.max_count},
                      {"seed", g.seed}}}};
  }
  json clients = {{"think_time_ms", p.clients.think_time_ms}};
  if (p.clients.requests_per_user) {
    clients["requests_per_user"] = *p.clients.requests_per_user;
  }
  if (p.clients.total_duration_ms) {
    clients["total_duration_ms"] = *p.clients.total_duration_ms;
  }
  doc["clients"] = clients;
  doc["gateway_overhead_ms"] = p.gateway_overhead_ms;
  doc["service_jitter_sigma"] = p.service_jitter_sigma;
  doc["miscount_prob"] = p.miscount_prob;
  doc["first_frame_count"] = p.first_frame_count ? json(*p.first_frame_count) : json(nullptr);
  doc["seed"] = p.seed;
  doc["snapshot_staleness_ms"] = p.snapshot_staleness_ms;
  doc["users"] = cfg.users;
  doc["repeats"] = cfg.repeats;
  doc["policies"] = json::array();
  for (const auto& spec : cfg.policies) {
    doc["policies"].push_back(policy_json(spec));
  }
  doc["output_dir"] = cfg.output_dir.string();
  return doc.dump(2) + "\n";
}

void apply_overrides(ExperimentConfig& cfg, const RunOverrides& ov) {
  if (ov.out) cfg.output_dir = *ov.out;
  if (ov.seed) cfg.base.params.seed = *ov.seed;
  if (ov.users) cfg.users = *ov.users;
  if (ov.repeats) cfg.repeats = *ov.repeats;
  if (ov.policies) {
    MoParams mo_defaults{kDefaultGamma, kDefaultDelta};
    for (const auto& spec : cfg.policies) {
      if (const auto* mo = std::get_if<policies::MultiObjective>(&spec.kind)) {
        mo_defaults = mo->params;
        break;
      }
    }
    cfg.policies.clear();
    for (const auto& name : *ov.policies) {
      cfg.policies.push_back(parse_policy_name(name, mo_defaults));
    }
  }
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::string_view label, std::uint32_t users, std::uint32_t repeat) {
  std::uint64_t s = mix64(base_seed ^ fnv1a64(label));
  s = mix64(s ^ users);
  return mix64(s ^ repeat);
}

std::vector<GridCell> expand_grid(const ExperimentConfig& cfg) {
  std::vector<GridCell> cells;
  for (const auto& policy : cfg.policies) {
    for (auto users : cfg.users) {
      for (std::uint32_t r = 0; r < cfg.repeats; ++r) {
        cells.push_back({policy, users, r, cell_seed(cfg.base.params.seed, policy.label, users, r)});
      }
    }
  }
  return cells;
}

std::vector<CellOutcome> run_grid(const ExperimentConfig& cfg, bool keep_results, unsigned jobs) {
  ProfileTable table = load_profiles(cfg.base.profiles);
  NodeRegistry registry = load_nodes(cfg.base.nodes, table);
  FrameTrace trace = resolve_trace(cfg.base.trace);

  const auto cells = expand_grid(cfg);
  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const auto& cell = cells[i];
        SimParams params = cfg.base.params;
        params.policy = cell.policy.kind;
        params.clients.num_users = cell.users;
        params.seed = cell.seed;
        params.record_audit = keep_results;
        SimResult result = simulate(table, registry, trace, params);
        auto& o = outcomes[i];
        o.cell = cell;
        o.summary = summarize(result, {cell.policy.label, cell.users, cell.seed});
        o.latencies = latencies(result);
        if (keep_results) {
          o.result = std::move(result);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next = cells.size();
      }
    }
  };

  if (jobs == 0) {
    jobs = std::max(1u, std::thread::hardware_concurrency());
  }
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(cells.size(), 1)));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return outcomes;
}

std::vector<PolicySpec> gamma_sweep_policies(const ExperimentConfig& cfg) {
  const policies::MultiObjective* base = nullptr;
  for (const auto& spec : cfg.policies) {
    if ((base = std::get_if<policies::MultiObjective>(&spec.kind)) != nullptr) {
      break;
    }
  }
  if (base == nullptr) {
    throw ConfigError("gamma-sweep needs an MO policy in the config");
  }
  std::vector<PolicySpec> out;
  for (double gamma : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    out.push_back(make_policy_spec(policies::MultiObjective{MoParams{gamma, base->params.delta_map}}));
  }
  return out;
}

int cmd_run(const fs::path& config_path, const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = load_experiment_config(config_path);
    apply_overrides(cfg, overrides);
    return execute_grid(std::move(cfg), overrides, out);
  });
}

int cmd_gamma_sweep(const fs::path& config_path, const RunOverrides& overrides, std::ostream& out,
                    std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = load_experiment_config(config_path);
    // --policy does not apply: the sweep defines its own policy list.
    RunOverrides ov = overrides;
    ov.policies.reset();
    apply_overrides(cfg, ov);
    cfg.policies = gamma_sweep_policies(cfg);
    return execute_grid(std::move(cfg), overrides, out);
  });
}

int cmd_validate(const fs::path& profiles_path, const fs::path& nodes_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto table = load_profiles(profiles_path);
    const auto registry = load_nodes(nodes_path, table);

    out << "profiles: " << table.num_pairs() << " pairs, " << table.entries().size() << " entries\n";
    out << "nodes: " << registry.size() << '\n';
    for (const auto& n : registry.nodes()) {
      out << "  " << n.node_id << " -> " << n.pair_id << '\n';
    }

    auto mean_over_groups = [&](std::size_t p, double ProfileEntry::*field) {
      double sum = 0.0;
      for (auto g : Group::all()) {
        sum += table.entry(p, g).*field;
      }
      return sum / kNumGroups;
    };
    auto argmin_pair = [&](double ProfileEntry::*field) {
      std::size_t best = 0;
      for (std::size_t p = 1; p < table.num_pairs(); ++p) {
        if (mean_over_groups(p, field) < mean_over_groups(best, field)) {
          best = p;
        }
      }
      return best;
    };
    auto row = [&](const std::string& metric, std::size_t p) {
      const auto& pair = table.pairs()[p];
      out << std::left << std::setw(18) << metric << std::setw(18) << pair.pair_id << std::setw(28) << pair.device
          << std::setw(16) << pair.model << pair.runtime << '\n';
    };

    out << '\n'
        << std::left << std::setw(18) << "metric/group" << std::setw(18) << "pair" << std::setw(28) << "device"
        << std::setw(16) << "model" << "runtime" << '\n';
    row("energy", argmin_pair(&ProfileEntry::energy_mwh));
    row("inference time", argmin_pair(&ProfileEntry::inference_time_ms));
    for (auto g : Group::all()) {
      std::size_t best = 0;
      for (std::size_t p = 1; p < table.num_pairs(); ++p) {
        if (table.entry(p, g).map > table.entry(best, g).map) {
          best = p;
        }
      }
      row("mAP (group " + std::to_string(g.index()) + ")", best);
    }
    out << "valid\n";
    return exit_code::kOk;
  });
}

}  // namespace edgelb
