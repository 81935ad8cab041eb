#include "edgelb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "edgelb/errors.hpp"

namespace edgelb {

double percentile_nearest_rank(std::span<const double> samples, double p) {
  if (samples.empty()) {
    throw EmptySamples("percentile of an empty sample set");
  }
  if (!(p > 0.0 && p <= 100.0)) {
    throw InvalidArgument("percentile must lie in (0, 100]");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<double> latencies(const SimResult& result) {
  std::vector<double> out;
  out.reserve(result.records.size());
  for (const auto& r : result.records) {
    out.push_back(r.latency_ms);
  }
  return out;
}

MetricsSummary summarize(const SimResult& result, const SummaryMeta& meta) {
  if (result.records.empty()) {
    throw EmptyResult("no completed requests to summarize");
  }
  MetricsSummary s;
  s.policy = meta.policy;
  s.num_users = meta.num_users;
  s.seed = meta.seed;
  s.completed = result.records.size();

  double latency_sum = 0.0;
  double energy_sum = 0.0;
  double map_sum = 0.0;
  double first_dispatch = result.records.front().dispatch_time;
  double last_completion = result.records.front().completion_time;
  for (const auto& r : result.records) {
    latency_sum += r.latency_ms;
    energy_sum += r.energy_mwh_charged;
    map_sum += r.map_credited;
    first_dispatch = std::min(first_dispatch, r.dispatch_time);
    last_completion = std::max(last_completion, r.completion_time);
  }
  const double n = static_cast<double>(s.completed);
  s.avg_latency_ms = latency_sum / n;
  const auto lat = latencies(result);
  s.p90_latency_ms = percentile_nearest_rank(lat, 90.0);
  const double window_ms = last_completion - first_dispatch;
  s.throughput_rps = window_ms > 0.0 ? n / (window_ms / 1000.0) : 0.0;
  s.energy_per_request_mwh = energy_sum / n;
  s.mean_map = map_sum / n;

  for (const auto& node : result.nodes) {
    s.utilization.push_back(
        {node.node_id, result.duration_ms > 0.0 ? node.busy_ms / result.duration_ms : 0.0});
  }
  return s;
}

std::vector<CdfPoint> export_cdf(std::span<const double> samples) {
  if (samples.empty()) {
    throw EmptySamples("cdf of an empty sample set");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<CdfPoint> cdf;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) {
      continue;
    }
    const double frac = i + 1 == sorted.size() ? 1.0 : static_cast<double>(i + 1) / n;
    cdf.push_back({sorted[i], frac});
  }
  return cdf;
}

Dispersion dispersion(std::span<const double> values) {
  Dispersion d;
  if (values.empty()) {
    return d;
  }
  const double n = static_cast<double>(values.size());
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  d.min = *std::min_element(values.begin(), values.end());
  d.max = *std::max_element(values.begin(), values.end());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - d.mean) * (v - d.mean);
    }
    d.stddev = std::sqrt(ss / (n - 1.0));
  }
  return d;
}

std::string format_sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_summary_header(std::ostream& os) {
  os << "policy,users,seed,completed,avg_ms,p90_ms,throughput_rps,mwh_per_req,mean_map\n";
}

void write_summary_row(std::ostream& os, const MetricsSummary& s) {
  os << s.policy << ',' << s.num_users << ',' << s.seed << ',' << s.completed << ',' << format_sig6(s.avg_latency_ms)
     << ',' << format_sig6(s.p90_latency_ms) << ',' << format_sig6(s.throughput_rps) << ','
     << format_sig6(s.energy_per_request_mwh) << ',' << format_sig6(s.mean_map) << '\n';
}

void write_cdf_header(std::ostream& os) { os << "policy,users,latency_ms,cum_frac\n"; }

void write_cdf_rows(std::ostream& os, const std::string& policy, std::uint32_t users, std::span<const CdfPoint> cdf) {
  for (const auto& pt : cdf) {
    os << policy << ',' << users << ',' << format_sig6(pt.latency_ms) << ',' << format_sig6(pt.cum_frac) << '\n';
  }
}

}  // namespace edgelb
