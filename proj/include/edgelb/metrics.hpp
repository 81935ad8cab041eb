#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "edgelb/simulator.hpp"

namespace edgelb {

struct NodeUtilization {
  NodeId node_id;
  double utilization = 0.0;  // busy time / simulated duration (diagnostic)
};

struct MetricsSummary {
  std::string policy;
  std::uint32_t num_users = 0;
  std::uint64_t seed = 0;
  std::uint64_t completed = 0;
  double avg_latency_ms = 0.0;
  double p90_latency_ms = 0.0;
  double throughput_rps = 0.0;
  double energy_per_request_mwh = 0.0;
  double mean_map = 0.0;
  std::vector<NodeUtilization> utilization;
};

struct SummaryMeta {
  std::string policy;
  std::uint32_t num_users = 0;
  std::uint64_t seed = 0;
};

struct CdfPoint {
  double latency_ms = 0.0;
  double cum_frac = 0.0;
};

// Element at 1-based rank ceil(p/100 * n) of the sorted samples.
// Throws EmptySamples; InvalidArgument for p outside (0, 100].
double percentile_nearest_rank(std::span<const double> samples, double p);

// Throws EmptyResult when there are no records.
MetricsSummary summarize(const SimResult& result, const SummaryMeta& meta);

// Empirical CDF at every distinct value; last fraction is exactly 1.
std::vector<CdfPoint> export_cdf(std::span<const double> samples);

std::vector<double> latencies(const SimResult& result);

// Mean, sample standard deviation and range of one metric across repeats.
struct Dispersion {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};
Dispersion dispersion(std::span<const double> values);

// %.6g, the precision used by every CSV output.
std::string format_sig6(double v);

void write_summary_header(std::ostream& os);
void write_summary_row(std::ostream& os, const MetricsSummary& s);
void write_cdf_header(std::ostream& os);
void write_cdf_rows(std::ostream& os, const std::string& policy, std::uint32_t users, std::span<const CdfPoint> cdf);

}  // namespace edgelb
