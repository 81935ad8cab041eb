#include "edgelb/workload.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <string>

#include "edgelb/errors.hpp"
#include "io.hpp"

namespace edgelb {

FrameTrace::FrameTrace(std::vector<std::uint32_t> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) {
    throw EmptyTrace("frame trace is empty");
  }
}

TransitionMatrix sticky_transition(double stay) {
  TransitionMatrix m{};
  const double move = (1.0 - stay) / (kNumGroups - 1);
  for (int i = 0; i < kNumGroups; ++i) {
    for (int j = 0; j < kNumGroups; ++j) {
      m[i][j] = i == j ? stay : move;
    }
  }
  return m;
}

void TraceGenConfig::validate() const {
  if (length < 1) {
    throw InvalidArgument("trace length must be >= 1");
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    throw InvalidArgument("rho must lie in (0, 1)");
  }
  if (max_count < 4) {
    throw InvalidArgument("max_count must be >= 4");
  }
  for (int i = 0; i < kNumGroups; ++i) {
    double sum = 0.0;
    for (double p : group_transition[i]) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("transition row " + std::to_string(i) + " has an entry outside [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InvalidArgument("transition row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

FrameTrace generate_trace(const TraceGenConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::array<std::discrete_distribution<int>, kNumGroups> next;
  for (int i = 0; i < kNumGroups; ++i) {
    next[i] = std::discrete_distribution<int>(cfg.group_transition[i].begin(), cfg.group_transition[i].end());
  }
  std::geometric_distribution<std::uint32_t> tail(1.0 - cfg.rho);

  auto count_for = [&](int group) -> std::uint32_t {
    if (group < kNumGroups - 1) {
      return static_cast<std::uint32_t>(group);
    }
    return std::min<std::uint32_t>(cfg.max_count, 4 + tail(rng));
  };

  std::vector<std::uint32_t> frames;
  frames.reserve(cfg.length);
  int group = std::uniform_int_distribution<int>(0, kNumGroups - 1)(rng);
  frames.push_back(count_for(group));
  while (frames.size() < cfg.length) {
    group = next[group](rng);
    frames.push_back(count_for(group));
  }
  return FrameTrace(std::move(frames));
}

FrameTrace parse_trace(std::string_view text) {
  std::vector<std::uint32_t> frames;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
      continue;
    }
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    if (line.front() == '#') {
      continue;
    }
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw ParseError("trace line " + std::to_string(line_no) + ": expected a non-negative integer, got '" +
                       std::string(line) + "'");
    }
    frames.push_back(value);
  }
  if (frames.empty()) {
    throw EmptyTrace("trace contains no frames");
  }
  return FrameTrace(std::move(frames));
}

FrameTrace load_trace(const std::filesystem::path& path) {
  const std::string text = detail::read_text_file(path);
  try {
    return parse_trace(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const EmptyTrace& e) {
    throw EmptyTrace(path.string() + ": " + e.what());
  }
}

void ClientConfig::validate() const {
  if (num_users < 1) {
    throw InvalidArgument("num_users must be >= 1");
  }
  if (!(think_time_ms >= 0.0) || !std::isfinite(think_time_ms)) {
    throw InvalidArgument("think_time_ms must be >= 0");
  }
  if (requests_per_user.has_value() == total_duration_ms.has_value()) {
    throw InvalidArgument("exactly one of requests_per_user and total_duration_ms must be set");
  }
  if (requests_per_user && *requests_per_user < 1) {
    throw InvalidArgument("requests_per_user must be >= 1");
  }
  if (total_duration_ms && !(*total_duration_ms > 0.0)) {
    throw InvalidArgument("total_duration_ms must be > 0");
  }
}

std::size_t user_trace_offset(std::uint32_t user, std::uint32_t num_users, std::size_t trace_length) {
  const std::size_t stride = trace_length / num_users;
  return (static_cast<std::size_t>(user) * stride) % trace_length;
}

}  // namespace edgelb
