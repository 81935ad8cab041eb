#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "edgelb/profiles.hpp"

namespace edgelb {

// True object count of every frame, in playback order. Never empty.
class FrameTrace {
 public:
  // Throws EmptyTrace for an empty list.
  explicit FrameTrace(std::vector<std::uint32_t> frames);

  const std::vector<std::uint32_t>& frames() const { return frames_; }
  std::size_t size() const { return frames_.size(); }
  std::uint32_t operator[](std::size_t i) const { return frames_[i]; }

  bool operator==(const FrameTrace&) const = default;

 private:
  std::vector<std::uint32_t> frames_;
};

using TransitionMatrix = std::array<std::array<double, kNumGroups>, kNumGroups>;

// Self-transition probability `stay` on the diagonal, the rest spread evenly.
TransitionMatrix sticky_transition(double stay);

struct TraceGenConfig {
  std::size_t length = 417;
  TransitionMatrix group_transition = sticky_transition(0.9);
  // Group 4 frames carry 4 + k objects with P(k) = (1 - rho) * rho^k,
  // truncated at `max_count`.
  double rho = 0.5;
  std::uint32_t max_count = 20;
  std::uint64_t seed = 1;

  // Throws InvalidArgument.
  void validate() const;
};

// Markov chain over groups: uniform start, then one row draw per frame.
FrameTrace generate_trace(const TraceGenConfig& cfg);

// One non-negative integer per line; blank lines and '#' comments ignored.
FrameTrace parse_trace(std::string_view text);
FrameTrace load_trace(const std::filesystem::path& path);

struct ClientConfig {
  std::uint32_t num_users = 1;
  double think_time_ms = 0.0;
  // Exactly one stopping criterion must be set.
  std::optional<std::uint32_t> requests_per_user;
  std::optional<double> total_duration_ms;

  // Throws InvalidArgument.
  void validate() const;
};

inline const std::vector<std::uint32_t> kDefaultUserSweep = {1, 3, 5, 7, 9, 11, 13, 15};

// Starting frame for a user: user * floor(length / num_users), wrapped.
std::size_t user_trace_offset(std::uint32_t user, std::uint32_t num_users, std::size_t trace_length);

}  // namespace edgelb
