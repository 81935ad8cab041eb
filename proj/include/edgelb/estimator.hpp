#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "edgelb/profiles.hpp"

namespace edgelb {

// Per-stream memory of the gateway's output-based object-count estimator.
struct StreamState {
  std::uint32_t stream_id = 0;
  std::optional<std::uint32_t> last_detected_count;  // absent until the first response
};

// 0..3 map to their own group, anything >= 4 to group 4.
Group count_to_group(std::uint32_t count);

// Group the gateway assumes for the next frame. Only prior stream output is
// consulted; `default_count` covers the first frame of a stream.
Group estimate_group(const StreamState& state, std::uint32_t default_count);

// Stores the detected count of the served frame. With probability
// `miscount_prob` the stored value is off by one (sign uniform, clamped at 0).
// The generator is only drawn from when miscount_prob > 0.
StreamState update_after_response(StreamState state, std::uint32_t detected_count, double miscount_prob,
                                  std::mt19937_64& rng);

}  // namespace edgelb
