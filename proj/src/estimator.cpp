#include "edgelb/estimator.hpp"

#include <algorithm>

#include "edgelb/errors.hpp"

namespace edgelb {

Group count_to_group(std::uint32_t count) {
  return Group{static_cast<int>(std::min<std::uint32_t>(count, kNumGroups - 1))};
}

Group estimate_group(const StreamState& state, std::uint32_t default_count) {
  return count_to_group(state.last_detected_count.value_or(default_count));
}

StreamState update_after_response(StreamState state, std::uint32_t detected_count, double miscount_prob,
                                  std::mt19937_64& rng) {
  if (!(miscount_prob >= 0.0 && miscount_prob <= 1.0)) {
    throw InvalidArgument("miscount_prob must lie in [0, 1]");
  }
  std::uint32_t stored = detected_count;
  if (miscount_prob > 0.0 && std::bernoulli_distribution(miscount_prob)(rng)) {
    if (std::bernoulli_distribution(0.5)(rng)) {
      ++stored;
    } else if (stored > 0) {
      --stored;
    }
  }
  state.last_detected_count = stored;
  return state;
}

}  // namespace edgelb
