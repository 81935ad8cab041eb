#include <random>

#include "doctest.h"
#include "edgelb/estimator.hpp"

using namespace edgelb;

TEST_CASE("count_to_group") {
  CHECK(count_to_group(0) == Group{0});
  CHECK(count_to_group(3) == Group{3});
  CHECK(count_to_group(4) == Group{4});
  CHECK(count_to_group(7) == Group{4});
  CHECK(count_to_group(1000000) == Group{4});
  // Monotone and onto all five groups.
  std::array<bool, kNumGroups> seen{};
  for (std::uint32_t c = 0; c < 50; ++c) {
    seen[count_to_group(c).index()] = true;
    CHECK(count_to_group(c).index() <= count_to_group(c + 1).index());
  }
  for (bool s : seen) CHECK(s);
}

TEST_CASE("estimate_group uses the previous response") {
  CHECK(estimate_group(StreamState{1, 2}, 0) == Group{2});
  CHECK(estimate_group(StreamState{1, 9}, 0) == Group{4});
  CHECK(estimate_group(StreamState{1, std::nullopt}, 0) == Group{0});
  CHECK(estimate_group(StreamState{1, std::nullopt}, 5) == Group{4});
}

TEST_CASE("update_after_response without noise stores the count") {
  std::mt19937_64 rng(5);
  const auto before = rng;
  const auto s = update_after_response(StreamState{3, std::nullopt}, 4, 0.0, rng);
  CHECK(s.stream_id == 3);
  CHECK(s.last_detected_count == 4u);
  // No draw is made when noise is off.
  CHECK(rng == before);
}

TEST_CASE("miscount never goes below zero") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    const auto s = update_after_response(StreamState{}, 0, 1.0, rng);
    REQUIRE(s.last_detected_count.has_value());
    CHECK((*s.last_detected_count == 0 || *s.last_detected_count == 1));
  }
  // At least one seed yields the downward draw that gets clamped.
  bool clamped = false;
  for (std::uint64_t seed = 0; seed < 200 && !clamped; ++seed) {
    std::mt19937_64 rng(seed);
    clamped = update_after_response(StreamState{}, 0, 1.0, rng).last_detected_count == 0u;
  }
  CHECK(clamped);
}

TEST_CASE("miscount is off by one with either sign") {
  std::mt19937_64 rng(77);
  int up = 0, down = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto c = *update_after_response(StreamState{}, 2, 1.0, rng).last_detected_count;
    REQUIRE((c == 1 || c == 3));
    (c == 3 ? up : down)++;
  }
  CHECK(std::abs(up / double(n) - 0.5) <= 0.03);
  CHECK(std::abs(down / double(n) - 0.5) <= 0.03);

  int changed = 0;
  for (int i = 0; i < n; ++i) changed += *update_after_response(StreamState{}, 2, 0.2, rng).last_detected_count != 2;
  CHECK(std::abs(changed / double(n) - 0.2) <= 0.03);
}
