#include <algorithm>
#include <random>

#include "doctest.h"
#include "edgelb/errors.hpp"
#include "edgelb/profiles.hpp"
#include "support.hpp"

using namespace edgelb;
using edgelb::test::flat;
using edgelb::test::make_table;

namespace {

std::string profile_doc(const std::string& entries, const std::string& pairs = "") {
  const std::string default_pairs =
      R"([{"pair_id":"pairA","device":"Pi5","model":"SSD","runtime":"TFLite"},
          {"pair_id":"pairB","device":"Jetson","model":"YOLO","runtime":"TensorRT"}])";
  return R"({"schema_version":1,"pairs":)" + (pairs.empty() ? default_pairs : pairs) + R"(,"entries":)" +
         entries + "}";
}

std::string entries_except(const std::string& skip_pair, int skip_group) {
  std::string out = "[";
  bool first = true;
  for (const char* p : {"pairA", "pairB"}) {
    for (int g = 0; g < kNumGroups; ++g) {
      if (p == skip_pair && g == skip_group) continue;
      if (!first) out += ",";
      first = false;
      out += R"({"pair_id":")" + std::string(p) + R"(","group":)" + std::to_string(g) +
             R"(,"inference_time_ms":10,"energy_mwh":0.1,"map":0.5})";
    }
  }
  return out + "]";
}

}  // namespace

TEST_CASE("shipped fixture loads with the testbed pairs") {
  const auto table = load_profiles(edgelb::test::fixture("profiles.json"));
  CHECK(table.num_pairs() == 5);
  CHECK(table.entries().size() == 25);

  auto mean = [&](std::size_t p, double ProfileEntry::*f) {
    double s = 0;
    for (auto g : Group::all()) s += table.entry(p, g).*f;
    return s / kNumGroups;
  };
  const auto jetson_ssd = table.pair_index("jetson_ssdv1");
  const auto tpu_ssd = table.pair_index("p5tpu_ssdv1");
  const auto aihat = table.pair_index("aihat_yolov8s");
  for (std::size_t p = 0; p < table.num_pairs(); ++p) {
    if (p != jetson_ssd) CHECK(mean(jetson_ssd, &ProfileEntry::energy_mwh) < mean(p, &ProfileEntry::energy_mwh));
    if (p != tpu_ssd) CHECK(mean(tpu_ssd, &ProfileEntry::inference_time_ms) < mean(p, &ProfileEntry::inference_time_ms));
  }
  CHECK(table.entry(aihat, Group{3}).map == best_map(table, Group{3}));
  CHECK(table.entry(aihat, Group{4}).map == best_map(table, Group{4}));
  for (std::size_t p = 0; p < table.num_pairs(); ++p) {
    CHECK(table.entry(p, Group{0}).map == 1.0);
  }
}

TEST_CASE("minimal single-pair file yields five entries") {
  const auto table = load_profiles(edgelb::test::fixture("minimal_profiles.json"));
  CHECK(table.num_pairs() == 1);
  CHECK(table.entries().size() == 5);
}

TEST_CASE("missing cell names pair and group") {
  try {
    parse_profiles(profile_doc(entries_except("pairA", 3)));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("pairA") != std::string::npos);
    CHECK(msg.find("group 3") != std::string::npos);
  }
}

TEST_CASE("profile validation errors") {
  const std::string ok_entries = entries_except("", -1);
  CHECK_NOTHROW(parse_profiles(profile_doc(ok_entries)));

  SUBCASE("duplicate cell") {
    std::string dup = ok_entries;
    dup.insert(dup.size() - 1, R"(,{"pair_id":"pairA","group":0,"inference_time_ms":1,"energy_mwh":0,"map":0})");
    CHECK_THROWS_AS(parse_profiles(profile_doc(dup)), ValidationError);
  }
  SUBCASE("duplicate pair id") {
    const std::string pairs = R"([{"pair_id":"pairA","device":"a","model":"b","runtime":"c"},
                                  {"pair_id":"pairA","device":"x","model":"y","runtime":"z"}])";
    CHECK_THROWS_AS(parse_profiles(profile_doc(ok_entries, pairs)), ValidationError);
  }
  SUBCASE("duplicate device/model/runtime") {
    const std::string pairs = R"([{"pair_id":"pairA","device":"a","model":"b","runtime":"c"},
                                  {"pair_id":"pairB","device":"a","model":"b","runtime":"c"}])";
    CHECK_THROWS_AS(parse_profiles(profile_doc(ok_entries, pairs)), ValidationError);
  }
  SUBCASE("out-of-range values") {
    for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{
             {R"("inference_time_ms":10)", R"("inference_time_ms":0)"},
             {R"("energy_mwh":0.1)", R"("energy_mwh":-0.1)"},
             {R"("map":0.5)", R"("map":1.5)"},
             {R"("group":4)", R"("group":5)"}}) {
      std::string bad = ok_entries;
      bad.replace(bad.find(from), from.size(), to);
      CHECK_THROWS_AS(parse_profiles(profile_doc(bad)), ValidationError);
    }
  }
  SUBCASE("unknown pair in entries") {
    std::string bad = ok_entries;
    bad.insert(bad.size() - 1, R"(,{"pair_id":"ghost","group":0,"inference_time_ms":1,"energy_mwh":0,"map":0})");
    CHECK_THROWS_AS(parse_profiles(profile_doc(bad)), ValidationError);
  }
  SUBCASE("schema version") {
    std::string doc = profile_doc(ok_entries);
    doc.replace(doc.find("\"schema_version\":1"), 18, "\"schema_version\":2");
    CHECK_THROWS_AS(parse_profiles(doc), ValidationError);
  }
  SUBCASE("malformed") {
    CHECK_THROWS_AS(parse_profiles("{not json"), ParseError);
    CHECK_THROWS_AS(parse_profiles(R"({"schema_version":1,"pairs":{},"entries":[]})"), ParseError);
    CHECK_THROWS_AS(parse_profiles(profile_doc(R"([{"pair_id":"pairA","group":"one"}])")), ParseError);
  }
  SUBCASE("empty pair list") {
    CHECK_THROWS_AS(parse_profiles(R"({"schema_version":1,"pairs":[],"entries":[]})"), ValidationError);
  }
  CHECK_THROWS_AS(load_profiles("/nonexistent/profiles.json"), ParseError);
}

TEST_CASE("best_map") {
  // Linear-scan oracle for the three-pair example.
  const std::vector<double> maps = {0.50, 0.80, 0.70};
  const double oracle = *std::max_element(maps.begin(), maps.end());
  const auto table = make_table({flat("A", 10, 0.05, 0.50), flat("B", 40, 0.30, 0.80), flat("C", 20, 0.10, 0.70)});
  CHECK(best_map(table, Group{2}) == oracle);
  CHECK(oracle == 0.80);

  CHECK(best_map(make_table({flat("solo", 1, 0, 0.33)}), Group{1}) == 0.33);
  CHECK(best_map(make_table({flat("A", 1, 0, 0.6), flat("B", 2, 0, 0.6)}), Group{4}) == 0.6);
}

TEST_CASE("accuracy_threshold") {
  const auto table = make_table({flat("A", 10, 0.05, 0.50), flat("B", 40, 0.30, 0.80), flat("C", 20, 0.10, 0.70)});
  CHECK(accuracy_threshold(table, Group{1}, 0.15) == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(accuracy_threshold(table, Group{1}, 0.0) == best_map(table, Group{1}));
  const auto low = make_table({flat("A", 10, 0.05, 0.50)});
  CHECK(accuracy_threshold(low, Group{0}, 1.0) == doctest::Approx(-0.50));
  CHECK_THROWS_AS(accuracy_threshold(table, Group{0}, -0.01), InvalidArgument);
}

TEST_CASE("threshold properties over random tables") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> delta(0.0, 1.5);
  for (int iter = 0; iter < 300; ++iter) {
    const auto table = make_table(edgelb::test::random_pairs(rng, 1 + iter % 8));
    for (auto g : Group::all()) {
      const double d1 = delta(rng);
      const double d2 = d1 + 0.01 + delta(rng);
      const double t1 = accuracy_threshold(table, g, d1);
      CHECK(accuracy_threshold(table, g, d2) < t1);
      const double best = best_map(table, g);
      for (std::size_t p = 0; p < table.num_pairs(); ++p) {
        if (table.entry(p, g).map == best) CHECK(table.entry(p, g).map >= t1);
      }
    }
  }
}

TEST_CASE("profile serialization round-trips") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 50; ++iter) {
    const auto table = make_table(edgelb::test::random_pairs(rng, 1 + iter % 6));
    CHECK(parse_profiles(serialize_profiles(table)) == table);
  }
}

TEST_CASE("node registry") {
  const auto table = make_table({flat("A", 10, 0.05, 0.5), flat("B", 40, 0.3, 0.8)});
  SUBCASE("replicas are allowed") {
    const auto reg = parse_nodes(
        R"({"schema_version":1,"nodes":[{"node_id":"n1","pair_id":"A"},{"node_id":"n2","pair_id":"A"}]})", table);
    CHECK(reg.size() == 2);
    CHECK(reg[1].pair_index == 0);
    CHECK(reg.hosts(0));
    CHECK_FALSE(reg.hosts(1));
    CHECK(parse_nodes(serialize_nodes(reg), table).nodes() == reg.nodes());
  }
  SUBCASE("unknown pair") {
    CHECK_THROWS_AS(parse_nodes(R"({"schema_version":1,"nodes":[{"node_id":"n1","pair_id":"Z"}]})", table),
                    ValidationError);
  }
  SUBCASE("duplicate node id") {
    CHECK_THROWS_AS(parse_nodes(R"({"schema_version":1,"nodes":[{"node_id":"n1","pair_id":"A"},
                                                                 {"node_id":"n1","pair_id":"B"}]})",
                                table),
                    ValidationError);
  }
  SUBCASE("empty or unversioned") {
    CHECK_THROWS_AS(parse_nodes(R"({"schema_version":1,"nodes":[]})", table), ValidationError);
    CHECK_THROWS_AS(parse_nodes(R"({"nodes":[{"node_id":"n1","pair_id":"A"}]})", table), ValidationError);
  }
  SUBCASE("fixture") {
    const auto fixture_table = load_profiles(edgelb::test::fixture("profiles.json"));
    const auto reg = load_nodes(edgelb::test::fixture("nodes.json"), fixture_table);
    CHECK(reg.size() == 5);
  }
}

TEST_CASE("group range") {
  CHECK_THROWS_AS(Group{5}, InvalidArgument);
  CHECK_THROWS_AS(Group{-1}, InvalidArgument);
  CHECK(Group{4}.index() == 4);
}
