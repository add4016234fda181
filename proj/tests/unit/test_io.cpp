#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "formulations/formulations.hpp"
#include "io/io.hpp"
#include "support/random_instances.hpp"
#include "verify/verify.hpp"

using namespace fjspth;

#ifndef FJSPTH_SOURCE_DIR
#error "FJSPTH_SOURCE_DIR must point at the repository root"
#endif

namespace {

const std::string kRoot = FJSPTH_SOURCE_DIR;

FlexibleJobShop parse_fjs(const std::string& text) {
  std::istringstream in(text);
  return parse_flexible_jobshop(in);
}

FlexibleJobShop load_fjs(const std::string& rel) {
  std::istringstream in(read_text_file(kRoot + "/" + rel));
  return parse_flexible_jobshop(in);
}

std::vector<std::vector<Time>> load_layout(const std::string& rel) {
  std::istringstream in(read_text_file(kRoot + "/" + rel));
  return parse_layout(in);
}

GenConfig medium_la01(std::uint64_t seed) {
  GenConfig g;
  g.base = load_fjs("data/hu/sdata/la01.fjs");
  g.zones = 2;
  g.transbots = 2;
  g.seed = seed;
  g.scale = Scale::Medium;
  return g;
}

GenConfig small_demo(std::uint64_t seed, int zones = 2, int transbots = 2) {
  GenConfig g;
  g.base = load_fjs("data/examples/demo4.fjs");
  g.layout = load_layout("data/layouts/layout_4m.txt");
  g.zones = zones;
  g.transbots = transbots;
  g.seed = seed;
  return g;
}

}  // namespace

TEST_SUITE("instance_io") {
  TEST_CASE("flexible job shop parsing") {
    const auto la01 = load_fjs("data/hu/sdata/la01.fjs");
    CHECK(la01.machine_count == 5);
    REQUIRE(la01.jobs.size() == 10);
    for (const auto& job : la01.jobs) {
      CHECK(job.size() == 5);
      for (const auto& op : job) CHECK(op.size() == 1);
    }
    // First line: "5 1 2 21 1 1 53 ..." -> machine 2 (0-based 1) for 21.
    CHECK(la01.jobs[0][0][0] == Alternative{1, 21});
    CHECK(la01.jobs[0][1][0] == Alternative{0, 53});

    const auto two = parse_fjs("2 3\n2 2 1 4 3 5 1 2 7\n1 1 3 2\n");
    REQUIRE(two.jobs.size() == 2);
    CHECK(two.jobs[0][0] == std::vector<Alternative>{{0, 4}, {2, 5}});
    CHECK(two.jobs[0][1] == std::vector<Alternative>{{1, 7}});
    CHECK(two.jobs[1][0] == std::vector<Alternative>{{2, 2}});
  }

  TEST_CASE("flexible job shop parse errors") {
    CHECK_THROWS_AS(parse_fjs(""), ParseError);
    CHECK_THROWS_AS(parse_fjs("1 2\n1 1 1"), ParseError);           // truncated
    CHECK_THROWS_AS(parse_fjs("1 2\n1 1 x 3\n"), ParseError);       // non-integer
    CHECK_THROWS_AS(parse_fjs("1 2\n1 1 3 3\n"), ParseError);       // machine out of range
    CHECK_THROWS_AS(parse_fjs("1 2\n1 0\n"), ParseError);           // no alternatives
    CHECK_THROWS_AS(parse_fjs("1 2\n1 2 1 3 1 4\n"), ParseError);   // machine twice
    CHECK_THROWS_AS(parse_fjs("1 2\n1 1 1 3\n9\n"), ParseError);    // trailing data
    CHECK_THROWS_AS(parse_fjs("1 2\n1 1 1 0\n"), ParseError);       // zero processing time
  }

  TEST_CASE("layout parsing") {
    std::istringstream ok("2\n0 3\n3 0\n");
    CHECK(parse_layout(ok) == std::vector<std::vector<Time>>{{0, 3}, {3, 0}});
    std::istringstream short_rows("3\n0 1 2\n1 0\n");
    CHECK_THROWS_AS(parse_layout(short_rows), ParseError);
    std::istringstream negative("2\n0 -1\n1 0\n");
    CHECK_THROWS_AS(parse_layout(negative), ParseError);
  }

  TEST_CASE("generator zones machines and transbots cyclically") {
    for (int zones = 1; zones <= 4; ++zones)
      for (int bots = zones; bots <= 6; ++bots) {
        auto g = medium_la01(3);
        g.zones = zones;
        g.transbots = bots;
        const Instance inst = generate_instance(g);
        CHECK(validate_instance(inst).empty());
        for (MachineId m : inst.machines()) CHECK(inst.zone_of_machine(m) == m % zones);
        for (const auto& v : inst.transbots) {
          CHECK(v.zone == v.id % zones);
          CHECK(v.initial_station == inst.stocker());
        }
      }
    // 8 machines, 2 zones -> alternating pattern.
    FlexibleJobShop eight;
    eight.machine_count = 8;
    eight.jobs = {{{{7, 3}}}};
    GenConfig g;
    g.base = eight;
    g.zones = 2;
    g.transbots = 2;
    g.scale = Scale::Medium;
    const Instance inst = generate_instance(g);
    for (int m = 0; m < 8; ++m) CHECK(inst.zone_of_machine(m) == m % 2);
  }

  TEST_CASE("medium scale travel times") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Instance inst = generate_instance(medium_la01(seed));
      const auto& t = inst.travel;
      REQUIRE(t.size() == 7);
      for (std::size_t a = 0; a < t.size(); ++a)
        for (std::size_t b = 0; b < t.size(); ++b) {
          CHECK(t[a][b] == t[b][a]);
          if (a == b) CHECK(t[a][b] == 0);
          else CHECK((t[a][b] >= 20 && t[a][b] <= 40));
        }
    }
  }

  TEST_CASE("small scale keeps the layout and adds the handoff point") {
    const auto layout = load_layout("data/layouts/layout_4m.txt");
    std::set<Time> handoff_values;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const Instance inst = generate_instance(small_demo(seed));
      const int m = inst.machine_count();
      const StationId lu = inst.stocker(), h = inst.handoff();
      auto layout_index = [&](StationId s) { return s == lu ? 0 : s + 1; };
      for (StationId a = 0; a < m + 2; ++a)
        for (StationId b = 0; b < m + 2; ++b) {
          CHECK(inst.travel[a][b] == inst.travel[b][a]);
          if (a == h || b == h) {
            if (a == b) {
              CHECK(inst.travel[a][b] == 0);
            } else {
              CHECK((inst.travel[a][b] >= 2 && inst.travel[a][b] <= 8));
              handoff_values.insert(inst.travel[a][b]);
            }
          } else {
            CHECK(inst.travel[a][b] == layout[layout_index(a)][layout_index(b)]);
          }
        }
    }
    CHECK(handoff_values.size() == 7);  // every value in [2, 8] shows up
  }

  TEST_CASE("generator determinism and seed sensitivity") {
    const auto a = serialize_instance(generate_instance(medium_la01(42)));
    const auto b = serialize_instance(generate_instance(medium_la01(42)));
    CHECK(a == b);
    CHECK(a != serialize_instance(generate_instance(medium_la01(43))));
  }

  TEST_CASE("generator matches the golden files") {
    CHECK(serialize_instance(generate_instance(medium_la01(1))) ==
          read_text_file(kRoot + "/tests/golden/la01_medium_z2_v2_s1.txt"));
    CHECK(serialize_instance(generate_instance(small_demo(7))) ==
          read_text_file(kRoot + "/tests/golden/demo4_small_z2_v2_s7.txt"));
  }

  TEST_CASE("the standard engine is pinned") {
    std::mt19937_64 rng(5489u);
    std::uint64_t x = 0;
    for (int i = 0; i < 10000; ++i) x = rng();
    CHECK(x == 9981545732273789042ULL);
  }

  TEST_CASE("generator configuration errors") {
    auto g = medium_la01(1);
    g.zones = 4;
    CHECK_THROWS_AS(generate_instance(g), ConfigError);  // fewer transbots than zones
    g = medium_la01(1);
    g.zones = 0;
    CHECK_THROWS_AS(generate_instance(g), ConfigError);
    g = medium_la01(1);
    g.layout_range = {30, 20};
    CHECK_THROWS_AS(generate_instance(g), ConfigError);
    auto s = small_demo(1);
    s.layout.reset();
    CHECK_THROWS_AS(generate_instance(s), ConfigError);
    s = small_demo(1);
    s.layout->pop_back();
    CHECK_THROWS_AS(generate_instance(s), ConfigError);
  }

  TEST_CASE("instance text round trip") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Instance inst = testing::random_tiny_instance(seed);
      const std::string text = serialize_instance(inst);
      CHECK(parse_instance(text) == inst);
      CHECK(serialize_instance(parse_instance(text)) == text);
    }
    const Instance la = generate_instance(medium_la01(9));
    CHECK(parse_instance(serialize_instance(la)) == la);
  }

  TEST_CASE("instance parse errors") {
    const std::string good = serialize_instance(fixture_tiny1());
    CHECK_THROWS_AS(parse_instance(std::string("FJSPTH-INSTANCE 2\n")), ParseError);
    std::string missing = good.substr(0, good.find("TRAVEL"));
    CHECK_THROWS_WITH_AS(parse_instance(missing), doctest::Contains("missing section TRAVEL"), ParseError);
    std::string bad_kind = good;
    bad_kind.replace(bad_kind.find("STOCKER"), 7, "DEPOT");
    CHECK_THROWS_AS(parse_instance(bad_kind), ParseError);
    std::string bad_travel = good;
    bad_travel.replace(bad_travel.rfind("3 4 1 0"), 7, "3 4 1 9");  // nonzero diagonal
    CHECK_THROWS_AS(parse_instance(bad_travel), ParseError);
  }

  TEST_CASE("schedule text round trip and errors") {
    const Instance inst = fixture_tiny1();
    const auto result = brute_force_optimal(inst);
    const std::string text = serialize_schedule(inst, result.schedule);
    CHECK(parse_schedule(inst, text) == result.schedule);
    CHECK(text.find("MAKESPAN 20") != std::string::npos);

    std::string unknown_op = text;
    unknown_op.replace(unknown_op.find("0 1 1 14 20"), 11, "0 7 1 14 20");
    CHECK_THROWS_AS(parse_schedule(inst, unknown_op), ParseError);
    std::string unknown_leg = text;
    unknown_leg.replace(unknown_leg.find("1 5 1 10 14"), 11, "1 9 1 10 14");
    CHECK_THROWS_AS(parse_schedule(inst, unknown_leg), ParseError);
    CHECK_THROWS_AS(parse_schedule(inst, std::string("FJSPTH-SCHEDULE 1\nMAKESPAN 1\n")), ParseError);

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const Instance r = testing::random_tiny_instance(seed);
      const auto opt = brute_force_optimal(r);
      CHECK(parse_schedule(r, serialize_schedule(r, opt.schedule)) == opt.schedule);
    }
  }

  TEST_CASE("file helpers") {
    CHECK_THROWS_AS(read_text_file(kRoot + "/no/such/file"), IoError);
    CHECK_THROWS_AS(write_text_file(kRoot + "/no/such/dir/file", "x"), IoError);
  }
}
