#include <doctest.h>

#include <algorithm>

#include "core/instance.hpp"
#include "core/schedule.hpp"
#include "support/random_instances.hpp"
#include "verify/verify.hpp"

using namespace fjspth;

namespace {

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(), [&](const auto& e) { return e.find(needle) != std::string::npos; });
}

}  // namespace

TEST_SUITE("core_model") {
  TEST_CASE("tiny fixture is a valid instance") {
    const Instance inst = fixture_tiny1();
    CHECK(validate_instance(inst).empty());
    CHECK(inst.machine_count() == 2);
    CHECK(inst.stocker() == 2);
    CHECK(inst.handoff() == 3);
    CHECK(inst.zone_of_machine(0) == 0);
    CHECK(inst.zone_of_machine(1) == 1);
    CHECK(inst.transbots_in_zone(1) == std::vector<TransbotId>{1});
    CHECK(inst.operation(1).processing_time(1) == 6);
    CHECK_FALSE(inst.operation(1).processing_time(0).has_value());
    CHECK(inst.operation(0).max_processing_time() == 5);
  }

  TEST_CASE("random tiny instances validate") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto errors = validate_instance(testing::random_tiny_instance(seed));
      CHECK_MESSAGE(errors.empty(), "seed ", seed);
    }
  }

  TEST_CASE("structural rules are enforced") {
    const Instance base = fixture_tiny1();
    SUBCASE("machine without zone") {
      Instance i = base;
      i.stations[0].zone.reset();
      CHECK(mentions(validate_instance(i), "has no zone"));
    }
    SUBCASE("zoned stocker") {
      Instance i = base;
      i.stations[2].zone = 0;
      CHECK(mentions(validate_instance(i), "carries a zone"));
    }
    SUBCASE("zone without transbots") {
      Instance i = base;
      i.zones[1].transbots.clear();
      i.transbots[1].zone = 0;
      i.zones[0].transbots.push_back(1);
      CHECK(mentions(validate_instance(i), "has no transbots"));
    }
    SUBCASE("second handoff point") {
      Instance i = base;
      i.stations.push_back({4, StationKind::Handoff, std::nullopt});
      for (auto& row : i.travel) row.push_back(1);
      i.travel.push_back(std::vector<Time>(5, 1));
      i.travel[4][4] = 0;
      CHECK(mentions(validate_instance(i), "exactly one handoff"));
    }
    SUBCASE("empty eligibility") {
      Instance i = base;
      i.operations[1].eligibility.clear();
      CHECK(mentions(validate_instance(i), "no eligible machine"));
    }
    SUBCASE("zero processing time") {
      Instance i = base;
      i.operations[0].eligibility[0].processing_time = 0;
      CHECK(mentions(validate_instance(i), "nonpositive processing"));
    }
    SUBCASE("order index out of sequence") {
      Instance i = base;
      i.operations[1].order_index = 3;
      CHECK(mentions(validate_instance(i), "order index"));
    }
    SUBCASE("nonzero diagonal and negative travel") {
      Instance i = base;
      i.travel[1][1] = 2;
      i.travel[0][3] = -1;
      const auto errors = validate_instance(i);
      CHECK(mentions(errors, "diagonal"));
      CHECK(mentions(errors, "negative"));
    }
    SUBCASE("ragged travel matrix") {
      Instance i = base;
      i.travel[2].pop_back();
      CHECK(mentions(validate_instance(i), "entries for"));
    }
    SUBCASE("capacity other than one") {
      Instance i = base;
      i.transbots[0].capacity = 2;
      CHECK(mentions(validate_instance(i), "capacity"));
    }
  }

  TEST_CASE("job neighbours") {
    const Instance inst = fixture_tiny1();
    CHECK_FALSE(predecessor(inst, 0).has_value());
    CHECK(predecessor(inst, 1) == 0);
    CHECK(successor(inst, 0) == 1);
    CHECK_FALSE(successor(inst, 1).has_value());
    CHECK_THROWS_AS(predecessor(inst, 7), std::out_of_range);
  }

  TEST_CASE("makespan is the latest operation end") {
    const Instance inst = fixture_tiny1();
    Schedule s;
    s.operations = {{0, 2, 7}, {1, 14, 20}};
    s.transfers.resize(2);
    s.transfers[1].push_back({0, 0, 3, 1, 0, 7, 30});  // transfers never count
    CHECK(compute_makespan(inst, s) == 20);
    s.operations.pop_back();
    CHECK_THROWS_AS(compute_makespan(inst, s), std::invalid_argument);
  }
}
