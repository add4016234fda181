#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "routing/routing.hpp"
#include "support/random_instances.hpp"
#include "verify/verify.hpp"

using namespace fjspth;

TEST_SUITE("routing") {
  TEST_CASE("arc decomposition on the tiny fixture") {
    const Instance inst = fixture_tiny1();  // M1=0 (zone 0), M2=1 (zone 1), L/U=2, H=3
    SUBCASE("same station has no legs") {
      const auto a = decompose_arc(inst, 0, 0);
      CHECK(a.legs.empty());
      CHECK(a.total_travel == 0);
    }
    SUBCASE("stocker pickup is one leg in the drop-off zone") {
      const auto a = decompose_arc(inst, 2, 1);
      REQUIRE(a.legs.size() == 1);
      CHECK(a.legs[0].pickup == 2);
      CHECK(a.legs[0].dropoff == 1);
      CHECK(a.legs[0].zone == 1);
      CHECK(a.legs[0].travel == 5);
      CHECK(a.legs[0].id == -1);
    }
    SUBCASE("cross-zone transfer goes through the handoff point") {
      const auto a = decompose_arc(inst, 0, 1);
      REQUIRE(a.legs.size() == 2);
      CHECK(a.legs[0].pickup == 0);
      CHECK(a.legs[0].dropoff == 3);
      CHECK(a.legs[0].zone == 0);
      CHECK(a.legs[0].position == 1);
      CHECK(a.legs[1].pickup == 3);
      CHECK(a.legs[1].dropoff == 1);
      CHECK(a.legs[1].zone == 1);
      CHECK(a.legs[1].position == 2);
      CHECK(a.total_travel == 3 + 4);
    }
    SUBCASE("invalid endpoints") {
      CHECK_THROWS_AS(decompose_arc(inst, 0, 2), std::invalid_argument);
      CHECK_THROWS_AS(decompose_arc(inst, 3, 1), std::invalid_argument);
      CHECK_THROWS_AS(decompose_arc(inst, 0, 9), std::invalid_argument);
    }
  }

  TEST_CASE("same-zone machines are one leg apart") {
    testing::TinyShape shape;
    shape.min_machines = shape.max_machines = 3;
    const Instance inst = testing::random_tiny_instance(5, shape);  // machines 0 and 2 share zone 0
    const auto a = decompose_arc(inst, 0, 2);
    REQUIRE(a.legs.size() == 1);
    CHECK(a.legs[0].zone == 0);
    CHECK(a.total_travel == inst.travel[0][2]);
  }

  TEST_CASE("leg table ids on the tiny fixture") {
    // Legs sorted by (pickup, dropoff): M1->H, M2->H, L->M1, L->M2, H->M1, H->M2.
    const LegTable table(fixture_tiny1());
    REQUIRE(table.legs().size() == 6);
    const std::vector<std::pair<StationId, StationId>> want{{0, 3}, {1, 3}, {2, 0}, {2, 1}, {3, 0}, {3, 1}};
    for (int id = 0; id < 6; ++id) {
      CHECK(table.leg(id).id == id);
      CHECK(std::pair{table.leg(id).pickup, table.leg(id).dropoff} == want[id]);
    }
    const auto& cross = table.arc(0, 1);
    REQUIRE(cross.legs.size() == 2);
    CHECK(cross.legs[0].id == 0);
    CHECK(cross.legs[1].id == 5);
    CHECK(table.arc(2, 0).legs.at(0).id == 2);
  }

  TEST_CASE("leg table properties on random instances") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const Instance inst = testing::random_tiny_instance(seed);
      const LegTable table(inst);
      const auto& legs = table.legs();
      for (std::size_t i = 0; i < legs.size(); ++i) CHECK(legs[i].id == static_cast<int>(i));
      CHECK(std::is_sorted(legs.begin(), legs.end(), [](const Leg& a, const Leg& b) {
        return std::tie(a.pickup, a.dropoff, a.position, a.arc_pickup, a.arc_dropoff) <
               std::tie(b.pickup, b.dropoff, b.position, b.arc_pickup, b.arc_dropoff);
      }));
      const StationId stocker = inst.stocker();
      for (MachineId to : inst.machines()) {
        std::vector<StationId> froms = inst.machines();
        froms.push_back(stocker);
        for (StationId from : froms) {
          const ArcSpec raw = decompose_arc(inst, from, to);
          const ArcSpec& arc = table.arc(from, to);
          REQUIRE(arc.legs.size() == raw.legs.size());
          Time sum = 0;
          for (std::size_t k = 0; k < arc.legs.size(); ++k) {
            Leg plain = arc.legs[k];
            plain.id = -1;
            CHECK(plain == raw.legs[k]);
            CHECK(table.leg(arc.legs[k].id) == arc.legs[k]);
            sum += inst.travel[arc.legs[k].pickup][arc.legs[k].dropoff];
            // Legs touching a machine belong to its zone.
            const StationId anchor = inst.is_machine(arc.legs[k].pickup) ? arc.legs[k].pickup : arc.legs[k].dropoff;
            CHECK(arc.legs[k].zone == *inst.stations[anchor].zone);
          }
          CHECK(arc.total_travel == sum);
          const bool same_zone = from != stocker && inst.zone_of_machine(from) == inst.zone_of_machine(to);
          const std::size_t want = from == to ? 0 : (from == stocker || same_zone ? 1 : 2);
          CHECK(arc.legs.size() == want);
        }
      }
    }
  }

  TEST_CASE("viable arcs per operation") {
    const Instance inst = testing::random_tiny_instance(11);
    for (const auto& op : inst.operations) {
      const auto arcs = enumerate_arcs(inst, op.id);
      const auto pred = predecessor(inst, op.id);
      const std::size_t want =
          op.eligibility.size() * (pred ? inst.operation(*pred).eligibility.size() : std::size_t{1});
      CHECK(arcs.size() == want);
      for (const auto& a : arcs) {
        CHECK(op.eligible(a.dropoff));
        if (pred) CHECK(inst.operation(*pred).eligible(a.pickup));
        else CHECK(a.pickup == inst.stocker());
      }
    }
  }

  TEST_CASE("leg transition matrix charges drop-off to pickup travel") {
    const Instance inst = testing::random_tiny_instance(3);
    const LegTable table(inst);
    const auto& legs = table.legs();
    const auto t = build_leg_matrix(inst, legs);
    REQUIRE(t.size() == static_cast<int>(legs.size()));
    for (const auto& a : legs)
      for (const auto& b : legs) CHECK(t.at(a.id, b.id) == inst.travel[a.dropoff][b.pickup]);
    std::vector<Leg> dup{legs[0], legs[0]};
    CHECK_THROWS_AS(build_leg_matrix(inst, dup), std::invalid_argument);
    std::vector<Leg> bad{legs[0]};
    bad[0].id = 999;
    CHECK_THROWS_AS(build_leg_matrix(inst, bad), std::invalid_argument);
  }
}
