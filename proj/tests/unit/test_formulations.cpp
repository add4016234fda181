#include <doctest.h>

#include <set>

#include "formulations/formulations.hpp"
#include "support/model_check.hpp"
#include "support/random_instances.hpp"
#include "verify/verify.hpp"

using namespace fjspth;

namespace {

struct Solved {
  cp::SolveReport report;
  std::optional<Schedule> schedule;
};

Solved solve_plain(const Instance& inst, Formulation f, const BuildOptions& options = {},
                   std::vector<cp::WarmStartValue> warm = {}) {
  const auto built = build_model(inst, f, options);
  cp::SolverConfig c;
  c.time_limit = 60;
  c.warm_start = std::move(warm);
  Solved s{cp::solve(built.model, c), std::nullopt};
  if (s.report.incumbent) {
    CHECK(testing::check_assignment(built.model, *s.report.incumbent).empty());
    if (f != Formulation::Relaxation) s.schedule = extract_schedule(inst, built.vars, *s.report.incumbent);
  }
  return s;
}

// Leg count of a transfer, straight from the zoning rules.
int leg_count(const Instance& inst, StationId from, MachineId to) {
  if (from == to) return 0;
  if (from == inst.stocker() || inst.zone_of_machine(from) == inst.zone_of_machine(to)) return 1;
  return 2;
}

// Transbots able to carry the legs of from -> to, one entry per leg.
std::vector<long> bots_per_leg(const Instance& inst, StationId from, MachineId to) {
  auto bots = [&](ZoneId z) { return static_cast<long>(inst.transbots_in_zone(z).size()); };
  switch (leg_count(inst, from, to)) {
    case 0: return {};
    case 1: return {bots(inst.zone_of_machine(to))};
    default: return {bots(inst.zone_of_machine(from)), bots(inst.zone_of_machine(to))};
  }
}

// Table of closed forms: |O|, sum |M_o|, sum |A_o|, sum over op legs of |V_z|,
// |M|, |V|.
VariableCounts expected_counts(const Instance& inst, Formulation f) {
  VariableCounts c;
  const long ops = static_cast<long>(inst.operations.size());
  c.y_o = ops;
  c.w_m = inst.machine_count();
  if (f != Formulation::Relaxation) {
    c.x_o = ops;
    c.w_v = static_cast<long>(inst.transbots.size());
  }
  for (const auto& op : inst.operations) {
    const auto pred = predecessor(inst, op.id);
    std::vector<StationId> froms;
    if (pred)
      for (const auto& alt : inst.operation(*pred).eligibility) froms.push_back(alt.machine);
    else
      froms.push_back(inst.stocker());
    long arcs = 0, legs = 0;
    for (StationId from : froms)
      for (const auto& alt : op.eligibility) {
        ++arcs;
        for (long b : bots_per_leg(inst, from, alt.machine)) legs += b;
      }
    switch (f) {
      case Formulation::Arc:
        c.y_m += static_cast<long>(op.eligibility.size());
        c.x_oa += arcs;
        c.x_olv += legs;
        break;
      case Formulation::Embedded:
        c.y_a += arcs;
        c.x_lv += legs;
        break;
      case Formulation::Relaxation:
        c.y_m += static_cast<long>(op.eligibility.size());
        break;
    }
  }
  return c;
}

void check_counts(const Instance& inst) {
  for (Formulation f : {Formulation::Arc, Formulation::Embedded, Formulation::Relaxation}) {
    const auto got = count_variables(build_model(inst, f).vars);
    const auto want = expected_counts(inst, f);
    CAPTURE(to_string(f));
    CHECK(got.x_o == want.x_o);
    CHECK(got.y_o == want.y_o);
    CHECK(got.y_m == want.y_m);
    CHECK(got.x_oa == want.x_oa);
    CHECK(got.x_olv == want.x_olv);
    CHECK(got.y_a == want.y_a);
    CHECK(got.x_lv == want.x_lv);
    CHECK(got.w_m == want.w_m);
    CHECK(got.w_v == want.w_v);
  }
}

}  // namespace

TEST_SUITE("formulations") {
  TEST_CASE("tiny fixture: both formulations reach the oracle optimum") {
    const Instance inst = fixture_tiny1();
    for (Formulation f : {Formulation::Arc, Formulation::Embedded}) {
      const auto s = solve_plain(inst, f);
      CHECK(s.report.status == cp::SolveStatus::Optimal);
      CHECK(s.report.objective == 20);
      REQUIRE(s.schedule);
      CHECK(s.schedule->makespan == 20);
      CHECK(validate_schedule(inst, *s.schedule).empty());
      CHECK(s.schedule->transfers[0].size() == 1);
      CHECK(s.schedule->transfers[1].size() == 2);
    }
    const auto relax = solve_plain(inst, Formulation::Relaxation);
    CHECK(relax.report.objective == 11);
  }

  TEST_CASE("variable counts follow the closed forms") {
    check_counts(fixture_tiny1());
    for (std::uint64_t seed = 0; seed < 40; ++seed) check_counts(testing::random_tiny_instance(seed));
    testing::TinyShape wide;
    wide.max_operations = 8;
    wide.max_machines = 4;
    wide.max_transbots = 5;
    for (std::uint64_t seed = 0; seed < 20; ++seed) check_counts(testing::random_tiny_instance(seed, wide));
  }

  TEST_CASE("tiny fixture model sizes") {
    const auto arc = count_variables(build_arc_model(fixture_tiny1()).vars);
    CHECK(arc.x_oa == 2);   // L/U->M1, M1->M2
    CHECK(arc.x_olv == 3);  // one leg plus two legs, one bot each
    CHECK(arc.y_m == 2);
    const auto emb = count_variables(build_embedded_model(fixture_tiny1()).vars);
    CHECK(emb.y_a == 2);
    CHECK(emb.x_lv == 3);
  }

  TEST_CASE("embedded arcs are the product of neighbouring eligibilities") {
    Instance inst = fixture_tiny1();
    // Three machines: predecessor may use M1 or M2, the operation only M3.
    inst.stations = {{0, StationKind::Machine, 0}, {1, StationKind::Machine, 1}, {2, StationKind::Machine, 0},
                     {3, StationKind::Stocker, std::nullopt}, {4, StationKind::Handoff, std::nullopt}};
    inst.zones = {{0, {0, 2}, {0}}, {1, {1}, {1}}};
    inst.transbots = {{0, 0, 3, 1}, {1, 1, 3, 1}};
    inst.operations[0].eligibility = {{0, 5}, {1, 4}};
    inst.operations[1].eligibility = {{2, 6}};
    inst.travel.assign(5, std::vector<Time>(5, 3));
    for (int i = 0; i < 5; ++i) inst.travel[i][i] = 0;
    REQUIRE(validate_instance(inst).empty());
    const auto built = build_embedded_model(inst);
    CHECK(built.vars.ops[1].arcs.size() == 2);
  }

  TEST_CASE("consecutive operations on one machine need no transfer") {
    Instance inst = fixture_tiny1();
    inst.operations[1].eligibility = {{0, 6}};
    REQUIRE(validate_instance(inst).empty());
    for (Formulation f : {Formulation::Arc, Formulation::Embedded}) {
      const auto s = solve_plain(inst, f);
      REQUIRE(s.schedule);
      CHECK(s.schedule->transfers[1].empty());
      CHECK(s.schedule->makespan == 2 + 5 + 6);
      CHECK(validate_schedule(inst, *s.schedule).empty());
    }
  }

  TEST_CASE("three-way agreement with the oracle on random instances") {
    for (std::uint64_t seed = 100; seed < 160; ++seed) {
      const Instance inst = testing::random_tiny_instance(seed);
      const auto oracle = brute_force_optimal(inst);
      const auto relax = solve_plain(inst, Formulation::Relaxation);
      for (Formulation f : {Formulation::Arc, Formulation::Embedded}) {
        const auto s = solve_plain(inst, f);
        CAPTURE(seed);
        CAPTURE(to_string(f));
        CHECK(s.report.status == cp::SolveStatus::Optimal);
        CHECK(s.report.objective == oracle.makespan);
        REQUIRE(s.schedule);
        CHECK(validate_schedule(inst, *s.schedule).empty());
      }
      CHECK(relax.report.objective <= oracle.makespan);
    }
  }

  TEST_CASE("initial deadhead can be switched off consistently") {
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
      const Instance inst = testing::random_tiny_instance(seed);
      OracleLimits limits;
      limits.initial_deadhead = false;
      const auto oracle = brute_force_optimal(inst, limits);
      const auto with = brute_force_optimal(inst);
      CHECK(oracle.makespan <= with.makespan);
      for (Formulation f : {Formulation::Arc, Formulation::Embedded}) {
        const auto s = solve_plain(inst, f, BuildOptions{false});
        CHECK(s.report.objective == oracle.makespan);
        REQUIRE(s.schedule);
        CHECK(validate_schedule(inst, *s.schedule, {false}).empty());
      }
    }
  }

  TEST_CASE("free travel makes the relaxation exact") {
    for (std::uint64_t seed = 300; seed < 330; ++seed) {
      Instance inst = testing::random_tiny_instance(seed);
      for (auto& row : inst.travel) std::fill(row.begin(), row.end(), 0);
      const auto relax = solve_plain(inst, Formulation::Relaxation);
      const auto full = solve_plain(inst, Formulation::Embedded);
      CHECK(relax.report.objective == full.report.objective);
    }
  }

  TEST_CASE("warm start from a known optimum") {
    const Instance inst = fixture_tiny1();
    const auto oracle = brute_force_optimal(inst);
    for (Formulation f : {Formulation::Arc, Formulation::Embedded}) {
      const auto cold = solve_plain(inst, f);
      const auto built = build_model(inst, f);
      const auto warm = solve_plain(inst, f, {}, warm_start_from_schedule(built.vars, oracle.schedule));
      CHECK(warm.report.warm_start_used);
      CHECK(warm.report.status == cp::SolveStatus::Optimal);
      CHECK(warm.report.objective == 20);
      CHECK(warm.report.nodes <= cold.report.nodes);
    }
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const Instance r = testing::random_tiny_instance(seed);
      const auto opt = brute_force_optimal(r);
      const auto built = build_arc_model(r);
      const auto warm = solve_plain(r, Formulation::Arc, {}, warm_start_from_schedule(built.vars, opt.schedule));
      CHECK(warm.report.warm_start_used);
      REQUIRE_FALSE(warm.report.trace.empty());
      CHECK(warm.report.trace.front().objective == opt.makespan);
    }
  }

  TEST_CASE("greedy transfer insertion yields valid schedules") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      testing::TinyShape shape;
      shape.max_operations = 8;
      const Instance inst = testing::random_tiny_instance(seed, shape);
      const auto relax_built = build_fjsp_relaxation(inst);
      cp::SolverConfig c;
      c.time_limit = 10;
      const auto rr = cp::solve(relax_built.model, c);
      REQUIRE(rr.incumbent);
      const auto relaxed = extract_schedule(inst, relax_built.vars, *rr.incumbent);
      std::vector<MachineId> machine_of;
      std::vector<Time> starts;
      for (const auto& a : relaxed.operations) {
        machine_of.push_back(a.machine);
        starts.push_back(a.start);
      }
      for (bool deadhead : {true, false}) {
        const auto g = greedy_schedule(inst, machine_of, starts, deadhead);
        REQUIRE(g);
        CHECK(validate_schedule(inst, *g, {deadhead}).empty());
        for (std::size_t o = 0; o < machine_of.size(); ++o) CHECK(g->operations[o].machine == machine_of[o]);
        CHECK(g->makespan <= horizon_bound(inst));
      }
    }
  }

  TEST_CASE("acceleration installs the relaxation bound") {
    const Instance inst = fixture_tiny1();
    AccelerationConfig ac;
    ac.solver.time_limit = 30;
    for (Formulation f : {Formulation::Arc, Formulation::Embedded}) {
      const auto out = solve_with_acceleration(inst, f, ac);
      CHECK(out.relaxation_bound == 11);
      CHECK(out.warm_start_built);
      CHECK(out.report.status == cp::SolveStatus::Optimal);
      REQUIRE(out.schedule);
      CHECK(out.schedule->makespan == 20);
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Instance r = testing::random_tiny_instance(seed);
      AccelerationConfig off = ac;
      off.relaxation = off.warm_start = false;
      const auto a = solve_with_acceleration(r, Formulation::Embedded, ac);
      const auto b = solve_with_acceleration(r, Formulation::Embedded, off);
      CHECK(a.report.objective == b.report.objective);
      CHECK(*a.relaxation_bound <= *a.report.objective);
      CHECK_FALSE(b.relaxation_bound.has_value());
    }
  }

  TEST_CASE("extraction rejects an assignment without machines") {
    const Instance inst = fixture_tiny1();
    const auto built = build_arc_model(inst);
    std::vector<cp::IntervalValue> empty(built.model.intervals().size());
    CHECK_THROWS_AS(extract_schedule(inst, built.vars, empty), std::logic_error);
  }

  TEST_CASE("builders reject invalid instances") {
    Instance inst = fixture_tiny1();
    inst.operations[0].eligibility.clear();
    CHECK_THROWS_AS(build_arc_model(inst), std::invalid_argument);
    CHECK_THROWS_AS(build_embedded_model(inst), std::invalid_argument);
    CHECK_THROWS_AS(build_fjsp_relaxation(inst), std::invalid_argument);
  }
}
