#include <doctest.h>

#include "cp/model.hpp"
#include "cp/solver.hpp"
#include "cp/store.hpp"
#include "formulations/formulations.hpp"
#include "support/model_check.hpp"
#include "support/random_instances.hpp"

using namespace fjspth;
using namespace fjspth::cp;

namespace {

SolverConfig quick(int workers = 1) {
  SolverConfig c;
  c.time_limit = 30;
  c.workers = workers;
  return c;
}

}  // namespace

TEST_SUITE("cp_engine") {
  TEST_CASE("chain with a no-overlap transition") {
    Model m(100);
    const auto a = m.add_interval("a", 3, false);
    const auto b = m.add_interval("b", 4, false);
    auto matrix = std::make_shared<TransitionMatrix>(2);
    matrix->at(0, 1) = 5;
    matrix->at(1, 0) = 1;
    m.add_no_overlap(m.add_sequence({a, b}, {0, 1}), matrix);
    m.minimize_max_end({a, b});
    const auto r = solve(m, quick());
    CHECK(r.status == SolveStatus::Optimal);
    CHECK(r.objective == 8);  // b first (4), +1, a (3)
    REQUIRE(r.incumbent);
    CHECK(testing::check_assignment(m, *r.incumbent).empty());
  }

  TEST_CASE("alternative picks the shorter option") {
    Model m(50);
    const auto master = m.add_interval("op", 2, 9, false);
    const auto slow = m.add_interval("slow", 9, true);
    const auto fast = m.add_interval("fast", 2, true);
    m.add_alternative(master, {slow, fast});
    m.minimize_max_end({master});
    const auto r = solve(m, quick());
    CHECK(r.status == SolveStatus::Optimal);
    CHECK(r.objective == 2);
    CHECK((*r.incumbent)[fast.value].present);
    CHECK_FALSE((*r.incumbent)[slow.value].present);
  }

  TEST_CASE("span covers its present members") {
    Model m(50);
    const auto span = m.add_interval("span", 0, 50, false);
    const auto a = m.add_interval("a", 3, false);
    const auto b = m.add_interval("b", 2, true);
    m.add_span(span, {a, b});
    m.add_end_before_start(a, b, 4);
    m.set_presence(b, true);
    m.minimize_max_end({span});
    const auto r = solve(m, quick());
    CHECK(r.objective == 9);
    CHECK((*r.incumbent)[span.value].start == 0);
    CHECK((*r.incumbent)[span.value].end == 9);
  }

  TEST_CASE("infeasible models") {
    SUBCASE("contradicting precedences") {
      Model m(100);
      const auto a = m.add_interval("a", 1, false);
      const auto b = m.add_interval("b", 1, false);
      m.add_end_before_start(a, b);
      m.add_end_before_start(b, a);
      CHECK(solve(m, quick()).status == SolveStatus::Infeasible);
      CHECK_FALSE(propagate_root(m).has_value());
    }
    SUBCASE("mandatory interval forced absent") {
      Model m(10);
      const auto a = m.add_interval("a", 1, false);
      m.set_presence(a, false);
      CHECK(solve(m, quick()).status == SolveStatus::Infeasible);
    }
    SUBCASE("does not fit the horizon") {
      Model m(5);
      const auto a = m.add_interval("a", 3, false);
      const auto b = m.add_interval("b", 3, false);
      m.add_no_overlap(m.add_sequence({a, b}));
      CHECK(solve(m, quick()).status == SolveStatus::Infeasible);
    }
    SUBCASE("presence sum with nothing available") {
      Model m(10);
      const auto a = m.add_interval("a", 1, false);
      const auto b = m.add_interval("b", 1, true);
      m.set_presence(b, false);
      m.add_presence_sum(a, {b}, SumRelation::Equal);
      CHECK(solve(m, quick()).status == SolveStatus::Infeasible);
    }
  }

  TEST_CASE("model errors") {
    Model m(10);
    const auto a = m.add_interval("a", 1, false);
    m.add_end_before_start(a, IntervalId{5});
    CHECK_THROWS_AS(m.check(), ModelError);
    CHECK_THROWS_AS(solve(m, quick()), ModelError);
    Model ok(10);
    ok.add_interval("a", 1, false);
    SolverConfig bad = quick();
    bad.workers = 0;
    CHECK_THROWS_AS(solve(ok, bad), std::invalid_argument);
  }

  TEST_CASE("solver optimum equals exhaustive enumeration on random models") {
    int feasible = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
      const Model m = testing::random_model(seed);
      const auto want = testing::brute_force_model(m);
      const auto r = solve(m, quick());
      if (!want) {
        CHECK_MESSAGE(r.status == SolveStatus::Infeasible, "seed ", seed);
        continue;
      }
      ++feasible;
      CHECK_MESSAGE(r.status == SolveStatus::Optimal, "seed ", seed);
      CHECK_MESSAGE(r.objective == want, "seed ", seed);
      REQUIRE(r.incumbent);
      const auto errors = testing::check_assignment(m, *r.incumbent);
      CHECK_MESSAGE(errors.empty(), "seed ", seed, ": ", errors.empty() ? "" : errors.front());
      CHECK(testing::objective_of(m, *r.incumbent) == *r.objective);
    }
    CHECK(feasible > 200);
  }

  TEST_CASE("propagation reaches a fixpoint") {
    auto idempotent = [](const Model& m) {
      Store s(m);
      s.schedule_all();
      if (!s.propagate()) return true;
      const auto first = s.domains();
      s.schedule_all();
      REQUIRE(s.propagate());
      return s.domains() == first;
    };
    for (std::uint64_t seed = 0; seed < 200; ++seed) CHECK_MESSAGE(idempotent(testing::random_model(seed)), seed);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const Instance inst = testing::random_tiny_instance(seed);
      CHECK(idempotent(build_arc_model(inst).model));
      CHECK(idempotent(build_embedded_model(inst).model));
    }
  }

  TEST_CASE("undo restores domains exactly") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Model m = testing::random_model(seed);
      Store s(m);
      s.schedule_all();
      if (!s.propagate()) continue;
      const auto before = s.domains();
      const auto mark = s.mark();
      for (int i = 0; i < s.size(); ++i) {
        const Domain& d = s.dom(i);
        if (d.fixed()) continue;
        if (!d.present()) {
          if (!s.set_present(i)) break;
        } else if (!s.set_smax(i, d.smin)) {
          break;
        }
        if (!s.propagate()) break;
      }
      s.undo(mark);
      CHECK(s.domains() == before);
    }
  }

  TEST_CASE("worker count does not change the optimum") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Instance inst = testing::random_tiny_instance(seed);
      const auto built = build_arc_model(inst);
      const auto one = solve(built.model, quick(1));
      for (int w : {2, 4}) {
        const auto many = solve(built.model, quick(w));
        CHECK(many.status == one.status);
        CHECK(many.objective == one.objective);
      }
    }
  }

  TEST_CASE("neighbourhood search leaves the optimum unchanged") {
    // Tiny fail limits force many restarts, each followed by LNS rounds.
    SolverConfig lns = quick();
    lns.initial_fail_limit = 2;
    lns.restart_growth = 1.2;
    lns.lns_fail_limit = 3;
    SolverConfig plain = lns;
    plain.lns = false;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const Instance inst = testing::random_tiny_instance(seed, {3, 5, 2, 3, 2, 2, 3, 9, 9});
      for (Formulation f : {Formulation::Arc, Formulation::Embedded}) {
        const auto built = build_model(inst, f);
        const auto a = solve(built.model, lns);
        const auto b = solve(built.model, plain);
        CHECK_MESSAGE(a.status == b.status, "seed ", seed);
        CHECK_MESSAGE(a.objective == b.objective, "seed ", seed);
        REQUIRE(a.incumbent);
        CHECK(testing::check_assignment(built.model, *a.incumbent).empty());
      }
    }
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const Model m = testing::random_model(seed);
      CHECK_MESSAGE(solve(m, lns).objective == testing::brute_force_model(m), "model seed ", seed);
    }
  }

  TEST_CASE("incumbent trace improves strictly") {
    const Instance inst = testing::random_tiny_instance(17, {3, 4, 3, 3, 2, 3, 3, 9, 9});
    const auto built = build_embedded_model(inst);
    const auto r = solve(built.model, quick());
    REQUIRE_FALSE(r.trace.empty());
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      CHECK(r.trace[i].objective < r.trace[i - 1].objective);
      CHECK(r.trace[i].seconds >= r.trace[i - 1].seconds);
    }
    CHECK(r.trace.back().objective == r.objective);
  }

  TEST_CASE("a lower bound equal to the first solution stops the search") {
    Model m(100);
    const auto a = m.add_interval("a", 3, false);
    const auto b = m.add_interval("b", 4, false);
    m.add_no_overlap(m.add_sequence({a, b}));
    m.minimize_max_end({a, b});
    SolverConfig c = quick();
    c.lower_bound = 7;
    const auto r = solve(m, c);
    CHECK(r.status == SolveStatus::Optimal);
    CHECK(r.objective == 7);
    CHECK(r.bound == 7);
  }
}
