#pragma once

#include <optional>
#include <vector>

#include "core/instance.hpp"
#include "core/schedule.hpp"
#include "cp/model.hpp"
#include "cp/solver.hpp"
#include "routing/routing.hpp"

namespace fjspth {

enum class Formulation { Arc, Embedded, Relaxation };

const char* to_string(Formulation f);

struct BuildOptions {
  // Charge each transbot's first pickup with travel from its initial station.
  bool initial_deadhead = true;
};

// One transbot candidate for one leg of an arc (x_olv / x_lv).
struct LegOption {
  cp::IntervalId interval;
  int leg_id = -1;
  TransbotId transbot = 0;
};

struct ArcOption {
  ArcSpec arc;
  cp::IntervalId interval;                   // x_oa (arc model) or y_a (embedded)
  std::vector<std::vector<LegOption>> legs;  // per leg position, one entry per zone-compatible transbot
  std::optional<cp::IntervalId> stay;        // embedded only: zero-length stand-in for a 0-leg arc
};

struct OperationVars {
  cp::IntervalId transfer;                                     // x_o (absent from the relaxation)
  cp::IntervalId operation;                                    // y_o
  std::vector<std::pair<MachineId, cp::IntervalId>> machines;  // y_m (arc model and relaxation)
  std::vector<ArcOption> arcs;
};

struct FormulationVars {
  Formulation formulation = Formulation::Arc;
  std::vector<OperationVars> ops;
  std::vector<cp::SequenceId> machine_sequences;  // w_m, indexed by machine id
  std::vector<cp::SequenceId> transbot_sequences; // w_v, indexed by transbot id
  std::vector<cp::IntervalId> origins;            // per transbot when initial deadhead is on
};

struct BuiltModel {
  cp::Model model;
  FormulationVars vars;
};

// Decision-variable counts per class, for auditing model size.
struct VariableCounts {
  long x_o = 0, y_o = 0, y_m = 0, x_oa = 0, x_olv = 0, y_a = 0, x_lv = 0, w_m = 0, w_v = 0;
};

VariableCounts count_variables(const FormulationVars& vars);

// Upper bound on any schedule produced by the greedy construction.
Time horizon_bound(const Instance& instance);

// Each builder throws std::invalid_argument on an invalid instance.
BuiltModel build_arc_model(const Instance& instance, const BuildOptions& options = {});
BuiltModel build_embedded_model(const Instance& instance, const BuildOptions& options = {});
BuiltModel build_fjsp_relaxation(const Instance& instance);
BuiltModel build_model(const Instance& instance, Formulation f, const BuildOptions& options = {});

// Throws std::logic_error when an operation has no present machine option.
Schedule extract_schedule(const Instance& instance, const FormulationVars& vars,
                          const std::vector<cp::IntervalValue>& assignment);

// Complete warm start reproducing a feasible schedule on the given model.
std::vector<cp::WarmStartValue> warm_start_from_schedule(const FormulationVars& vars, const Schedule& schedule);

// Builds a full schedule by taking machine choices and operation order from a
// relaxed solution and inserting transfers greedily (earliest finishing
// zone-compatible transbot per leg, operations shifted right as needed).
// nullopt when some leg's zone has no transbot.
std::optional<Schedule> greedy_schedule(const Instance& instance, const std::vector<MachineId>& machine_of,
                                        const std::vector<Time>& relaxed_start, bool initial_deadhead = true);

struct AccelerationConfig {
  cp::SolverConfig solver;
  bool relaxation = true;         // solve the FJSP relaxation first for a lower bound
  double relaxation_share = 0.1;  // fraction of the time limit spent on it
  bool warm_start = true;         // seed the incumbent from the relaxation
  BuildOptions build;
};

struct SolveOutcome {
  std::optional<Schedule> schedule;
  cp::SolveReport report;
  std::optional<Time> relaxation_bound;
  bool warm_start_built = false;
};

SolveOutcome solve_with_acceleration(const Instance& instance, Formulation f, const AccelerationConfig& config);

}  // namespace fjspth
