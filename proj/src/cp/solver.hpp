#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cp/model.hpp"
#include "cp/store.hpp"

namespace fjspth::cp {

struct IntervalValue {
  bool present = false;
  Time start = 0;
  Time end = 0;

  bool operator==(const IntervalValue&) const = default;
};

// Partial assignment used to seed the incumbent. Intervals not listed are left
// to a short search dive.
struct WarmStartValue {
  IntervalId id;
  bool present = true;
  Time start = 0;  // ignored when absent
};

struct SolverConfig {
  double time_limit = 600.0;  // seconds
  int workers = 1;
  std::uint64_t seed = 0;
  std::vector<WarmStartValue> warm_start;
  std::optional<Time> lower_bound;
  std::int64_t initial_fail_limit = 200;
  double restart_growth = 1.5;
  std::int64_t warm_start_fail_limit = 1000;
  // Large neighbourhood search between complete restarts, once an incumbent
  // exists. Optimality is still only claimed by the complete search.
  bool lns = true;
  double lns_ratio = 3.0;  // LNS fails per complete-search fail
  std::int64_t lns_fail_limit = 50;
};

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeoutNoSolution };

const char* to_string(SolveStatus status);

struct TracePoint {
  double seconds = 0;
  Time objective = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::TimeoutNoSolution;
  std::optional<std::vector<IntervalValue>> incumbent;
  std::optional<Time> objective;
  Time bound = 0;
  double runtime_seconds = 0;
  std::int64_t nodes = 0;
  std::int64_t fails = 0;
  std::int64_t restarts = 0;
  bool warm_start_used = false;
  std::vector<TracePoint> trace;  // successive incumbents, objective strictly decreasing
};

// Branch and bound minimizing the latest end among the model's objective
// intervals. Throws ModelError on a malformed model and std::invalid_argument
// on an invalid config.
SolveReport solve(const Model& model, const SolverConfig& config);

// Root propagation only; nullopt when the model is infeasible at the root.
std::optional<std::vector<Domain>> propagate_root(const Model& model);

}  // namespace fjspth::cp
