#pragma once

#include <vector>

#include "core/instance.hpp"

namespace fjspth {

struct OperationAssignment {
  MachineId machine = 0;
  Time start = 0;
  Time end = 0;

  bool operator==(const OperationAssignment&) const = default;
};

// One executed leg of a transfer. leg_id indexes the instance-wide leg table
// built by the routing module.
struct LegAssignment {
  int leg_id = 0;
  StationId pickup = 0;
  StationId dropoff = 0;
  int position = 1;
  TransbotId transbot = 0;
  Time start = 0;
  Time end = 0;

  bool operator==(const LegAssignment&) const = default;
};

// A complete solution. Both vectors are indexed by operation id; the transfer
// feeding operation o is transfers[o] (0, 1 or 2 legs in traversal order).
struct Schedule {
  std::vector<OperationAssignment> operations;
  std::vector<std::vector<LegAssignment>> transfers;
  Time makespan = 0;

  bool operator==(const Schedule&) const = default;
};

// Max operation end; transfers never count (jobs finish at their last machine).
// Throws std::invalid_argument when the schedule does not cover every operation.
Time compute_makespan(const Instance& instance, const Schedule& schedule);

}  // namespace fjspth
