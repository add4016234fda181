#pragma once

#include <string>
#include <vector>

#include "core/instance.hpp"
#include "core/schedule.hpp"

namespace fjspth {

enum class ViolationKind {
  Precedence,
  MachineOverlap,
  BotOverlap,
  DeadheadShortfall,
  ZoneMismatch,
  StationLink,
  LegOrder,
  StockerStart,
  DurationMismatch,
  EligibilityBreach,
};

inline constexpr ViolationKind kAllViolationKinds[] = {
    ViolationKind::Precedence,   ViolationKind::MachineOverlap,   ViolationKind::BotOverlap,
    ViolationKind::DeadheadShortfall, ViolationKind::ZoneMismatch, ViolationKind::StationLink,
    ViolationKind::LegOrder,     ViolationKind::StockerStart,     ViolationKind::DurationMismatch,
    ViolationKind::EligibilityBreach,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<int> subjects;  // operation ids, except BotOverlap/DeadheadShortfall: (transbot, op, op)
  std::string detail;
};

struct ValidateOptions {
  bool initial_deadhead = true;
};

// Checks a schedule independently of the solver. Transbot deadheads are
// checked over every ordered pair of legs on the same transbot, not only
// consecutive ones. Throws std::invalid_argument when the schedule does not
// cover every operation.
std::vector<Violation> validate_schedule(const Instance& instance, const Schedule& schedule,
                                         const ValidateOptions& options = {});

struct OracleLimits {
  int max_operations = 5;
  int max_machines = 3;
  int max_transbots = 3;
  bool initial_deadhead = true;
};

struct OracleResult {
  Schedule schedule;
  Time makespan = 0;
};

// Exhaustive search over machine choices, transbot choices per leg and global
// activity orders, timing each order at earliest starts. Throws
// std::invalid_argument when the instance exceeds the limits or is invalid and
// std::runtime_error when no feasible schedule exists.
OracleResult brute_force_optimal(const Instance& instance, const OracleLimits& limits = {});

// Two zones, one machine and one transbot each; one job whose second operation
// needs a cross-zone transfer through the handoff point. Optimum 20.
Instance fixture_tiny1();

}  // namespace fjspth
