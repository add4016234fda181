#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fjspth {

// Discrete time. All processing and travel times are nonnegative integers.
using Time = std::int64_t;

using StationId = int;
using MachineId = int;  // a station id whose kind is Machine
using ZoneId = int;
using TransbotId = int;
using JobId = int;
using OperationId = int;

enum class StationKind { Machine, Stocker, Handoff };

const char* to_string(StationKind kind);

struct Station {
  StationId id = 0;
  StationKind kind = StationKind::Machine;
  std::optional<ZoneId> zone;  // present iff kind == Machine

  bool operator==(const Station&) const = default;
};

struct Zone {
  ZoneId id = 0;
  std::vector<MachineId> machines;
  std::vector<TransbotId> transbots;

  bool operator==(const Zone&) const = default;
};

struct Transbot {
  TransbotId id = 0;
  ZoneId zone = 0;
  StationId initial_station = 0;  // the stocker unless stated otherwise
  int capacity = 1;               // unit capacity; informational

  bool operator==(const Transbot&) const = default;
};

struct Alternative {
  MachineId machine = 0;
  Time processing_time = 0;

  bool operator==(const Alternative&) const = default;
};

struct Operation {
  OperationId id = 0;
  JobId job = 0;
  int order_index = 1;                   // 1-based position within the job
  std::vector<Alternative> eligibility;  // sorted by machine id

  std::optional<Time> processing_time(MachineId machine) const;
  bool eligible(MachineId machine) const { return processing_time(machine).has_value(); }
  Time max_processing_time() const;

  bool operator==(const Operation&) const = default;
};

// Immutable problem description. Constructed by the parsers and the generator;
// shared read-only across solver workers.
struct Instance {
  std::vector<Station> stations;
  std::vector<Zone> zones;
  std::vector<Transbot> transbots;
  std::vector<std::vector<OperationId>> jobs;  // operation ids in processing order
  std::vector<Operation> operations;
  std::vector<std::vector<Time>> travel;  // station x station, not necessarily symmetric

  StationId stocker() const;  // throws if missing
  StationId handoff() const;  // throws if missing
  std::vector<MachineId> machines() const;
  int machine_count() const;
  bool is_machine(StationId s) const;
  ZoneId zone_of_machine(MachineId m) const;
  Time travel_time(StationId from, StationId to) const { return travel.at(from).at(to); }
  const Operation& operation(OperationId op) const;
  std::vector<TransbotId> transbots_in_zone(ZoneId z) const;

  bool operator==(const Instance&) const = default;
};

// Returns every violated structural rule; an empty list means the instance is
// accepted by every downstream module.
std::vector<std::string> validate_instance(const Instance& instance);

// Same-job operation with order index one lower, or nullopt for the first
// operation. Throws std::out_of_range for an unknown operation.
std::optional<OperationId> predecessor(const Instance& instance, OperationId op);

// Successor counterpart of predecessor().
std::optional<OperationId> successor(const Instance& instance, OperationId op);

}  // namespace fjspth
