#include "core/instance.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace fjspth {

const char* to_string(StationKind kind) {
  switch (kind) {
    case StationKind::Machine: return "MACHINE";
    case StationKind::Stocker: return "STOCKER";
    case StationKind::Handoff: return "HANDOFF";
  }
  return "?";
}

std::optional<Time> Operation::processing_time(MachineId machine) const {
  for (const auto& alt : eligibility)
    if (alt.machine == machine) return alt.processing_time;
  return std::nullopt;
}

Time Operation::max_processing_time() const {
  Time best = 0;
  for (const auto& alt : eligibility) best = std::max(best, alt.processing_time);
  return best;
}

namespace {

StationId unique_station(const Instance& inst, StationKind kind) {
  std::optional<StationId> found;
  for (const auto& s : inst.stations) {
    if (s.kind != kind) continue;
    if (found) throw std::logic_error(fmt::format("more than one {} station", to_string(kind)));
    found = s.id;
  }
  if (!found) throw std::logic_error(fmt::format("no {} station", to_string(kind)));
  return *found;
}

}  // namespace

StationId Instance::stocker() const { return unique_station(*this, StationKind::Stocker); }
StationId Instance::handoff() const { return unique_station(*this, StationKind::Handoff); }

std::vector<MachineId> Instance::machines() const {
  std::vector<MachineId> out;
  for (const auto& s : stations)
    if (s.kind == StationKind::Machine) out.push_back(s.id);
  return out;
}

int Instance::machine_count() const {
  return static_cast<int>(std::count_if(stations.begin(), stations.end(),
                                        [](const Station& s) { return s.kind == StationKind::Machine; }));
}

bool Instance::is_machine(StationId s) const {
  return s >= 0 && s < static_cast<int>(stations.size()) && stations[s].kind == StationKind::Machine;
}

ZoneId Instance::zone_of_machine(MachineId m) const {
  if (!is_machine(m) || !stations[m].zone) throw std::out_of_range(fmt::format("station {} is not a zoned machine", m));
  return *stations[m].zone;
}

const Operation& Instance::operation(OperationId op) const {
  if (op < 0 || op >= static_cast<int>(operations.size()))
    throw std::out_of_range(fmt::format("unknown operation {}", op));
  return operations[op];
}

std::vector<TransbotId> Instance::transbots_in_zone(ZoneId z) const {
  std::vector<TransbotId> out;
  for (const auto& v : transbots)
    if (v.zone == z) out.push_back(v.id);
  return out;
}

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;
  const int n = static_cast<int>(inst.stations.size());

  int stockers = 0, handoffs = 0;
  for (int i = 0; i < n; ++i) {
    const auto& s = inst.stations[i];
    if (s.id != i) out.push_back(fmt::format("station at position {} has id {}", i, s.id));
    if (s.kind == StationKind::Stocker) ++stockers;
    if (s.kind == StationKind::Handoff) ++handoffs;
    if (s.kind == StationKind::Machine && !s.zone) out.push_back(fmt::format("machine {} has no zone", s.id));
    if (s.kind != StationKind::Machine && s.zone)
      out.push_back(fmt::format("{} station {} carries a zone", to_string(s.kind), s.id));
  }
  if (stockers != 1) out.push_back(fmt::format("expected exactly one stocker, found {}", stockers));
  if (handoffs != 1) out.push_back(fmt::format("expected exactly one handoff point, found {}", handoffs));

  const int zone_count = static_cast<int>(inst.zones.size());
  auto valid_zone = [&](ZoneId z) { return z >= 0 && z < zone_count; };

  std::map<MachineId, int> machine_listings;
  std::map<TransbotId, int> bot_listings;
  for (int z = 0; z < zone_count; ++z) {
    const auto& zone = inst.zones[z];
    if (zone.id != z) out.push_back(fmt::format("zone at position {} has id {}", z, zone.id));
    for (MachineId m : zone.machines) {
      ++machine_listings[m];
      if (!inst.is_machine(m)) {
        out.push_back(fmt::format("zone {} lists unknown machine {}", z, m));
      } else if (inst.stations[m].zone != z) {
        out.push_back(fmt::format("zone {} lists machine {} whose station zone differs", z, m));
      }
    }
    for (TransbotId v : zone.transbots) {
      ++bot_listings[v];
      if (v < 0 || v >= static_cast<int>(inst.transbots.size()))
        out.push_back(fmt::format("zone {} lists unknown transbot {}", z, v));
      else if (inst.transbots[v].zone != z)
        out.push_back(fmt::format("zone {} lists transbot {} assigned elsewhere", z, v));
    }
    if (zone.transbots.empty()) out.push_back(fmt::format("zone {} has no transbots", z));
  }
  for (const auto& s : inst.stations) {
    if (s.kind != StationKind::Machine) continue;
    if (s.zone && !valid_zone(*s.zone)) out.push_back(fmt::format("machine {} references unknown zone {}", s.id, *s.zone));
    if (machine_listings[s.id] != 1)
      out.push_back(fmt::format("machine {} is listed in {} zones", s.id, machine_listings[s.id]));
  }

  for (int v = 0; v < static_cast<int>(inst.transbots.size()); ++v) {
    const auto& bot = inst.transbots[v];
    if (bot.id != v) out.push_back(fmt::format("transbot at position {} has id {}", v, bot.id));
    if (!valid_zone(bot.zone)) out.push_back(fmt::format("transbot {} references unknown zone {}", v, bot.zone));
    if (bot_listings[v] != 1) out.push_back(fmt::format("transbot {} is listed in {} zones", v, bot_listings[v]));
    if (bot.initial_station < 0 || bot.initial_station >= n)
      out.push_back(fmt::format("transbot {} starts at unknown station {}", v, bot.initial_station));
    if (bot.capacity != 1) out.push_back(fmt::format("transbot {} has capacity {}", v, bot.capacity));
  }

  const int op_count = static_cast<int>(inst.operations.size());
  std::vector<int> seen(op_count, 0);
  for (int j = 0; j < static_cast<int>(inst.jobs.size()); ++j) {
    const auto& ops = inst.jobs[j];
    for (int k = 0; k < static_cast<int>(ops.size()); ++k) {
      const OperationId op = ops[k];
      if (op < 0 || op >= op_count) {
        out.push_back(fmt::format("job {} references unknown operation {}", j, op));
        continue;
      }
      ++seen[op];
      const auto& o = inst.operations[op];
      if (o.job != j) out.push_back(fmt::format("operation {} is listed in job {} but belongs to job {}", op, j, o.job));
      if (o.order_index != k + 1)
        out.push_back(fmt::format("operation {} of job {} has order index {}, expected {}", op, j, o.order_index, k + 1));
    }
  }
  for (int i = 0; i < op_count; ++i) {
    const auto& o = inst.operations[i];
    if (o.id != i) out.push_back(fmt::format("operation at position {} has id {}", i, o.id));
    if (seen[i] != 1) out.push_back(fmt::format("operation {} appears in {} jobs", i, seen[i]));
    if (o.eligibility.empty()) out.push_back(fmt::format("operation {} has no eligible machine", i));
    std::set<MachineId> machines;
    for (const auto& alt : o.eligibility) {
      if (!inst.is_machine(alt.machine))
        out.push_back(fmt::format("operation {} references unknown machine {}", i, alt.machine));
      if (alt.processing_time <= 0)
        out.push_back(fmt::format("operation {} has nonpositive processing time on machine {}", i, alt.machine));
      if (!machines.insert(alt.machine).second)
        out.push_back(fmt::format("operation {} lists machine {} twice", i, alt.machine));
    }
  }

  if (static_cast<int>(inst.travel.size()) != n) {
    out.push_back(fmt::format("travel matrix has {} rows for {} stations", inst.travel.size(), n));
  } else {
    for (int a = 0; a < n; ++a) {
      if (static_cast<int>(inst.travel[a].size()) != n) {
        out.push_back(fmt::format("travel row {} has {} entries for {} stations", a, inst.travel[a].size(), n));
        continue;
      }
      for (int b = 0; b < n; ++b) {
        const Time t = inst.travel[a][b];
        if (a == b && t != 0) out.push_back(fmt::format("travel[{}][{}] = {} on the diagonal, expected 0", a, b, t));
        if (t < 0) out.push_back(fmt::format("travel[{}][{}] = {} is negative", a, b, t));
      }
    }
  }
  return out;
}

std::optional<OperationId> predecessor(const Instance& instance, OperationId op) {
  const auto& o = instance.operation(op);
  if (o.order_index <= 1) return std::nullopt;
  return instance.jobs.at(o.job).at(o.order_index - 2);
}

std::optional<OperationId> successor(const Instance& instance, OperationId op) {
  const auto& o = instance.operation(op);
  const auto& job = instance.jobs.at(o.job);
  if (o.order_index >= static_cast<int>(job.size())) return std::nullopt;
  return job.at(o.order_index);
}

}  // namespace fjspth
