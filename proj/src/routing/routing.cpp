#include "routing/routing.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace fjspth {

ArcSpec decompose_arc(const Instance& instance, StationId pickup, StationId dropoff) {
  const int n = static_cast<int>(instance.stations.size());
  if (pickup < 0 || pickup >= n || dropoff < 0 || dropoff >= n)
    throw std::invalid_argument(fmt::format("arc {} -> {} references unknown station", pickup, dropoff));
  if (!instance.is_machine(dropoff))
    throw std::invalid_argument(fmt::format("arc dropoff {} is not a machine", dropoff));
  const StationKind pickup_kind = instance.stations[pickup].kind;
  if (pickup_kind == StationKind::Handoff)
    throw std::invalid_argument(fmt::format("arc pickup {} is the handoff point", pickup));

  ArcSpec arc{pickup, dropoff, {}, 0};
  if (pickup == dropoff) return arc;

  auto make_leg = [&](int position, StationId from, StationId to, ZoneId zone) {
    Leg leg;
    leg.arc_pickup = pickup;
    leg.arc_dropoff = dropoff;
    leg.position = position;
    leg.pickup = from;
    leg.dropoff = to;
    leg.zone = zone;
    leg.travel = instance.travel_time(from, to);
    return leg;
  };

  const ZoneId drop_zone = instance.zone_of_machine(dropoff);
  if (pickup_kind == StationKind::Stocker || instance.zone_of_machine(pickup) == drop_zone) {
    arc.legs.push_back(make_leg(1, pickup, dropoff, drop_zone));
  } else {
    const StationId h = instance.handoff();
    arc.legs.push_back(make_leg(1, pickup, h, instance.zone_of_machine(pickup)));
    arc.legs.push_back(make_leg(2, h, dropoff, drop_zone));
  }
  for (const auto& leg : arc.legs) arc.total_travel += leg.travel;
  return arc;
}

LegTable::LegTable(const Instance& instance) {
  const auto machines = instance.machines();
  std::vector<StationId> pickups = machines;
  pickups.push_back(instance.stocker());
  for (StationId from : pickups) {
    for (MachineId to : machines) arcs_.emplace(std::pair{from, to}, decompose_arc(instance, from, to));
  }
  for (const auto& [key, arc] : arcs_)
    for (const auto& leg : arc.legs) legs_.push_back(leg);
  std::sort(legs_.begin(), legs_.end(), [](const Leg& a, const Leg& b) {
    return std::tie(a.pickup, a.dropoff, a.position, a.arc_pickup, a.arc_dropoff) <
           std::tie(b.pickup, b.dropoff, b.position, b.arc_pickup, b.arc_dropoff);
  });
  for (int i = 0; i < static_cast<int>(legs_.size()); ++i) {
    legs_[i].id = i;
    auto& arc = arcs_.at({legs_[i].arc_pickup, legs_[i].arc_dropoff});
    arc.legs.at(legs_[i].position - 1).id = i;
  }
}

const ArcSpec& LegTable::arc(StationId pickup, StationId dropoff) const {
  auto it = arcs_.find({pickup, dropoff});
  if (it == arcs_.end()) throw std::invalid_argument(fmt::format("no arc {} -> {}", pickup, dropoff));
  return it->second;
}

std::vector<ArcSpec> enumerate_arcs(const Instance& instance, OperationId op) {
  const auto& o = instance.operation(op);
  const LegTable table(instance);
  std::vector<ArcSpec> out;
  const auto pred = predecessor(instance, op);
  if (!pred) {
    const StationId stocker = instance.stocker();
    for (const auto& alt : o.eligibility) out.push_back(table.arc(stocker, alt.machine));
    return out;
  }
  for (const auto& from : instance.operation(*pred).eligibility)
    for (const auto& to : o.eligibility) out.push_back(table.arc(from.machine, to.machine));
  return out;
}

LegTransitionMatrix build_leg_matrix(const Instance& instance, std::span<const Leg> legs) {
  const int n = static_cast<int>(legs.size());
  std::vector<const Leg*> by_id(n, nullptr);
  for (const auto& leg : legs) {
    if (leg.id < 0 || leg.id >= n) throw std::invalid_argument(fmt::format("leg id {} outside 0..{}", leg.id, n - 1));
    if (by_id[leg.id]) throw std::invalid_argument(fmt::format("duplicate leg id {}", leg.id));
    by_id[leg.id] = &leg;
  }
  LegTransitionMatrix matrix(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) matrix.at(a, b) = instance.travel_time(by_id[a]->dropoff, by_id[b]->pickup);
  return matrix;
}

}  // namespace fjspth
