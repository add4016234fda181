#pragma once

#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "core/instance.hpp"

namespace fjspth {

// One zone-bound segment of a transfer arc.
struct Leg {
  int id = -1;  // instance-wide identifier, assigned by LegTable
  StationId arc_pickup = 0;
  StationId arc_dropoff = 0;
  int position = 1;  // 1 or 2 within the parent arc
  StationId pickup = 0;
  StationId dropoff = 0;
  ZoneId zone = 0;
  Time travel = 0;

  bool operator==(const Leg&) const = default;
};

struct ArcSpec {
  StationId pickup = 0;
  StationId dropoff = 0;
  std::vector<Leg> legs;  // 0, 1 or 2 entries in traversal order
  Time total_travel = 0;

  bool operator==(const ArcSpec&) const = default;
};

// Deadhead times between legs: entry(l, l') = travel[dropoff(l)][pickup(l')].
class LegTransitionMatrix {
 public:
  LegTransitionMatrix() = default;
  explicit LegTransitionMatrix(int size) : size_(size), cells_(static_cast<std::size_t>(size) * size, 0) {}

  int size() const { return size_; }
  Time at(int from, int to) const { return cells_[index(from, to)]; }
  Time& at(int from, int to) { return cells_[index(from, to)]; }

 private:
  std::size_t index(int from, int to) const { return static_cast<std::size_t>(from) * size_ + to; }

  int size_ = 0;
  std::vector<Time> cells_;
};

// Splits the transfer pickup -> dropoff into legs. Same station: no legs.
// Stocker pickup or same zone: one leg. Otherwise two legs through the handoff
// point. Returned legs carry id -1; use LegTable for instance-wide ids.
// Throws std::invalid_argument when dropoff is not a machine or pickup is the
// handoff point.
ArcSpec decompose_arc(const Instance& instance, StationId pickup, StationId dropoff);

// Viable arcs feeding an operation: stocker -> M_o for first operations,
// M_pred x M_o otherwise. Legs carry instance-wide ids.
std::vector<ArcSpec> enumerate_arcs(const Instance& instance, OperationId op);

// Throws std::invalid_argument on duplicate or out-of-range leg ids.
LegTransitionMatrix build_leg_matrix(const Instance& instance, std::span<const Leg> legs);

// Instance-wide enumeration of the legs of every stocker->machine and
// machine->machine arc, sorted by (pickup, dropoff, position, parent arc).
class LegTable {
 public:
  explicit LegTable(const Instance& instance);

  const std::vector<Leg>& legs() const { return legs_; }
  const Leg& leg(int id) const { return legs_.at(id); }
  // The arc with instance-wide leg ids.
  const ArcSpec& arc(StationId pickup, StationId dropoff) const;

 private:
  std::vector<Leg> legs_;
  std::map<std::pair<StationId, StationId>, ArcSpec> arcs_;
};

}  // namespace fjspth
