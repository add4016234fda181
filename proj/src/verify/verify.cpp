#include "verify/verify.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "routing/routing.hpp"

namespace fjspth {

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Precedence: return "Precedence";
    case ViolationKind::MachineOverlap: return "MachineOverlap";
    case ViolationKind::BotOverlap: return "BotOverlap";
    case ViolationKind::DeadheadShortfall: return "DeadheadShortfall";
    case ViolationKind::ZoneMismatch: return "ZoneMismatch";
    case ViolationKind::StationLink: return "StationLink";
    case ViolationKind::LegOrder: return "LegOrder";
    case ViolationKind::StockerStart: return "StockerStart";
    case ViolationKind::DurationMismatch: return "DurationMismatch";
    case ViolationKind::EligibilityBreach: return "EligibilityBreach";
  }
  return "?";
}

namespace {

struct Hop {
  StationId from, to;
  bool operator==(const Hop&) const = default;
};

// Station sequence of a transfer, derived here from the zoning rules rather
// than from the routing module.
std::vector<Hop> expected_route(const Instance& inst, StationId from, MachineId to) {
  if (from == to) return {};
  const bool from_stocker = inst.stations[from].kind == StationKind::Stocker;
  if (from_stocker || *inst.stations[from].zone == *inst.stations[to].zone) return {{from, to}};
  const StationId h = inst.handoff();
  return {{from, h}, {h, to}};
}

ZoneId hop_zone(const Instance& inst, StationId from, StationId to) {
  return inst.is_machine(from) ? *inst.stations[from].zone : *inst.stations[to].zone;
}

}  // namespace

std::vector<Violation> validate_schedule(const Instance& inst, const Schedule& schedule, const ValidateOptions& options) {
  const int n = static_cast<int>(inst.operations.size());
  if (static_cast<int>(schedule.operations.size()) < n)
    throw std::invalid_argument(fmt::format("schedule covers {} of {} operations", schedule.operations.size(), n));
  std::vector<Violation> out;
  auto report = [&](ViolationKind k, std::vector<int> subjects, std::string detail) {
    out.push_back({k, std::move(subjects), std::move(detail)});
  };
  static const std::vector<LegAssignment> kNoLegs;
  auto legs_of = [&](OperationId o) -> const std::vector<LegAssignment>& {
    return o < static_cast<int>(schedule.transfers.size()) ? schedule.transfers[o] : kNoLegs;
  };
  const int station_count = static_cast<int>(inst.stations.size());
  auto eligible = [&](OperationId o) { return inst.operations[o].eligible(schedule.operations[o].machine); };
  const LegTable table(inst);
  const int leg_total = static_cast<int>(table.legs().size());

  for (OperationId o = 0; o < n; ++o) {
    const auto& a = schedule.operations[o];
    const auto& op = inst.operations[o];
    const auto& legs = legs_of(o);
    const auto pred = predecessor(inst, o);
    const auto succ = successor(inst, o);

    // precedence
    if (a.start < 0) report(ViolationKind::Precedence, {o}, fmt::format("operation {} starts at {} < 0", o, a.start));
    if (!legs.empty() && legs.back().end > a.start)
      report(ViolationKind::Precedence, {o},
             fmt::format("transfer of operation {} ends at {} after the operation starts at {}", o, legs.back().end, a.start));
    if (succ) {
      const auto& next_legs = legs_of(*succ);
      const Time next = next_legs.empty() ? schedule.operations[*succ].start : next_legs.front().start;
      if (next < a.end)
        report(ViolationKind::Precedence, {o, *succ},
               fmt::format("operation {} ends at {} after the transfer of operation {} starts at {}", o, a.end, *succ, next));
    }

    // eligibility and durations
    const auto p = op.processing_time(a.machine);
    if (!p) {
      report(ViolationKind::EligibilityBreach, {o}, fmt::format("operation {} runs on ineligible machine {}", o, a.machine));
    } else if (a.end - a.start != *p) {
      report(ViolationKind::DurationMismatch, {o},
             fmt::format("operation {} lasts {} on machine {}, expected {}", o, a.end - a.start, a.machine, *p));
    }

    bool legs_resolved = true;
    for (const auto& leg : legs) {
      if (leg.leg_id < 0 || leg.leg_id >= leg_total || leg.pickup < 0 || leg.pickup >= station_count || leg.dropoff < 0 ||
          leg.dropoff >= station_count) {
        report(ViolationKind::StationLink, {o}, fmt::format("operation {} uses unknown leg {}", o, leg.leg_id));
        legs_resolved = false;
        continue;
      }
      const Leg& ref = table.leg(leg.leg_id);
      if (ref.pickup != leg.pickup || ref.dropoff != leg.dropoff || ref.position != leg.position) {
        report(ViolationKind::StationLink, {o},
               fmt::format("leg {} of operation {} recorded as {}->{} (position {}), table says {}->{} (position {})",
                           leg.leg_id, o, leg.pickup, leg.dropoff, leg.position, ref.pickup, ref.dropoff, ref.position));
        legs_resolved = false;
        continue;
      }
      const Time travel = inst.travel_time(leg.pickup, leg.dropoff);
      if (leg.end - leg.start != travel)
        report(ViolationKind::DurationMismatch, {o},
               fmt::format("leg {}->{} of operation {} lasts {}, expected {}", leg.pickup, leg.dropoff, o,
                           leg.end - leg.start, travel));
      // zone compatibility
      if (leg.transbot < 0 || leg.transbot >= static_cast<int>(inst.transbots.size())) {
        report(ViolationKind::ZoneMismatch, {o}, fmt::format("operation {} uses unknown transbot {}", o, leg.transbot));
      } else if (inst.transbots[leg.transbot].zone != hop_zone(inst, leg.pickup, leg.dropoff)) {
        report(ViolationKind::ZoneMismatch, {o},
               fmt::format("transbot {} of zone {} carries leg {}->{} of zone {}", leg.transbot,
                           inst.transbots[leg.transbot].zone, leg.pickup, leg.dropoff, hop_zone(inst, leg.pickup, leg.dropoff)));
      }
    }

    // station linking
    if (!pred) {
      if (legs.empty() || legs.front().pickup != inst.stocker()) {
        report(ViolationKind::StockerStart, {o},
               fmt::format("first operation {} of job {} is not fed from the stocker", o, op.job));
        legs_resolved = false;
      }
    }
    if (legs_resolved && p && (!pred || eligible(*pred))) {
      const StationId from = pred ? schedule.operations[*pred].machine : inst.stocker();
      std::vector<Hop> actual;
      for (const auto& leg : legs) actual.push_back({leg.pickup, leg.dropoff});
      const auto expected = expected_route(inst, from, a.machine);
      if (actual != expected) {
        std::vector<std::string> want, got;
        for (const auto& h : expected) want.push_back(fmt::format("{}->{}", h.from, h.to));
        for (const auto& h : actual) got.push_back(fmt::format("{}->{}", h.from, h.to));
        report(ViolationKind::StationLink, {o},
               fmt::format("transfer of operation {} is [{}], expected [{}]", o, fmt::join(got, ", "), fmt::join(want, ", ")));
      }
    }

    // leg order
    for (std::size_t k = 1; k < legs.size(); ++k)
      if (legs[k].start < legs[k - 1].end)
        report(ViolationKind::LegOrder, {o},
               fmt::format("leg {} of operation {} starts at {} before leg {} ends at {}", k + 1, o, legs[k].start, k,
                           legs[k - 1].end));
  }

  // machine exclusivity
  for (OperationId x = 0; x < n; ++x)
    for (OperationId y = x + 1; y < n; ++y) {
      const auto& a = schedule.operations[x];
      const auto& b = schedule.operations[y];
      if (a.machine == b.machine && a.start < b.end && b.start < a.end)
        report(ViolationKind::MachineOverlap, {x, y},
               fmt::format("operations {} [{}, {}] and {} [{}, {}] overlap on machine {}", x, a.start, a.end, y, b.start,
                           b.end, a.machine));
    }

  // transbot exclusivity with deadheads over all ordered pairs
  struct BotLeg {
    OperationId op;
    const LegAssignment* leg;
  };
  std::map<TransbotId, std::vector<BotLeg>> by_bot;
  for (OperationId o = 0; o < n; ++o)
    for (const auto& leg : legs_of(o))
      if (leg.transbot >= 0 && leg.transbot < static_cast<int>(inst.transbots.size()) && leg.pickup >= 0 &&
          leg.pickup < station_count && leg.dropoff >= 0 && leg.dropoff < station_count)
        by_bot[leg.transbot].push_back({o, &leg});
  for (const auto& [v, list] : by_bot) {
    if (options.initial_deadhead) {
      const StationId init = inst.transbots[v].initial_station;
      for (const auto& bl : list) {
        const Time need = inst.travel_time(init, bl.leg->pickup);
        if (bl.leg->start < need)
          report(ViolationKind::DeadheadShortfall, {v, bl.op, bl.op},
                 fmt::format("transbot {} cannot reach station {} by {} from its start station {} (needs {})", v,
                             bl.leg->pickup, bl.leg->start, init, need));
      }
    }
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        const auto& k = *list[i].leg;
        const auto& l = *list[j].leg;
        const bool k_first = l.start >= k.end + inst.travel_time(k.dropoff, l.pickup);
        const bool l_first = k.start >= l.end + inst.travel_time(l.dropoff, k.pickup);
        if (k_first || l_first) continue;
        const bool overlap = k.start < l.end && l.start < k.end;
        report(overlap ? ViolationKind::BotOverlap : ViolationKind::DeadheadShortfall, {v, list[i].op, list[j].op},
               fmt::format("transbot {} legs {}->{} [{}, {}] and {}->{} [{}, {}] {}", v, k.pickup, k.dropoff, k.start, k.end,
                           l.pickup, l.dropoff, l.start, l.end, overlap ? "overlap" : "leave too little deadhead time"));
      }
  }

  Time makespan = 0;
  for (OperationId o = 0; o < n; ++o) makespan = std::max(makespan, schedule.operations[o].end);
  if (schedule.makespan != makespan)
    report(ViolationKind::DurationMismatch, {},
           fmt::format("recorded makespan {} differs from the latest operation end {}", schedule.makespan, makespan));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class Oracle {
 public:
  Oracle(const Instance& inst, const OracleLimits& limits) : inst_(inst), limits_(limits), table_(inst) {
    const int n = static_cast<int>(inst.operations.size());
    current_.operations.resize(n);
    current_.transfers.resize(n);
    jobs_.resize(inst.jobs.size());
    bots_.resize(inst.transbots.size());
    remaining_min_.resize(inst.jobs.size());
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) {
      auto& rem = remaining_min_[j];
      rem.assign(inst.jobs[j].size() + 1, 0);
      for (int k = static_cast<int>(inst.jobs[j].size()) - 1; k >= 0; --k) {
        Time pmin = std::numeric_limits<Time>::max();
        for (const auto& alt : inst.operation(inst.jobs[j][k]).eligibility) pmin = std::min(pmin, alt.processing_time);
        rem[k] = rem[k + 1] + pmin;
      }
    }
  }

  std::optional<OracleResult> run() {
    search();
    if (best_makespan_ == kNone) return std::nullopt;
    return OracleResult{best_, best_makespan_};
  }

 private:
  static constexpr Time kNone = std::numeric_limits<Time>::max();

  struct JobState {
    int pos = 0;          // index of the current operation within the job
    int legs_done = 0;    // legs of its transfer already placed
    MachineId machine = -1;
    Time ready = 0;       // end of the job's last placed activity
  };
  struct Placed {
    StationId pickup, dropoff;
    Time end;
  };

  Time lower_bound() const {
    Time lb = makespan_;
    for (std::size_t j = 0; j < jobs_.size(); ++j) lb = std::max(lb, jobs_[j].ready + remaining_min_[j][jobs_[j].pos]);
    return lb;
  }

  void search() {
    if (lower_bound() >= best_makespan_) return;
    bool all_done = true;
    for (std::size_t j = 0; j < jobs_.size(); ++j) {
      if (jobs_[j].pos >= static_cast<int>(inst_.jobs[j].size())) continue;
      all_done = false;
      if (jobs_[j].machine < 0) {
        const auto& op = inst_.operation(inst_.jobs[j][jobs_[j].pos]);
        for (const auto& alt : op.eligibility) {
          jobs_[j].machine = alt.machine;
          place_next(static_cast<int>(j));
          jobs_[j].machine = -1;
        }
      } else {
        place_next(static_cast<int>(j));
      }
    }
    if (all_done && makespan_ < best_makespan_) {
      best_makespan_ = makespan_;
      best_ = current_;
      best_.makespan = makespan_;
    }
  }

  void place_next(int j) {
    JobState& js = jobs_[j];
    const OperationId o = inst_.jobs[j][js.pos];
    const auto pred = predecessor(inst_, o);
    const StationId pickup = pred ? current_.operations[*pred].machine : inst_.stocker();
    const auto& legs = table_.arc(pickup, js.machine).legs;
    if (js.legs_done < static_cast<int>(legs.size())) {
      const Leg& leg = legs[js.legs_done];
      for (TransbotId v : inst_.transbots_in_zone(leg.zone)) {
        Time start = js.ready;
        if (limits_.initial_deadhead)
          start = std::max(start, inst_.travel_time(inst_.transbots[v].initial_station, leg.pickup));
        for (const auto& k : bots_[v]) start = std::max(start, k.end + inst_.travel_time(k.dropoff, leg.pickup));
        const Time end = start + leg.travel;
        const JobState saved = js;
        bots_[v].push_back({leg.pickup, leg.dropoff, end});
        current_.transfers[o].push_back({leg.id, leg.pickup, leg.dropoff, leg.position, v, start, end});
        js.ready = end;
        ++js.legs_done;
        search();
        js = saved;
        current_.transfers[o].pop_back();
        bots_[v].pop_back();
      }
      return;
    }
    const Time p = *inst_.operation(o).processing_time(js.machine);
    const Time free = machine_free_.count(js.machine) ? machine_free_[js.machine] : 0;
    const Time start = std::max(js.ready, free);
    const JobState saved = js;
    const Time saved_makespan = makespan_;
    machine_free_[js.machine] = start + p;
    current_.operations[o] = {js.machine, start, start + p};
    makespan_ = std::max(makespan_, start + p);
    js.ready = start + p;
    js.legs_done = 0;
    js.machine = -1;
    ++js.pos;
    search();
    js = saved;
    makespan_ = saved_makespan;
    machine_free_[saved.machine] = free;
  }

  const Instance& inst_;
  OracleLimits limits_;
  LegTable table_;
  std::vector<JobState> jobs_;
  std::vector<std::vector<Placed>> bots_;
  std::map<MachineId, Time> machine_free_;
  std::vector<std::vector<Time>> remaining_min_;
  Schedule current_;
  Time makespan_ = 0;
  Schedule best_;
  Time best_makespan_ = kNone;
};

}  // namespace

OracleResult brute_force_optimal(const Instance& instance, const OracleLimits& limits) {
  const auto violations = validate_instance(instance);
  if (!violations.empty()) throw std::invalid_argument(fmt::format("invalid instance: {}", fmt::join(violations, "; ")));
  if (static_cast<int>(instance.operations.size()) > limits.max_operations ||
      instance.machine_count() > limits.max_machines || static_cast<int>(instance.transbots.size()) > limits.max_transbots)
    throw std::invalid_argument(fmt::format("instance ({} operations, {} machines, {} transbots) exceeds oracle limits",
                                            instance.operations.size(), instance.machine_count(),
                                            instance.transbots.size()));
  auto result = Oracle(instance, limits).run();
  if (!result) throw std::runtime_error("no feasible schedule exists");
  return *result;
}

Instance fixture_tiny1() {
  Instance inst;
  constexpr StationId M1 = 0, M2 = 1, LU = 2, H = 3;
  inst.stations = {{M1, StationKind::Machine, 0}, {M2, StationKind::Machine, 1},
                   {LU, StationKind::Stocker, std::nullopt}, {H, StationKind::Handoff, std::nullopt}};
  inst.zones = {{0, {M1}, {0}}, {1, {M2}, {1}}};
  inst.transbots = {{0, 0, LU, 1}, {1, 1, LU, 1}};
  inst.jobs = {{0, 1}};
  inst.operations = {{0, 0, 1, {{M1, 5}}}, {1, 0, 2, {{M2, 6}}}};
  inst.travel.assign(4, std::vector<Time>(4, 0));
  auto set = [&](StationId a, StationId b, Time t) { inst.travel[a][b] = inst.travel[b][a] = t; };
  set(LU, M1, 2);
  set(M1, H, 3);
  set(H, M2, 4);
  set(LU, H, 1);
  set(M1, M2, 7);
  set(LU, M2, 5);
  return inst;
}

}  // namespace fjspth
