#include "formulations/formulations.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace fjspth {

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::Arc: return "arc";
    case Formulation::Embedded: return "embedded";
    case Formulation::Relaxation: return "fjsp-relax";
  }
  return "?";
}

namespace {

void require_valid(const Instance& instance) {
  const auto violations = validate_instance(instance);
  if (!violations.empty()) throw std::invalid_argument(fmt::format("invalid instance: {}", fmt::join(violations, "; ")));
}

Time max_travel(const Instance& instance) {
  Time d = 0;
  for (const auto& row : instance.travel)
    for (Time t : row) d = std::max(d, t);
  return d;
}

// Shared skeleton of both transport formulations.
class Builder {
 public:
  Builder(const Instance& instance, Formulation f, const BuildOptions& options)
      : inst_(instance), f_(f), options_(options), table_(instance), built_{cp::Model(horizon_bound(instance)), {}} {
    built_.vars.formulation = f;
  }

  BuiltModel build() {
    cp::Model& model = built_.model;
    auto& vars = built_.vars;
    const int n = static_cast<int>(inst_.operations.size());
    vars.ops.resize(n);
    machine_members_.resize(inst_.stations.size());
    bot_members_.resize(inst_.transbots.size());

    for (const auto& op : inst_.operations) {
      auto& ov = vars.ops[op.id];
      Time pmin = op.eligibility.front().processing_time, pmax = pmin;
      for (const auto& alt : op.eligibility) {
        pmin = std::min(pmin, alt.processing_time);
        pmax = std::max(pmax, alt.processing_time);
      }
      ov.operation = model.add_interval(fmt::format("y_{}", op.id), pmin, pmax, false);
      ov.transfer = model.add_interval(fmt::format("x_{}", op.id), 0, model.horizon(), false);
      if (f_ == Formulation::Arc) {
        std::vector<cp::IntervalId> options;
        for (const auto& alt : op.eligibility) {
          auto y = model.add_interval(fmt::format("y_{}_m{}", op.id, alt.machine), alt.processing_time, true);
          ov.machines.emplace_back(alt.machine, y);
          options.push_back(y);
          machine_members_[alt.machine].push_back(y);
        }
        model.add_alternative(ov.operation, options);  // machine choice
      }
      add_arcs(op, ov);
    }

    for (const auto& op : inst_.operations) {
      auto& ov = vars.ops[op.id];
      model.add_end_before_start(ov.transfer, ov.operation);
      const auto pred = predecessor(inst_, op.id);
      if (pred) model.add_end_before_start(vars.ops[*pred].operation, ov.transfer);
      link_stations(pred, op.id);
    }

    for (MachineId m : inst_.machines()) {
      auto seq = model.add_sequence(machine_members_[m]);
      model.add_no_overlap(seq);
      if (static_cast<int>(vars.machine_sequences.size()) <= m) vars.machine_sequences.resize(m + 1);
      vars.machine_sequences[m] = seq;
    }
    add_transbot_sequences();

    std::vector<cp::IntervalId> objective;
    for (const auto& ov : vars.ops) objective.push_back(ov.operation);
    model.minimize_max_end(objective);
    return std::move(built_);
  }

 private:
  void add_arcs(const Operation& op, OperationVars& ov) {
    cp::Model& model = built_.model;
    std::vector<cp::IntervalId> alternatives;  // x_oa or y_a
    std::vector<cp::IntervalId> covered;       // embedded span members
    for (const ArcSpec& arc : enumerate_arcs(inst_, op.id)) {
      ArcOption opt;
      opt.arc = arc;
      const std::string tag = fmt::format("{}_{}to{}", op.id, arc.pickup, arc.dropoff);
      if (f_ == Formulation::Arc) {
        opt.interval = arc.legs.empty() ? model.add_interval("xa_" + tag, 0, true)
                                        : model.add_interval("xa_" + tag, arc.total_travel, model.horizon(), true);
      } else {
        opt.interval = model.add_interval("ya_" + tag, *op.processing_time(arc.dropoff), true);
        machine_members_[arc.dropoff].push_back(opt.interval);
      }
      alternatives.push_back(opt.interval);

      std::vector<cp::IntervalId> leg_intervals;
      for (const Leg& leg : arc.legs) {
        std::vector<LegOption> per_bot;
        std::vector<cp::IntervalId> ids;
        for (TransbotId v : inst_.transbots_in_zone(leg.zone)) {
          auto x = model.add_interval(fmt::format("{}_{}_l{}_v{}", f_ == Formulation::Arc ? "xolv" : "xlv", op.id, leg.id, v),
                                      leg.travel, true);
          per_bot.push_back({x, leg.id, v});
          ids.push_back(x);
          bot_members_[v].emplace_back(x, leg.id);
          leg_intervals.push_back(x);
        }
        // exactly one zone-compatible transbot per active leg
        model.add_presence_sum(opt.interval, ids, cp::SumRelation::Equal);
        model.add_presence_sum(opt.interval, ids, cp::SumRelation::AtMostOne);
        opt.legs.push_back(std::move(per_bot));
      }
      if (opt.legs.size() == 2) {
        for (const auto& first : opt.legs[0])
          for (const auto& second : opt.legs[1])
            model.add_conditional_precedence(second.interval, first.interval, second.interval);
      }
      if (f_ == Formulation::Arc) {
        if (!leg_intervals.empty()) model.add_span(opt.interval, leg_intervals);
      } else {
        if (arc.legs.empty()) {
          opt.stay = model.add_interval("stay_" + tag, 0, true);
          model.add_presence_sum(opt.interval, {*opt.stay}, cp::SumRelation::Equal);
          covered.push_back(*opt.stay);
        }
        covered.insert(covered.end(), leg_intervals.begin(), leg_intervals.end());
      }
      ov.arcs.push_back(std::move(opt));
    }
    if (f_ == Formulation::Arc) {
      model.add_alternative(ov.transfer, alternatives);
    } else {
      model.add_alternative(ov.operation, alternatives);
      model.add_span(ov.transfer, covered);
    }
  }

  // The transfer feeding `op` must start where `pred` was processed (or at the
  // stocker) and end where `op` is processed.
  void link_stations(std::optional<OperationId> pred, OperationId op) {
    cp::Model& model = built_.model;
    const auto& vars = built_.vars;
    const auto& ov = vars.ops[op];
    if (f_ == Formulation::Arc) {
      auto machine_var = [](const OperationVars& v, MachineId m) {
        for (const auto& [mm, id] : v.machines)
          if (mm == m) return id;
        throw std::logic_error("arc endpoint outside eligibility");
      };
      for (const auto& opt : ov.arcs) {
        model.add_presence_implication(opt.interval, machine_var(ov, opt.arc.dropoff));
        if (pred) model.add_presence_implication(opt.interval, machine_var(vars.ops[*pred], opt.arc.pickup));
      }
      return;
    }
    if (!pred) return;  // first-operation arcs all start at the stocker
    const auto& pv = vars.ops[*pred];
    for (const auto& alt : inst_.operation(*pred).eligibility) {
      std::vector<cp::IntervalId> into, out_of;
      for (const auto& a : pv.arcs)
        if (a.arc.dropoff == alt.machine) into.push_back(a.interval);
      for (const auto& a : ov.arcs)
        if (a.arc.pickup == alt.machine) out_of.push_back(a.interval);
      model.add_presence_sum(into, out_of);
    }
  }

  void add_transbot_sequences() {
    cp::Model& model = built_.model;
    auto& vars = built_.vars;
    const int legs = static_cast<int>(table_.legs().size());
    const int stations = static_cast<int>(inst_.stations.size());
    const int size = options_.initial_deadhead ? legs + stations : legs;
    auto matrix = std::make_shared<cp::TransitionMatrix>(size);
    const auto base = build_leg_matrix(inst_, table_.legs());
    for (int a = 0; a < legs; ++a)
      for (int b = 0; b < legs; ++b) matrix->at(a, b) = base.at(a, b);
    if (options_.initial_deadhead) {
      for (int s = 0; s < stations; ++s)
        for (int l = 0; l < legs; ++l) {
          matrix->at(legs + s, l) = inst_.travel_time(s, table_.leg(l).pickup);
          matrix->at(l, legs + s) = model.horizon() + 1;  // nothing precedes the origin
        }
    }
    for (const auto& bot : inst_.transbots) {
      std::vector<cp::IntervalId> members;
      std::vector<int> types;
      if (options_.initial_deadhead) {
        auto origin = model.add_interval(fmt::format("origin_v{}", bot.id), 0, false);
        model.restrict_start(origin, 0, 0);
        vars.origins.push_back(origin);
        members.push_back(origin);
        types.push_back(legs + bot.initial_station);
      }
      for (const auto& [id, leg] : bot_members_[bot.id]) {
        members.push_back(id);
        types.push_back(leg);
      }
      auto seq = model.add_sequence(members, types);
      model.add_no_overlap(seq, matrix);
      vars.transbot_sequences.push_back(seq);
    }
  }

  const Instance& inst_;
  Formulation f_;
  BuildOptions options_;
  LegTable table_;
  BuiltModel built_;
  std::vector<std::vector<cp::IntervalId>> machine_members_;
  std::vector<std::vector<std::pair<cp::IntervalId, int>>> bot_members_;
};

}  // namespace

Time horizon_bound(const Instance& instance) {
  const Time dmax = max_travel(instance);
  Time h = dmax;
  for (const auto& op : instance.operations) {
    Time worst = 0;
    for (const auto& arc : enumerate_arcs(instance, op.id))
      worst = std::max(worst, arc.total_travel + static_cast<Time>(arc.legs.size()) * dmax);
    h += op.max_processing_time() + worst;
  }
  return h;
}

BuiltModel build_arc_model(const Instance& instance, const BuildOptions& options) {
  require_valid(instance);
  return Builder(instance, Formulation::Arc, options).build();
}

BuiltModel build_embedded_model(const Instance& instance, const BuildOptions& options) {
  require_valid(instance);
  return Builder(instance, Formulation::Embedded, options).build();
}

BuiltModel build_fjsp_relaxation(const Instance& instance) {
  require_valid(instance);
  Time horizon = 0;
  for (const auto& op : instance.operations) horizon += op.max_processing_time();
  BuiltModel built{cp::Model(horizon), {}};
  auto& model = built.model;
  auto& vars = built.vars;
  vars.formulation = Formulation::Relaxation;
  vars.ops.resize(instance.operations.size());
  std::vector<std::vector<cp::IntervalId>> members(instance.stations.size());
  for (const auto& op : instance.operations) {
    auto& ov = vars.ops[op.id];
    Time pmin = op.eligibility.front().processing_time, pmax = pmin;
    for (const auto& alt : op.eligibility) {
      pmin = std::min(pmin, alt.processing_time);
      pmax = std::max(pmax, alt.processing_time);
    }
    ov.operation = model.add_interval(fmt::format("y_{}", op.id), pmin, pmax, false);
    std::vector<cp::IntervalId> options;
    for (const auto& alt : op.eligibility) {
      auto y = model.add_interval(fmt::format("y_{}_m{}", op.id, alt.machine), alt.processing_time, true);
      ov.machines.emplace_back(alt.machine, y);
      options.push_back(y);
      members[alt.machine].push_back(y);
    }
    model.add_alternative(ov.operation, options);
  }
  for (const auto& op : instance.operations)
    if (const auto pred = predecessor(instance, op.id))
      model.add_end_before_start(vars.ops[*pred].operation, vars.ops[op.id].operation);
  for (MachineId m : instance.machines()) {
    auto seq = model.add_sequence(members[m]);
    model.add_no_overlap(seq);
    if (static_cast<int>(vars.machine_sequences.size()) <= m) vars.machine_sequences.resize(m + 1);
    vars.machine_sequences[m] = seq;
  }
  std::vector<cp::IntervalId> objective;
  for (const auto& ov : vars.ops) objective.push_back(ov.operation);
  model.minimize_max_end(objective);
  return built;
}

BuiltModel build_model(const Instance& instance, Formulation f, const BuildOptions& options) {
  switch (f) {
    case Formulation::Arc: return build_arc_model(instance, options);
    case Formulation::Embedded: return build_embedded_model(instance, options);
    case Formulation::Relaxation: return build_fjsp_relaxation(instance);
  }
  throw std::invalid_argument("unknown formulation");
}

VariableCounts count_variables(const FormulationVars& vars) {
  VariableCounts c;
  const bool arc = vars.formulation == Formulation::Arc;
  for (const auto& ov : vars.ops) {
    ++c.y_o;
    if (vars.formulation != Formulation::Relaxation) ++c.x_o;
    c.y_m += static_cast<long>(ov.machines.size());
    for (const auto& a : ov.arcs) {
      (arc ? c.x_oa : c.y_a) += 1;
      for (const auto& per_bot : a.legs) (arc ? c.x_olv : c.x_lv) += static_cast<long>(per_bot.size());
    }
  }
  for (const auto& s : vars.machine_sequences)
    if (s.value >= 0) ++c.w_m;
  c.w_v = static_cast<long>(vars.transbot_sequences.size());
  return c;
}

Schedule extract_schedule(const Instance& instance, const FormulationVars& vars,
                          const std::vector<cp::IntervalValue>& assignment) {
  Schedule s;
  const int n = static_cast<int>(instance.operations.size());
  s.operations.resize(n);
  s.transfers.resize(n);
  auto value = [&](cp::IntervalId id) -> const cp::IntervalValue& { return assignment.at(id.value); };
  for (OperationId o = 0; o < n; ++o) {
    const auto& ov = vars.ops.at(o);
    std::optional<MachineId> machine;
    for (const auto& [m, id] : ov.machines)
      if (value(id).present) machine = m;
    const ArcOption* chosen = nullptr;
    for (const auto& a : ov.arcs)
      if (value(a.interval).present) chosen = &a;
    if (!machine && chosen) machine = chosen->arc.dropoff;
    if (!machine) throw std::logic_error(fmt::format("operation {} has no present machine option", o));
    const auto& y = value(ov.operation);
    s.operations[o] = {*machine, y.start, y.end};
    if (!chosen) continue;
    for (const auto& per_bot : chosen->legs) {
      for (const auto& opt : per_bot) {
        const auto& x = value(opt.interval);
        if (!x.present) continue;
        const Leg& leg = chosen->arc.legs.at(&per_bot - chosen->legs.data());
        s.transfers[o].push_back({leg.id, leg.pickup, leg.dropoff, leg.position, opt.transbot, x.start, x.end});
      }
    }
  }
  s.makespan = compute_makespan(instance, s);
  return s;
}

std::vector<cp::WarmStartValue> warm_start_from_schedule(const FormulationVars& vars, const Schedule& schedule) {
  std::vector<cp::WarmStartValue> out;
  for (std::size_t o = 0; o < vars.ops.size(); ++o) {
    const auto& ov = vars.ops[o];
    const auto& op = schedule.operations.at(o);
    const auto& legs = schedule.transfers.at(o);
    for (const auto& [m, id] : ov.machines) out.push_back({id, m == op.machine, op.start});
    const StationId pickup = legs.empty() ? op.machine : legs.front().pickup;
    for (const auto& a : ov.arcs) {
      const bool chosen = a.arc.dropoff == op.machine && (legs.empty() ? a.arc.legs.empty() : a.arc.pickup == pickup);
      if (vars.formulation == Formulation::Embedded) out.push_back({a.interval, chosen, op.start});
      else if (a.arc.legs.empty()) out.push_back({a.interval, chosen, op.start});
      if (a.stay) out.push_back({*a.stay, chosen, op.start});
      for (std::size_t p = 0; p < a.legs.size(); ++p)
        for (const auto& opt : a.legs[p]) {
          bool present = false;
          Time start = 0;
          if (chosen && p < legs.size() && legs[p].transbot == opt.transbot) present = true, start = legs[p].start;
          out.push_back({opt.interval, present, start});
        }
    }
  }
  return out;
}

std::optional<Schedule> greedy_schedule(const Instance& instance, const std::vector<MachineId>& machine_of,
                                        const std::vector<Time>& relaxed_start, bool initial_deadhead) {
  const int n = static_cast<int>(instance.operations.size());
  const LegTable table(instance);
  std::vector<OperationId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](OperationId a, OperationId b) {
    if (relaxed_start[a] != relaxed_start[b]) return relaxed_start[a] < relaxed_start[b];
    const auto& oa = instance.operations[a];
    const auto& ob = instance.operations[b];
    if (oa.job == ob.job) return oa.order_index < ob.order_index;
    return a < b;
  });

  struct Placed {
    StationId pickup, dropoff;
    Time start, end;
  };
  std::vector<std::vector<Placed>> bot_legs(instance.transbots.size());
  std::map<MachineId, Time> machine_free;
  Schedule s;
  s.operations.resize(n);
  s.transfers.resize(n);
  std::vector<bool> done(n, false);

  for (OperationId o : order) {
    const auto pred = predecessor(instance, o);
    if (pred && !done[*pred]) return std::nullopt;  // inconsistent relaxed order
    const MachineId target = machine_of.at(o);
    const auto p = instance.operation(o).processing_time(target);
    if (!p) return std::nullopt;
    const StationId pickup = pred ? s.operations[*pred].machine : instance.stocker();
    Time t = pred ? s.operations[*pred].end : 0;
    for (const Leg& leg : table.arc(pickup, target).legs) {
      std::optional<TransbotId> best;
      Time best_start = 0;
      for (TransbotId v : instance.transbots_in_zone(leg.zone)) {
        Time start = t;
        if (initial_deadhead)
          start = std::max(start, instance.travel_time(instance.transbots[v].initial_station, leg.pickup));
        for (const auto& k : bot_legs[v]) start = std::max(start, k.end + instance.travel_time(k.dropoff, leg.pickup));
        if (!best || start < best_start) best = v, best_start = start;
      }
      if (!best) return std::nullopt;
      const Time end = best_start + leg.travel;
      bot_legs[*best].push_back({leg.pickup, leg.dropoff, best_start, end});
      s.transfers[o].push_back({leg.id, leg.pickup, leg.dropoff, leg.position, *best, best_start, end});
      t = end;
    }
    const Time start = std::max(t, machine_free[target]);
    s.operations[o] = {target, start, start + *p};
    machine_free[target] = start + *p;
    done[o] = true;
  }
  s.makespan = compute_makespan(instance, s);
  return s;
}

SolveOutcome solve_with_acceleration(const Instance& instance, Formulation f, const AccelerationConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  SolveOutcome outcome;
  cp::SolverConfig main = config.solver;
  std::optional<Schedule> warm;

  if (f != Formulation::Relaxation && (config.relaxation || config.warm_start)) {
    const auto relax = build_fjsp_relaxation(instance);
    cp::SolverConfig rc = config.solver;
    rc.time_limit = std::max(1e-3, config.solver.time_limit * config.relaxation_share);
    rc.warm_start.clear();
    rc.lower_bound.reset();
    const auto rr = cp::solve(relax.model, rc);
    if (config.relaxation && rr.status != cp::SolveStatus::Infeasible) {
      outcome.relaxation_bound = rr.status == cp::SolveStatus::Optimal ? *rr.objective : rr.bound;
      main.lower_bound = std::max(main.lower_bound.value_or(0), *outcome.relaxation_bound);
    }
    if (config.warm_start && rr.incumbent) {
      std::vector<MachineId> machine_of(instance.operations.size());
      std::vector<Time> starts(instance.operations.size());
      const auto relaxed = extract_schedule(instance, relax.vars, *rr.incumbent);
      for (std::size_t o = 0; o < machine_of.size(); ++o) {
        machine_of[o] = relaxed.operations[o].machine;
        starts[o] = relaxed.operations[o].start;
      }
      warm = greedy_schedule(instance, machine_of, starts, config.build.initial_deadhead);
    }
    const double used = std::chrono::duration<double>(Clock::now() - start).count();
    main.time_limit = std::max(1e-3, config.solver.time_limit - used);
  }

  auto built = build_model(instance, f, config.build);
  if (warm) {
    main.warm_start = warm_start_from_schedule(built.vars, *warm);
    outcome.warm_start_built = true;
  }
  outcome.report = cp::solve(built.model, main);
  outcome.report.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (outcome.report.incumbent) outcome.schedule = extract_schedule(instance, built.vars, *outcome.report.incumbent);
  return outcome;
}

}  // namespace fjspth
