#include "cp/store.hpp"

#include <algorithm>
#include <limits>

namespace fjspth::cp {

namespace {

constexpr Time kInf = std::numeric_limits<Time>::max() / 4;

}  // namespace

Store::Store(const Model& model) : model_(model) {
  const auto& defs = model.intervals();
  const int n = static_cast<int>(defs.size());
  domains_.resize(n);
  watches_.resize(n);
  saved_epoch_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const auto& d = defs[i];
    Domain& x = domains_[i];
    x.smin = d.start_min;
    x.smax = d.start_max;
    x.emin = d.end_min;
    x.emax = d.end_max;
    x.lmin = d.length_min;
    x.lmax = d.length_max;
    if (!d.optional) {
      x.presence = Presence::Present;
      if (d.forced_presence == 0) root_failed_ = true;
    } else {
      x.presence = d.forced_presence == 1 ? Presence::Present
                   : d.forced_presence == 0 ? Presence::Absent
                                            : Presence::Undecided;
    }
  }

  const auto& cons = model.constraints();
  const int nc = static_cast<int>(cons.size());
  queued_.assign(nc, 0);
  dirty_.resize(nc);
  dirty_flag_.resize(nc);
  sequence_members_.resize(nc);
  sequence_types_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    auto watch = [&](IntervalId id) { watches_[id.value].push_back({c, -1}); };
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, AlternativeC>) {
            watch(k.master);
            for (auto id : k.options) watch(id);
          } else if constexpr (std::is_same_v<K, SpanC>) {
            watch(k.master);
            for (auto id : k.covered) watch(id);
          } else if constexpr (std::is_same_v<K, EndBeforeStartC>) {
            watch(k.a);
            watch(k.b);
          } else if constexpr (std::is_same_v<K, PresenceSumC>) {
            for (auto id : k.lhs) watch(id);
            for (auto id : k.rhs) watch(id);
          } else if constexpr (std::is_same_v<K, ImplicationC>) {
            watch(k.premise);
            watch(k.conclusion);
          } else if constexpr (std::is_same_v<K, ConditionalPrecedenceC>) {
            watch(k.guard);
            watch(k.a);
            watch(k.b);
          } else {
            const auto& seq = model.sequences()[k.sequence.value];
            auto& members = sequence_members_[c];
            for (std::size_t p = 0; p < seq.members.size(); ++p) {
              members.push_back(seq.members[p].value);
              watches_[seq.members[p].value].push_back({c, static_cast<int>(p)});
            }
            sequence_types_[c] = seq.types;
            dirty_flag_[c].assign(members.size(), 0);
          }
        },
        cons[c]);
  }
  for (auto id : model.objective()) objective_.push_back(id.value);

  for (int i = 0; i < n && !root_failed_; ++i)
    if (!normalize(i)) root_failed_ = true;
  trail_.clear();
}

void Store::save(int i) {
  if (saved_epoch_[i] == epoch_) return;
  trail_.emplace_back(i, domains_[i]);
  saved_epoch_[i] = epoch_;
}

std::size_t Store::mark() {
  ++epoch_;
  return trail_.size();
}

void Store::undo(std::size_t to) {
  while (trail_.size() > to) {
    auto& [i, d] = trail_.back();
    domains_[i] = d;
    trail_.pop_back();
  }
  ++epoch_;
}

void Store::touched(int i) {
  for (const auto& w : watches_[i]) {
    if (!queued_[w.constraint]) {
      queued_[w.constraint] = 1;
      queue_.push_back(w.constraint);
    }
    if (w.member >= 0 && !dirty_flag_[w.constraint][w.member]) {
      dirty_flag_[w.constraint][w.member] = 1;
      dirty_[w.constraint].push_back(w.member);
    }
  }
}

void Store::clear_queue() {
  for (int c : queue_) queued_[c] = 0;
  queue_.clear();
  for (std::size_t c = 0; c < dirty_.size(); ++c) {
    for (int p : dirty_[c]) dirty_flag_[c][p] = 0;
    dirty_[c].clear();
  }
}

void Store::schedule_all() {
  for (int i = 0; i < size(); ++i) touched(i);
}

bool Store::empty_domain(int i) {
  Domain& d = domains_[i];
  if (d.presence == Presence::Present) return false;
  d.presence = Presence::Absent;
  return true;
}

bool Store::normalize(int i) {
  Domain& d = domains_[i];
  if (d.absent()) return true;
  for (;;) {
    const Domain before = d;
    d.smin = std::max(d.smin, d.emin - d.lmax);
    d.emin = std::max(d.emin, d.smin + d.lmin);
    d.smax = std::min(d.smax, d.emax - d.lmin);
    d.emax = std::min(d.emax, d.smax + d.lmax);
    d.lmin = std::max(d.lmin, d.emin - d.smax);
    d.lmax = std::min(d.lmax, d.emax - d.smin);
    if (d.smin > d.smax || d.emin > d.emax || d.lmin > d.lmax) return empty_domain(i);
    if (d == before) return true;
  }
}

#define FJSPTH_BOUND_SETTER(NAME, FIELD, CMP)          \
  bool Store::NAME(int i, Time v) {                    \
    Domain& d = domains_[i];                           \
    if (d.absent() || !(v CMP d.FIELD)) return true;   \
    save(i);                                           \
    d.FIELD = v;                                       \
    const bool ok = normalize(i);                      \
    touched(i);                                        \
    return ok;                                         \
  }

FJSPTH_BOUND_SETTER(set_smin, smin, >)
FJSPTH_BOUND_SETTER(set_smax, smax, <)
FJSPTH_BOUND_SETTER(set_emin, emin, >)
FJSPTH_BOUND_SETTER(set_emax, emax, <)
FJSPTH_BOUND_SETTER(set_lmin, lmin, >)
FJSPTH_BOUND_SETTER(set_lmax, lmax, <)

#undef FJSPTH_BOUND_SETTER

bool Store::set_present(int i) {
  Domain& d = domains_[i];
  if (d.present()) return true;
  if (d.absent()) return false;
  save(i);
  d.presence = Presence::Present;
  touched(i);
  return true;
}

bool Store::set_absent(int i) {
  Domain& d = domains_[i];
  if (d.absent()) return true;
  if (d.present()) return false;
  save(i);
  d.presence = Presence::Absent;
  touched(i);
  return true;
}

void Store::set_postponed(int i, Time at) {
  save(i);
  domains_[i].postponed_at = at;
}

bool Store::apply_objective_bound(Time ub) {
  for (int i : objective_)
    if (!set_emax(i, ub)) return false;
  return true;
}

Time Store::objective_lower_bound() const {
  Time lb = 0;
  for (int i : objective_)
    if (domains_[i].present()) lb = std::max(lb, domains_[i].emin);
  return lb;
}

bool Store::propagate() {
  if (root_failed_) {
    clear_queue();
    return false;
  }
  while (!queue_.empty()) {
    const int c = queue_.front();
    queue_.pop_front();
    queued_[c] = 0;
    ++propagations_;
    if (!run(c)) {
      clear_queue();
      return false;
    }
  }
  return true;
}

bool Store::run(int c) {
  return std::visit(
      [&](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AlternativeC>) return run_alternative(k);
        else if constexpr (std::is_same_v<K, SpanC>) return run_span(k);
        else if constexpr (std::is_same_v<K, EndBeforeStartC>) return run_end_before_start(k);
        else if constexpr (std::is_same_v<K, PresenceSumC>) return run_presence_sum(k);
        else if constexpr (std::is_same_v<K, ImplicationC>) return run_implication(k);
        else if constexpr (std::is_same_v<K, ConditionalPrecedenceC>) return run_conditional(k);
        else return run_no_overlap(c, k);
      },
      model_.constraints()[c]);
}

bool Store::run_alternative(const AlternativeC& c) {
  const int m = c.master.value;
  if (dom(m).absent()) {
    for (auto o : c.options)
      if (!set_absent(o.value)) return false;
    return true;
  }
  int present = 0, undecided = 0, last_undecided = -1;
  for (auto o : c.options) {
    const auto& d = dom(o.value);
    if (d.present()) ++present;
    else if (!d.absent()) ++undecided, last_undecided = o.value;
  }
  if (present > 1) return false;
  if (present == 1) {
    if (!set_present(m)) return false;
    for (auto o : c.options)
      if (!dom(o.value).present() && !set_absent(o.value)) return false;
  } else if (undecided == 0) {
    return set_absent(m);
  } else if (undecided == 1 && dom(m).present()) {
    if (!set_present(last_undecided)) return false;
  }

  Time smin = kInf, smax = -kInf, emin = kInf, emax = -kInf, lmin = kInf, lmax = -kInf;
  bool any = false;
  for (auto o : c.options) {
    const auto& d = dom(o.value);
    if (d.absent()) continue;
    any = true;
    smin = std::min(smin, d.smin);
    smax = std::max(smax, d.smax);
    emin = std::min(emin, d.emin);
    emax = std::max(emax, d.emax);
    lmin = std::min(lmin, d.lmin);
    lmax = std::max(lmax, d.lmax);
  }
  if (!any) return set_absent(m);
  if (!set_smin(m, smin) || !set_smax(m, smax) || !set_emin(m, emin) || !set_emax(m, emax) || !set_lmin(m, lmin) ||
      !set_lmax(m, lmax))
    return false;
  if (dom(m).absent()) return true;  // requeued; options handled next run
  for (auto o : c.options) {
    const int i = o.value;
    if (dom(i).absent()) continue;
    const Domain md = dom(m);
    if (!set_smin(i, md.smin) || !set_smax(i, md.smax) || !set_emin(i, md.emin) || !set_emax(i, md.emax) ||
        !set_lmin(i, md.lmin) || !set_lmax(i, md.lmax))
      return false;
  }
  return true;
}

bool Store::run_span(const SpanC& c) {
  const int m = c.master.value;
  if (dom(m).absent()) {
    for (auto o : c.covered)
      if (!set_absent(o.value)) return false;
    return true;
  }
  int present = 0, undecided = 0, last_undecided = -1;
  for (auto o : c.covered) {
    const auto& d = dom(o.value);
    if (d.present()) ++present;
    else if (!d.absent()) ++undecided, last_undecided = o.value;
  }
  if (present > 0) {
    if (!set_present(m)) return false;
  } else if (undecided == 0) {
    return set_absent(m);
  } else if (undecided == 1 && dom(m).present()) {
    if (!set_present(last_undecided)) return false;
  }

  Time smin = kInf, smax_any = -kInf, emin_any = kInf, emax = -kInf;
  Time smax_present = kInf, emin_present = -kInf;
  int candidates = 0, only = -1;
  for (auto o : c.covered) {
    const auto& d = dom(o.value);
    if (d.absent()) continue;
    ++candidates;
    only = o.value;
    smin = std::min(smin, d.smin);
    smax_any = std::max(smax_any, d.smax);
    emin_any = std::min(emin_any, d.emin);
    emax = std::max(emax, d.emax);
    if (d.present()) {
      smax_present = std::min(smax_present, d.smax);
      emin_present = std::max(emin_present, d.emin);
    }
  }
  if (candidates == 0) return set_absent(m);
  if (!set_smin(m, smin) || !set_emax(m, emax) || !set_smax(m, smax_any) || !set_emin(m, emin_any)) return false;
  if (present > 0 && (!set_smax(m, smax_present) || !set_emin(m, emin_present))) return false;
  if (dom(m).absent()) return true;
  for (auto o : c.covered) {
    const int i = o.value;
    if (dom(i).absent()) continue;
    const Domain md = dom(m);
    if (!set_smin(i, md.smin) || !set_emax(i, md.emax)) return false;
  }
  if (candidates == 1 && dom(m).present()) {
    const Domain md = dom(m);
    if (!set_smax(only, md.smax) || !set_emin(only, md.emin)) return false;
  }
  return true;
}

bool Store::precedence(int a, int b, Time delay) {
  if (dom(a).absent() || dom(b).absent()) return true;
  if (dom(a).present() && !set_smin(b, dom(a).emin + delay)) return false;
  if (dom(b).present() && !dom(a).absent() && !set_emax(a, dom(b).smax - delay)) return false;
  return true;
}

bool Store::run_end_before_start(const EndBeforeStartC& c) { return precedence(c.a.value, c.b.value, c.delay); }

bool Store::run_conditional(const ConditionalPrecedenceC& c) {
  const auto& g = dom(c.guard.value);
  if (g.absent()) return true;
  if (g.present()) return precedence(c.a.value, c.b.value, c.delay);
  const auto& a = dom(c.a.value);
  const auto& b = dom(c.b.value);
  if (a.present() && b.present() && a.emin + c.delay > b.smax) return set_absent(c.guard.value);
  return true;
}

bool Store::run_presence_sum(const PresenceSumC& c) {
  int rp = 0, ru = 0;
  for (auto id : c.rhs) {
    const auto& d = dom(id.value);
    if (d.present()) ++rp;
    else if (!d.absent()) ++ru;
  }
  auto force = [&](const std::vector<IntervalId>& list, bool present) {
    for (auto id : list) {
      const auto& d = dom(id.value);
      if (d.present() || d.absent()) continue;
      if (!(present ? set_present(id.value) : set_absent(id.value))) return false;
    }
    return true;
  };
  if (c.relation == SumRelation::AtMostOne) {
    if (rp > 1) return false;
    if (rp == 1) return force(c.rhs, false);
    return true;
  }
  int lp = 0, lu = 0;
  for (auto id : c.lhs) {
    const auto& d = dom(id.value);
    if (d.present()) ++lp;
    else if (!d.absent()) ++lu;
  }
  const int lmin = lp, lmax = lp + lu, rmin = rp, rmax = rp + ru;
  if (lmin > rmax || rmin > lmax) return false;
  if (lmax == rmin) {
    if (!force(c.lhs, true) || !force(c.rhs, false)) return false;
  } else if (lmin == rmax) {
    if (!force(c.lhs, false) || !force(c.rhs, true)) return false;
  }
  return true;
}

bool Store::run_implication(const ImplicationC& c) {
  if (dom(c.premise.value).present() && !set_present(c.conclusion.value)) return false;
  if (dom(c.conclusion.value).absent() && !set_absent(c.premise.value)) return false;
  return true;
}

bool Store::disjoint_pair(int i, int j, Time t_ij, Time t_ji) {
  const Domain a = dom(i);
  const Domain b = dom(j);
  const bool can_ij = a.emin + t_ij <= b.smax;
  const bool can_ji = b.emin + t_ji <= a.smax;
  if (can_ij && can_ji) return true;
  if (!can_ij && !can_ji) {
    if (a.present() && b.present()) return false;
    return a.present() ? set_absent(j) : set_absent(i);
  }
  if (can_ij) {  // i before j
    if (a.present() && !set_smin(j, a.emin + t_ij)) return false;
    if (b.present() && !set_emax(i, b.smax - t_ij)) return false;
  } else {  // j before i
    if (b.present() && !set_smin(i, b.emin + t_ji)) return false;
    if (a.present() && !set_emax(j, a.smax - t_ji)) return false;
  }
  return true;
}

bool Store::run_no_overlap(int c, const NoOverlapC& k) {
  const auto& members = sequence_members_[c];
  const auto& types = sequence_types_[c];
  const TransitionMatrix* matrix = k.matrix.get();
  std::vector<int> work;
  work.swap(dirty_[c]);
  for (int p : work) dirty_flag_[c][p] = 0;
  const int n = static_cast<int>(members.size());
  for (int p : work) {
    const int i = members[p];
    for (int q = 0; q < n; ++q) {
      if (q == p) continue;
      if (dom(i).absent()) break;
      const int j = members[q];
      if (dom(j).absent()) continue;
      if (!dom(i).present() && !dom(j).present()) continue;
      const Time t_ij = matrix ? matrix->at(types[p], types[q]) : 0;
      const Time t_ji = matrix ? matrix->at(types[q], types[p]) : 0;
      if (!disjoint_pair(i, j, t_ij, t_ji)) return false;
    }
  }
  return true;
}

}  // namespace fjspth::cp
