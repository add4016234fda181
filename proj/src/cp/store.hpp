#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "cp/model.hpp"

namespace fjspth::cp {

enum class Presence : std::uint8_t { Absent, Present, Undecided };

// Bounds of an interval, conditional on its presence.
struct Domain {
  Time smin = 0, smax = 0;
  Time emin = 0, emax = 0;
  Time lmin = 0, lmax = 0;
  Presence presence = Presence::Undecided;
  Time postponed_at = -1;  // search bookkeeping: smin when last postponed

  bool absent() const { return presence == Presence::Absent; }
  bool present() const { return presence == Presence::Present; }
  bool fixed() const { return absent() || (present() && smin == smax && emin == emax); }

  bool operator==(const Domain&) const = default;
};

// Domains of one search worker plus the propagation queue and undo trail.
// Every modifier returns false on failure; after a failure the caller must
// undo to an earlier mark before continuing.
class Store {
 public:
  explicit Store(const Model& model);

  const Model& model() const { return model_; }
  int size() const { return static_cast<int>(domains_.size()); }
  const Domain& dom(int i) const { return domains_[i]; }
  const std::vector<Domain>& domains() const { return domains_; }

  bool set_present(int i);
  bool set_absent(int i);
  bool set_smin(int i, Time v);
  bool set_smax(int i, Time v);
  bool set_emin(int i, Time v);
  bool set_emax(int i, Time v);
  bool set_lmin(int i, Time v);
  bool set_lmax(int i, Time v);
  void set_postponed(int i, Time at);

  // Runs queued propagators to a fixpoint.
  bool propagate();
  // Queues every constraint (used once at the root).
  void schedule_all();

  // Undo trail. mark() returns a position to restore with undo().
  std::size_t mark();
  void undo(std::size_t to);

  // Caps the end of every objective interval.
  bool apply_objective_bound(Time ub);
  // Max end over present objective intervals' earliest ends.
  Time objective_lower_bound() const;

  std::int64_t propagations() const { return propagations_; }

 private:
  struct Watch {
    int constraint;
    int member;  // position in the noOverlap sequence, -1 otherwise
  };

  void save(int i);
  bool empty_domain(int i);
  bool normalize(int i);
  void touched(int i);
  void clear_queue();

  bool run(int c);
  bool run_alternative(const AlternativeC& c);
  bool run_span(const SpanC& c);
  bool precedence(int a, int b, Time delay);
  bool run_end_before_start(const EndBeforeStartC& c);
  bool run_presence_sum(const PresenceSumC& c);
  bool run_implication(const ImplicationC& c);
  bool run_conditional(const ConditionalPrecedenceC& c);
  bool run_no_overlap(int c, const NoOverlapC& k);
  bool disjoint_pair(int i, int j, Time t_ij, Time t_ji);

  const Model& model_;
  std::vector<Domain> domains_;
  std::vector<std::vector<Watch>> watches_;
  std::vector<std::vector<int>> sequence_members_;  // per constraint, interval indices (noOverlap only)
  std::vector<std::vector<int>> sequence_types_;

  std::deque<int> queue_;
  std::vector<char> queued_;
  std::vector<std::vector<int>> dirty_;  // per noOverlap constraint: dirty member positions
  std::vector<std::vector<char>> dirty_flag_;

  std::vector<std::pair<int, Domain>> trail_;
  std::vector<std::uint64_t> saved_epoch_;
  std::uint64_t epoch_ = 1;

  std::vector<int> objective_;
  std::int64_t propagations_ = 0;
  bool root_failed_ = false;
};

}  // namespace fjspth::cp
