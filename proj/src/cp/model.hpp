#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fjspth::cp {

using Time = std::int64_t;

struct IntervalId {
  int value = -1;
  bool operator==(const IntervalId&) const = default;
  auto operator<=>(const IntervalId&) const = default;
};

struct SequenceId {
  int value = -1;
  bool operator==(const SequenceId&) const = default;
};

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Declared shape of an interval variable. Lengths may span a range; intervals
// used as alternative/span masters often do.
struct IntervalDef {
  std::string name;
  bool optional = false;
  Time start_min = 0;
  Time start_max = 0;
  Time end_min = 0;
  Time end_max = 0;
  Time length_min = 0;
  Time length_max = 0;
  int forced_presence = -1;  // -1 free, 0 absent, 1 present
};

// Square matrix of transition delays between member types.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(int size) : size_(size), cells_(static_cast<std::size_t>(size) * size, 0) {}

  int size() const { return size_; }
  Time at(int from, int to) const { return cells_[static_cast<std::size_t>(from) * size_ + to]; }
  Time& at(int from, int to) { return cells_[static_cast<std::size_t>(from) * size_ + to]; }

 private:
  int size_ = 0;
  std::vector<Time> cells_;
};

struct SequenceDef {
  std::vector<IntervalId> members;
  std::vector<int> types;  // empty, or one type per member
};

enum class SumRelation { Equal, AtMostOne };

struct AlternativeC {
  IntervalId master;
  std::vector<IntervalId> options;
};
struct SpanC {
  IntervalId master;
  std::vector<IntervalId> covered;
};
struct EndBeforeStartC {
  IntervalId a, b;
  Time delay = 0;
};
// Equal: sum of lhs presences = sum of rhs presences. AtMostOne ignores lhs.
struct PresenceSumC {
  std::vector<IntervalId> lhs, rhs;
  SumRelation relation = SumRelation::Equal;
};
struct ImplicationC {
  IntervalId premise, conclusion;
};
// presence(guard) => endBeforeStart(a, b, delay)
struct ConditionalPrecedenceC {
  IntervalId guard, a, b;
  Time delay = 0;
};
// All present members pairwise disjoint; with a matrix, for every ordered pair
// i before j: start(j) >= end(i) + matrix[type(i)][type(j)].
struct NoOverlapC {
  SequenceId sequence;
  std::shared_ptr<const TransitionMatrix> matrix;
};

using Constraint = std::variant<AlternativeC, SpanC, EndBeforeStartC, PresenceSumC, ImplicationC,
                                ConditionalPrecedenceC, NoOverlapC>;

class Model {
 public:
  // Every interval is confined to [0, horizon].
  explicit Model(Time horizon) : horizon_(horizon) {}

  Time horizon() const { return horizon_; }

  IntervalId add_interval(std::string name, Time length, bool optional);
  IntervalId add_interval(std::string name, Time length_min, Time length_max, bool optional);
  SequenceId add_sequence(std::vector<IntervalId> members, std::vector<int> types = {});

  void add_alternative(IntervalId master, std::vector<IntervalId> options);
  void add_span(IntervalId master, std::vector<IntervalId> covered);
  void add_end_before_start(IntervalId a, IntervalId b, Time delay = 0);
  void add_presence_sum(IntervalId lhs, std::vector<IntervalId> rhs, SumRelation relation);
  void add_presence_sum(std::vector<IntervalId> lhs, std::vector<IntervalId> rhs);
  void add_presence_implication(IntervalId premise, IntervalId conclusion);
  void add_conditional_precedence(IntervalId guard, IntervalId a, IntervalId b, Time delay = 0);
  void add_no_overlap(SequenceId sequence, std::shared_ptr<const TransitionMatrix> matrix = nullptr);

  // Domain restrictions applied before search.
  void set_presence(IntervalId id, bool present);
  void restrict_start(IntervalId id, Time lo, Time hi);
  void restrict_end(IntervalId id, Time lo, Time hi);

  void minimize_max_end(std::vector<IntervalId> intervals) { objective_ = std::move(intervals); }

  const std::vector<IntervalDef>& intervals() const { return intervals_; }
  const IntervalDef& interval(IntervalId id) const { return intervals_.at(id.value); }
  const std::vector<SequenceDef>& sequences() const { return sequences_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<IntervalId>& objective() const { return objective_; }

  // Throws ModelError on dangling references or inconsistent declarations.
  void check() const;

 private:
  void check_id(IntervalId id, const char* where) const;

  Time horizon_;
  std::vector<IntervalDef> intervals_;
  std::vector<SequenceDef> sequences_;
  std::vector<Constraint> constraints_;
  std::vector<IntervalId> objective_;
};

}  // namespace fjspth::cp
