#include "cp/model.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace fjspth::cp {

IntervalId Model::add_interval(std::string name, Time length, bool optional) {
  return add_interval(std::move(name), length, length, optional);
}

IntervalId Model::add_interval(std::string name, Time length_min, Time length_max, bool optional) {
  if (length_min < 0 || length_max < length_min)
    throw ModelError(fmt::format("interval '{}' has invalid length range [{}, {}]", name, length_min, length_max));
  IntervalDef def;
  def.name = std::move(name);
  def.optional = optional;
  def.start_min = 0;
  def.start_max = horizon_;
  def.end_min = 0;
  def.end_max = horizon_;
  def.length_min = length_min;
  def.length_max = length_max;
  intervals_.push_back(std::move(def));
  return IntervalId{static_cast<int>(intervals_.size()) - 1};
}

void Model::check_id(IntervalId id, const char* where) const {
  if (id.value < 0 || id.value >= static_cast<int>(intervals_.size()))
    throw ModelError(fmt::format("{} references unknown interval {}", where, id.value));
}

SequenceId Model::add_sequence(std::vector<IntervalId> members, std::vector<int> types) {
  for (auto id : members) check_id(id, "sequence");
  if (!types.empty() && types.size() != members.size())
    throw ModelError(fmt::format("sequence has {} members but {} types", members.size(), types.size()));
  sequences_.push_back({std::move(members), std::move(types)});
  return SequenceId{static_cast<int>(sequences_.size()) - 1};
}

void Model::add_alternative(IntervalId master, std::vector<IntervalId> options) {
  if (options.empty()) throw ModelError(fmt::format("alternative on '{}' has no options", interval(master).name));
  constraints_.push_back(AlternativeC{master, std::move(options)});
}

void Model::add_span(IntervalId master, std::vector<IntervalId> covered) {
  if (covered.empty()) throw ModelError(fmt::format("span on '{}' covers nothing", interval(master).name));
  constraints_.push_back(SpanC{master, std::move(covered)});
}

void Model::add_end_before_start(IntervalId a, IntervalId b, Time delay) {
  constraints_.push_back(EndBeforeStartC{a, b, delay});
}

void Model::add_presence_sum(IntervalId lhs, std::vector<IntervalId> rhs, SumRelation relation) {
  if (relation == SumRelation::Equal && rhs.empty() && !interval(lhs).optional)
    throw ModelError(fmt::format("presence sum forces '{}' present with nothing on the right", interval(lhs).name));
  if (relation == SumRelation::AtMostOne)
    constraints_.push_back(PresenceSumC{{}, std::move(rhs), relation});
  else
    constraints_.push_back(PresenceSumC{{lhs}, std::move(rhs), relation});
}

void Model::add_presence_sum(std::vector<IntervalId> lhs, std::vector<IntervalId> rhs) {
  constraints_.push_back(PresenceSumC{std::move(lhs), std::move(rhs), SumRelation::Equal});
}

void Model::add_presence_implication(IntervalId premise, IntervalId conclusion) {
  constraints_.push_back(ImplicationC{premise, conclusion});
}

void Model::add_conditional_precedence(IntervalId guard, IntervalId a, IntervalId b, Time delay) {
  constraints_.push_back(ConditionalPrecedenceC{guard, a, b, delay});
}

void Model::add_no_overlap(SequenceId sequence, std::shared_ptr<const TransitionMatrix> matrix) {
  if (sequence.value < 0 || sequence.value >= static_cast<int>(sequences_.size()))
    throw ModelError(fmt::format("noOverlap references unknown sequence {}", sequence.value));
  const auto& seq = sequences_[sequence.value];
  if (matrix) {
    if (seq.types.size() != seq.members.size()) throw ModelError("noOverlap with a matrix needs typed members");
    for (int t : seq.types)
      if (t < 0 || t >= matrix->size())
        throw ModelError(fmt::format("member type {} outside transition matrix of size {}", t, matrix->size()));
  }
  constraints_.push_back(NoOverlapC{sequence, std::move(matrix)});
}

void Model::set_presence(IntervalId id, bool present) {
  check_id(id, "set_presence");
  intervals_[id.value].forced_presence = present ? 1 : 0;
}

void Model::restrict_start(IntervalId id, Time lo, Time hi) {
  check_id(id, "restrict_start");
  auto& d = intervals_[id.value];
  d.start_min = std::max(d.start_min, lo);
  d.start_max = std::min(d.start_max, hi);
}

void Model::restrict_end(IntervalId id, Time lo, Time hi) {
  check_id(id, "restrict_end");
  auto& d = intervals_[id.value];
  d.end_min = std::max(d.end_min, lo);
  d.end_max = std::min(d.end_max, hi);
}

void Model::check() const {
  auto ids = [&](const std::vector<IntervalId>& list, const char* where) {
    for (auto id : list) check_id(id, where);
  };
  for (const auto& c : constraints_) {
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, AlternativeC>) {
            check_id(k.master, "alternative");
            ids(k.options, "alternative");
          } else if constexpr (std::is_same_v<K, SpanC>) {
            check_id(k.master, "span");
            ids(k.covered, "span");
          } else if constexpr (std::is_same_v<K, EndBeforeStartC>) {
            check_id(k.a, "endBeforeStart");
            check_id(k.b, "endBeforeStart");
          } else if constexpr (std::is_same_v<K, PresenceSumC>) {
            ids(k.lhs, "presence sum");
            ids(k.rhs, "presence sum");
          } else if constexpr (std::is_same_v<K, ImplicationC>) {
            check_id(k.premise, "implication");
            check_id(k.conclusion, "implication");
          } else if constexpr (std::is_same_v<K, ConditionalPrecedenceC>) {
            check_id(k.guard, "conditional precedence");
            check_id(k.a, "conditional precedence");
            check_id(k.b, "conditional precedence");
          } else {
            if (k.sequence.value < 0 || k.sequence.value >= static_cast<int>(sequences_.size()))
              throw ModelError(fmt::format("noOverlap references unknown sequence {}", k.sequence.value));
          }
        },
        c);
  }
  for (const auto& s : sequences_) ids(s.members, "sequence");
  ids(objective_, "objective");
}

}  // namespace fjspth::cp
