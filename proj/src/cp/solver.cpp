#include "cp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include <fmt/format.h>

namespace fjspth::cp {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::TimeoutNoSolution: return "Timeout";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr Time kNone = std::numeric_limits<Time>::max();

struct Shared {
  std::atomic<Time> best{kNone};
  std::atomic<bool> stop{false};
  std::atomic<bool> proven{false};
  std::mutex mu;
  std::optional<std::vector<IntervalValue>> incumbent;
  std::vector<TracePoint> trace;
  Clock::time_point start;
  Clock::time_point deadline;
  Time lower_bound = 0;

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start).count(); }

  void offer(Time objective, std::vector<IntervalValue> values) {
    std::lock_guard lock(mu);
    if (objective >= best.load()) return;
    best.store(objective);
    incumbent = std::move(values);
    trace.push_back({elapsed(), objective});
    if (objective <= lower_bound) stop.store(true);
  }
};

enum class Outcome { Exhausted, LimitReached, Stopped };

// Intervals whose presence is tied together (an operation with its options,
// arcs and legs). LNS frees or keeps whole groups.
struct Groups {
  std::vector<int> of;                   // group per interval
  std::vector<std::vector<int>> members;
};

Groups presence_groups(const Model& model) {
  const int n = static_cast<int>(model.intervals().size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto join = [&](IntervalId a, IntervalId b) { parent[find(a.value)] = find(b.value); };
  for (const auto& c : model.constraints()) {
    if (const auto* a = std::get_if<AlternativeC>(&c))
      for (auto o : a->options) join(o, a->master);
    else if (const auto* s = std::get_if<SpanC>(&c))
      for (auto o : s->covered) join(o, s->master);
    else if (const auto* p = std::get_if<PresenceSumC>(&c)) {
      const IntervalId root = p->lhs.empty() ? p->rhs.front() : p->lhs.front();
      for (auto o : p->lhs) join(o, root);
      for (auto o : p->rhs) join(o, root);
    } else if (const auto* i = std::get_if<ImplicationC>(&c))
      join(i->premise, i->conclusion);
  }
  Groups g;
  g.of.assign(n, -1);
  std::vector<int> index(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (index[r] < 0) {
      index[r] = static_cast<int>(g.members.size());
      g.members.emplace_back();
    }
    g.of[i] = index[r];
    g.members[index[r]].push_back(i);
  }
  return g;
}

class Worker {
 public:
  Worker(const Model& model, Shared& shared, const std::vector<char>& leaf, const Groups& groups,
         const SolverConfig& config, std::uint64_t seed, bool randomize)
      : store_(model), shared_(shared), leaf_(leaf), groups_(groups), config_(config), rng_(seed),
        randomize_(randomize) {}

  // Root propagation; false when the model is infeasible.
  bool init() {
    store_.schedule_all();
    if (!store_.propagate()) return false;
    root_ = store_.mark();
    return true;
  }

  Time root_lower_bound() const { return store_.objective_lower_bound(); }

  // Fixes the given values and dives for a completion. Returns true when an
  // incumbent was produced.
  bool warm_start(const std::vector<WarmStartValue>& values, std::int64_t fail_limit) {
    bool ok = true;
    for (const auto& v : values) {
      const int i = v.id.value;
      if (i < 0 || i >= store_.size()) throw ModelError(fmt::format("warm start references unknown interval {}", i));
      if (v.present)
        ok = store_.set_present(i) && store_.set_smin(i, v.start) && store_.set_smax(i, v.start);
      else
        ok = store_.set_absent(i);
      if (!ok) break;
    }
    bool found = false;
    if (ok && store_.propagate()) {
      const std::int64_t nodes = nodes_, fails = fails_;
      stop_at_first_ = true;
      const Time before = shared_.best.load();
      dfs(fail_limit);
      found = shared_.best.load() < before;
      stop_at_first_ = false;
      nodes_ = nodes;
      fails_ = fails;
    }
    store_.undo(root_);
    return found;
  }

  Outcome run() {
    double limit = static_cast<double>(config_.initial_fail_limit);
    for (;;) {
      const std::int64_t before = fails_;
      const Outcome out = dfs(static_cast<std::int64_t>(limit));
      if (out != Outcome::LimitReached) return out;
      store_.undo(root_);
      ++restarts_;
      diversify_ = true;
      limit *= config_.restart_growth;
      if (config_.lns && lns(static_cast<double>(fails_ - before) * config_.lns_ratio) == Outcome::Stopped)
        return Outcome::Stopped;
    }
  }

  std::int64_t nodes() const { return nodes_; }
  std::int64_t fails() const { return fails_; }
  std::int64_t restarts() const { return restarts_; }

 private:
  enum class Kind { Presence, Time };
  struct Choice {
    std::size_t mark;
    int var;
    Kind kind;
    Time value;
    bool second;
  };
  enum class Select { Branch, DeadEnd, Complete };

  // Neighbourhood rounds around the shared incumbent until `budget` fails are
  // spent. Groups outside the neighbourhood keep their presence and may only
  // move earlier, so the incumbent stays inside every neighbourhood.
  Outcome lns(double budget) {
    const std::int64_t until = fails_ + static_cast<std::int64_t>(budget);
    const int groups = static_cast<int>(groups_.members.size());
    if (lns_size_ == 0) lns_size_ = std::clamp(groups / 10, std::min(groups, 4), groups);
    std::vector<IntervalValue> inc;
    std::vector<int> order(groups);
    std::vector<char> freed(groups);
    while (fails_ < until) {
      {
        std::lock_guard lock(shared_.mu);
        if (!shared_.incumbent) return Outcome::LimitReached;
        inc = *shared_.incumbent;
      }
      // Either a run of groups consecutive in incumbent start order or a
      // random sample.
      std::iota(order.begin(), order.end(), 0);
      std::fill(freed.begin(), freed.end(), 0);
      if (std::uniform_int_distribution<int>(0, 1)(rng_) == 0) {
        std::vector<Time> anchor(groups, std::numeric_limits<Time>::max());
        for (int i = 0; i < store_.size(); ++i)
          if (inc[i].present) anchor[groups_.of[i]] = std::min(anchor[groups_.of[i]], inc[i].start);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return anchor[a] < anchor[b]; });
        const int from = std::uniform_int_distribution<int>(0, groups - lns_size_)(rng_);
        for (int k = from; k < from + lns_size_; ++k) freed[order[k]] = 1;
      } else {
        std::shuffle(order.begin(), order.end(), rng_);
        for (int k = 0; k < lns_size_; ++k) freed[order[k]] = 1;
      }
      bool ok = true;
      for (int i = 0; i < store_.size() && ok; ++i) {
        if (freed[groups_.of[i]]) continue;
        ok = inc[i].present ? store_.set_present(i) && store_.set_smax(i, inc[i].start) : store_.set_absent(i);
      }
      Outcome out = Outcome::LimitReached;
      if (ok) out = dfs(config_.lns_fail_limit);
      store_.undo(root_);
      if (out == Outcome::Stopped) return out;
      // Grow after exhausting a neighbourhood, shrink after running out of fails.
      if (out == Outcome::Exhausted || !ok)
        lns_size_ = std::min(groups, lns_size_ + std::max(1, lns_size_ / 10));
      else
        lns_size_ = std::max(std::min(groups, 2), lns_size_ - std::max(1, lns_size_ / 20));
    }
    return Outcome::LimitReached;
  }

  bool should_stop() {
    if (shared_.stop.load(std::memory_order_relaxed)) return true;
    if ((++poll_ & 63) == 0 && Clock::now() >= shared_.deadline) {
      shared_.stop.store(true);
      return true;
    }
    return false;
  }

  bool bound_and_propagate() {
    const Time best = shared_.best.load(std::memory_order_relaxed);
    if (best != kNone && !store_.apply_objective_bound(best - 1)) return false;
    return store_.propagate();
  }

  bool better(Time key, int best, Time best_key, int& ties) {
    if (best < 0 || key < best_key) {
      ties = 1;
      return true;
    }
    if (key > best_key) return false;
    if (!(randomize_ || diversify_)) return false;  // keep smallest id
    ++ties;
    return std::uniform_int_distribution<int>(0, ties - 1)(rng_) == 0;
  }

  // Smallest earliest start among unfixed leaves; masters only once every leaf
  // is fixed. Postponed intervals wait until their earliest start moves.
  Select select(int& var, Kind& kind, Time& value) {
    const int n = store_.size();
    for (char want_leaf : {char(1), char(0)}) {
      int best = -1, ties = 0;
      Time best_key = 0;
      bool unfixed = false;
      for (int i = 0; i < n; ++i) {
        if (leaf_[i] != want_leaf) continue;
        const Domain& d = store_.dom(i);
        if (d.fixed()) continue;
        unfixed = true;
        if (d.present() && d.postponed_at >= d.smin) continue;
        if (better(d.smin, best, best_key, ties)) best = i, best_key = d.smin;
      }
      if (best >= 0) {
        const Domain& d = store_.dom(best);
        var = best;
        kind = d.present() ? Kind::Time : Kind::Presence;
        value = d.smin;
        return Select::Branch;
      }
      if (unfixed) return Select::DeadEnd;
    }
    return Select::Complete;
  }

  bool apply(const Choice& c) {
    if (c.kind == Kind::Presence) {
      if (!(c.second ? store_.set_absent(c.var) : store_.set_present(c.var))) return false;
    } else if (!c.second) {
      if (!store_.set_smax(c.var, c.value)) return false;
      if (!store_.set_emax(c.var, store_.dom(c.var).emin)) return false;
    } else {
      store_.set_postponed(c.var, c.value);
    }
    return bound_and_propagate();
  }

  void record() {
    const int n = store_.size();
    std::vector<IntervalValue> values(n);
    for (int i = 0; i < n; ++i) {
      const Domain& d = store_.dom(i);
      values[i] = {d.present(), d.present() ? d.smin : 0, d.present() ? d.emin : 0};
    }
    Time objective = 0;
    for (auto id : store_.model().objective())
      if (values[id.value].present) objective = std::max(objective, values[id.value].end);
    shared_.offer(objective, std::move(values));
  }

  Outcome dfs(std::int64_t fail_limit) {
    std::vector<Choice> stack;
    const std::int64_t fails_at_start = fails_;
    bool need_backtrack = !bound_and_propagate();
    if (need_backtrack) ++fails_;
    for (;;) {
      if (!need_backtrack) {
        if (should_stop()) return Outcome::Stopped;
        int var = -1;
        Kind kind = Kind::Time;
        Time value = 0;
        const Select s = select(var, kind, value);
        if (s == Select::Complete) {
          record();
          if (stop_at_first_) return Outcome::Stopped;
          need_backtrack = true;
        } else if (s == Select::DeadEnd) {
          ++fails_;
          need_backtrack = true;
        } else {
          stack.push_back({store_.mark(), var, kind, value, false});
          ++nodes_;
          if (!apply(stack.back())) {
            ++fails_;
            need_backtrack = true;
          }
        }
        continue;
      }
      // Backtrack to the deepest choice with an untried branch.
      need_backtrack = false;
      bool resumed = false;
      while (!stack.empty()) {
        Choice& c = stack.back();
        store_.undo(c.mark);
        if (c.second) {
          stack.pop_back();
          continue;
        }
        if (fails_ - fails_at_start > fail_limit) return Outcome::LimitReached;
        if (should_stop()) return Outcome::Stopped;
        c.second = true;
        ++nodes_;
        if (apply(c)) {
          resumed = true;
          break;
        }
        ++fails_;
      }
      if (!resumed) return Outcome::Exhausted;
    }
  }

  Store store_;
  Shared& shared_;
  const std::vector<char>& leaf_;
  const Groups& groups_;
  const SolverConfig& config_;
  std::mt19937_64 rng_;
  bool randomize_;
  bool diversify_ = false;
  bool stop_at_first_ = false;
  int lns_size_ = 0;
  std::size_t root_ = 0;
  std::int64_t nodes_ = 0, fails_ = 0, restarts_ = 0;
  std::uint64_t poll_ = 0;
};

std::vector<char> leaf_mask(const Model& model) {
  std::vector<char> leaf(model.intervals().size(), 1);
  for (const auto& c : model.constraints()) {
    if (const auto* a = std::get_if<AlternativeC>(&c)) leaf[a->master.value] = 0;
    if (const auto* s = std::get_if<SpanC>(&c)) leaf[s->master.value] = 0;
  }
  return leaf;
}

}  // namespace

std::optional<std::vector<Domain>> propagate_root(const Model& model) {
  model.check();
  Store store(model);
  store.schedule_all();
  if (!store.propagate()) return std::nullopt;
  return store.domains();
}

SolveReport solve(const Model& model, const SolverConfig& config) {
  model.check();
  if (config.workers < 1) throw std::invalid_argument(fmt::format("workers = {} must be positive", config.workers));
  if (!(config.time_limit > 0)) throw std::invalid_argument("time limit must be positive");

  Shared shared;
  shared.start = Clock::now();
  shared.deadline = shared.start + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(std::min(config.time_limit, 1e9)));
  const auto leaf = leaf_mask(model);
  const auto groups = presence_groups(model);

  SolveReport report;
  std::vector<std::unique_ptr<Worker>> workers;
  for (int w = 0; w < config.workers; ++w)
    workers.push_back(std::make_unique<Worker>(model, shared, leaf, groups, config, config.seed + 0x9e3779b97f4a7c15ULL * w, w > 0));

  if (!workers[0]->init()) {
    report.status = SolveStatus::Infeasible;
    report.bound = config.lower_bound.value_or(0);
    report.runtime_seconds = shared.elapsed();
    return report;
  }
  for (int w = 1; w < config.workers; ++w) workers[w]->init();
  shared.lower_bound = std::max(config.lower_bound.value_or(0), workers[0]->root_lower_bound());

  if (!config.warm_start.empty())
    report.warm_start_used = workers[0]->warm_start(config.warm_start, config.warm_start_fail_limit);

  std::vector<Outcome> outcomes(config.workers, Outcome::Stopped);
  if (!shared.stop.load()) {
    auto body = [&](int w) {
      outcomes[w] = workers[w]->run();
      if (outcomes[w] == Outcome::Exhausted) {
        shared.proven.store(true);
        shared.stop.store(true);
      }
    };
    if (config.workers == 1) {
      body(0);
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < config.workers; ++w) threads.emplace_back(body, w);
      for (auto& t : threads) t.join();
    }
  }

  for (const auto& w : workers) {
    report.nodes += w->nodes();
    report.fails += w->fails();
    report.restarts += w->restarts();
  }
  report.runtime_seconds = shared.elapsed();
  report.trace = shared.trace;
  report.incumbent = shared.incumbent;
  const Time best = shared.best.load();
  if (best != kNone) report.objective = best;
  if (shared.proven.load() || (best != kNone && best <= shared.lower_bound)) {
    if (best != kNone) {
      report.status = SolveStatus::Optimal;
      report.bound = best;
    } else {
      report.status = SolveStatus::Infeasible;
      report.bound = shared.lower_bound;
    }
  } else {
    report.status = best != kNone ? SolveStatus::Feasible : SolveStatus::TimeoutNoSolution;
    report.bound = best != kNone ? std::min(shared.lower_bound, best) : shared.lower_bound;
  }
  return report;
}

}  // namespace fjspth::cp
