#include "support/random_instances.hpp"

#include <algorithm>
#include <random>

namespace fjspth::testing {

Instance random_tiny_instance(std::uint64_t seed, const TinyShape& shape) {
  std::mt19937_64 rng(seed);
  auto pick = [&](Time lo, Time hi) { return std::uniform_int_distribution<Time>(lo, hi)(rng); };

  const int m = static_cast<int>(pick(shape.min_machines, shape.max_machines));
  const int z = std::min(shape.zones, m);
  const int v = static_cast<int>(pick(std::max(shape.min_transbots, z), std::max(shape.max_transbots, z)));
  Instance inst;
  for (int i = 0; i < m; ++i) inst.stations.push_back({i, StationKind::Machine, i % z});
  inst.stations.push_back({m, StationKind::Stocker, std::nullopt});
  inst.stations.push_back({m + 1, StationKind::Handoff, std::nullopt});
  for (int k = 0; k < z; ++k) inst.zones.push_back({k, {}, {}});
  for (int i = 0; i < m; ++i) inst.zones[i % z].machines.push_back(i);
  for (int b = 0; b < v; ++b) {
    inst.transbots.push_back({b, b % z, m, 1});
    inst.zones[b % z].transbots.push_back(b);
  }

  int budget = static_cast<int>(pick(1, shape.max_operations));
  const int jobs = static_cast<int>(pick(1, std::min(shape.max_jobs, budget)));
  for (int j = 0; j < jobs; ++j) {
    const int left_jobs = jobs - j - 1;
    const int ops = j + 1 == jobs ? budget : static_cast<int>(pick(1, budget - left_jobs));
    budget -= ops;
    std::vector<OperationId> job;
    for (int k = 0; k < ops; ++k) {
      Operation op;
      op.id = static_cast<OperationId>(inst.operations.size());
      op.job = j;
      op.order_index = k + 1;
      std::vector<int> machines(m);
      for (int i = 0; i < m; ++i) machines[i] = i;
      std::shuffle(machines.begin(), machines.end(), rng);
      const int alts = static_cast<int>(pick(1, std::min(2, m)));
      machines.resize(alts);
      std::sort(machines.begin(), machines.end());
      for (int mm : machines) op.eligibility.push_back({mm, pick(1, shape.max_processing)});
      job.push_back(op.id);
      inst.operations.push_back(std::move(op));
    }
    inst.jobs.push_back(std::move(job));
  }

  const int n = m + 2;
  inst.travel.assign(n, std::vector<Time>(n, 0));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) inst.travel[a][b] = inst.travel[b][a] = pick(1, shape.max_travel);
  return inst;
}

Instance with_duplicated_transbot(const Instance& instance, TransbotId source) {
  Instance out = instance;
  Transbot copy = instance.transbots.at(source);
  copy.id = static_cast<TransbotId>(out.transbots.size());
  out.transbots.push_back(copy);
  out.zones.at(copy.zone).transbots.push_back(copy.id);
  return out;
}

}  // namespace fjspth::testing
