#include "core/schedule.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace fjspth {

Time compute_makespan(const Instance& instance, const Schedule& schedule) {
  if (schedule.operations.size() < instance.operations.size())
    throw std::invalid_argument(fmt::format("schedule covers {} of {} operations", schedule.operations.size(),
                                            instance.operations.size()));
  Time makespan = 0;
  for (std::size_t o = 0; o < instance.operations.size(); ++o)
    makespan = std::max(makespan, schedule.operations[o].end);
  return makespan;
}

}  // namespace fjspth
