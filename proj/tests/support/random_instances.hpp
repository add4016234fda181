#pragma once

#include <cstdint>

#include "core/instance.hpp"

namespace fjspth::testing {

struct TinyShape {
  int max_jobs = 3;
  int max_operations = 4;
  int min_machines = 2;
  int max_machines = 3;
  int zones = 2;
  int min_transbots = 2;
  int max_transbots = 3;
  Time max_processing = 9;
  Time max_travel = 9;
};

// Seeded random instance with cyclic zoning, symmetric positive travel times
// and 1-2 eligible machines per operation.
Instance random_tiny_instance(std::uint64_t seed, const TinyShape& shape = {});

// Copy of the instance with one extra transbot cloned from `source`.
Instance with_duplicated_transbot(const Instance& instance, TransbotId source);

}  // namespace fjspth::testing
