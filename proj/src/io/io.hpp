#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/instance.hpp"
#include "core/schedule.hpp"

namespace fjspth {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Classic flexible job shop data. Alternative::machine is a 0-based machine index.
struct FlexibleJobShop {
  int machine_count = 0;
  std::vector<std::vector<std::vector<Alternative>>> jobs;  // job -> op -> alternatives

  bool operator==(const FlexibleJobShop&) const = default;
};

// Header "numJobs numMachines [avgAlternatives]", then per job
// "numOps {k {machine time}*k}*numOps" with 1-based machine indices.
FlexibleJobShop parse_flexible_jobshop(std::istream& in);

// Square whitespace-separated matrix preceded by its dimension. Row/column 0 is
// the stocker, k >= 1 is machine k-1.
std::vector<std::vector<Time>> parse_layout(std::istream& in);

enum class Scale { Small, Medium };

struct TimeRange {
  Time lo = 0;
  Time hi = 0;
};

struct GenConfig {
  FlexibleJobShop base;
  int zones = 1;
  int transbots = 1;
  TimeRange handoff_range{2, 8};
  TimeRange layout_range{20, 40};
  std::uint64_t seed = 0;
  Scale scale = Scale::Small;
  std::optional<std::vector<std::vector<Time>>> layout;  // required for Scale::Small
};

// Station ids: machines 0..M-1, stocker M, handoff M+1. Machine i and
// transbot i go to zone i mod zones. Random draws come from std::mt19937_64
// seeded with config.seed; integers in [lo, hi] are taken by rejection
// sampling (x < 2^64 - 2^64 mod n, value lo + x mod n), so output is identical
// on every platform. Symmetric pairs are drawn once, row-major over i < j.
// Throws ConfigError when config is invalid.
Instance generate_instance(const GenConfig& config);

// Wraps a classic flexible job shop as an FJSPT-H instance with the given travel
// matrix (stations ordered as in generate_instance).
Instance instance_from_jobshop(const FlexibleJobShop& base, int zones, int transbots,
                               std::vector<std::vector<Time>> travel);

std::string serialize_instance(const Instance& instance);
// Throws ParseError on malformed text or a structurally invalid instance.
Instance parse_instance(std::istream& in);
Instance parse_instance(const std::string& text);

std::string serialize_schedule(const Instance& instance, const Schedule& schedule);
// Leg records are resolved against the instance-wide leg table.
Schedule parse_schedule(const Instance& instance, std::istream& in);
Schedule parse_schedule(const Instance& instance, const std::string& text);

std::string read_text_file(const std::filesystem::path& path);  // throws IoError
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fjspth
