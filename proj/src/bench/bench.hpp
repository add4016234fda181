#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/instance.hpp"
#include "core/schedule.hpp"
#include "formulations/formulations.hpp"
#include "io/io.hpp"

namespace fjspth::bench {

// Either a canonical instance file (used as is) or a classic flexible job shop
// file that is zoned once per (zones, transbots, layout seed) grid cell.
struct BenchInstance {
  std::string name;
  std::string group = "all";  // averages are taken per group
  std::optional<std::filesystem::path> instance_file;
  std::optional<std::filesystem::path> base_file;
  std::optional<std::filesystem::path> layout_file;  // small scale only
  Scale scale = Scale::Small;
};

struct BenchSpec {
  std::vector<BenchInstance> instances;
  std::vector<Formulation> formulations;
  std::vector<int> zones{2};
  std::vector<int> transbots{2};
  std::vector<std::uint64_t> layout_seeds{1};
  double time_limit = 600;
  int workers = 1;
  int repetitions = 1;
  std::uint64_t seed = 0;  // solver seed of repetition r is seed + r
  bool warm_start = true;
  bool relaxation = true;
  bool initial_deadhead = true;
  int parallel = 1;  // grid cells solved concurrently
};

// JSON keys mirror the BenchSpec fields; "model"/"formulations" accept
// "arc", "embedded" and "fjsp-relax". Relative paths resolve against base_dir.
// Throws ConfigError on an invalid spec.
BenchSpec parse_bench_spec(const std::string& json_text, const std::filesystem::path& base_dir);

struct BenchRow {
  std::string instance;
  std::string group;
  std::string model;
  int zones = 0;
  int transbots = 0;
  std::optional<std::uint64_t> layout_seed;
  int rep = 0;
  std::uint64_t seed = 0;
  std::optional<Time> cmax;
  std::optional<Time> bound;
  std::string status;  // solver status, or "Error"
  double seconds = 0;
  std::int64_t nodes = 0;
  std::string error;
};

// Runs the whole grid. Per-run failures become rows with status Error. Rows
// come out ordered by (instance, zones, transbots, layout seed, model, rep)
// whatever the completion order.
std::vector<BenchRow> run_bench(const BenchSpec& spec);

// Mean of integers, rendered with three decimals, rounding half away from zero.
std::string format_mean(std::int64_t sum, std::int64_t count);

// Header, run rows, then one average row per (group, model, zones, transbots,
// layout seed) with solved and optimal counts.
std::string bench_csv(const std::vector<BenchRow>& rows);

// "instance,model,CMAX,bound,status,seconds,nodes" without the header.
std::string solve_csv_row(const BenchRow& row);

// Labels used in plots and reports: M1.., L/U, H.
std::string station_label(const Instance& instance, StationId s);

// One band per machine and transbot. Throws std::invalid_argument when the
// schedule fails validation; a schedule with no operations draws bands only.
std::string gantt_svg(const Instance& instance, const Schedule& schedule, bool initial_deadhead = true);

}  // namespace fjspth::bench
