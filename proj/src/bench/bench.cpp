#include "bench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "verify/verify.hpp"

namespace fjspth::bench {

namespace {

using nlohmann::json;

Formulation parse_formulation(const std::string& name) {
  if (name == "arc") return Formulation::Arc;
  if (name == "embedded") return Formulation::Embedded;
  if (name == "fjsp-relax") return Formulation::Relaxation;
  throw ConfigError(fmt::format("unknown formulation '{}'", name));
}

template <class T>
std::vector<T> list_of(const json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array()) return {v.get<T>()};
  return v.get<std::vector<T>>();
}

}  // namespace

BenchSpec parse_bench_spec(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bench spec is not valid JSON: {}", e.what()));
  }
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  BenchSpec spec;
  try {
    for (const auto& item : j.at("instances")) {
      BenchInstance bi;
      if (item.is_string()) {
        bi.instance_file = resolve(item.get<std::string>());
      } else {
        if (item.contains("instance")) bi.instance_file = resolve(item.at("instance").get<std::string>());
        if (item.contains("base")) bi.base_file = resolve(item.at("base").get<std::string>());
        if (item.contains("layout")) bi.layout_file = resolve(item.at("layout").get<std::string>());
        if (item.contains("name")) bi.name = item.at("name").get<std::string>();
        if (item.contains("group")) bi.group = item.at("group").get<std::string>();
        const std::string scale = item.value("scale", "small");
        if (scale == "small") bi.scale = Scale::Small;
        else if (scale == "medium") bi.scale = Scale::Medium;
        else throw ConfigError(fmt::format("unknown scale '{}'", scale));
      }
      if (bi.instance_file.has_value() == bi.base_file.has_value())
        throw ConfigError("each bench instance needs exactly one of 'instance' or 'base'");
      if (bi.name.empty()) bi.name = (bi.instance_file ? *bi.instance_file : *bi.base_file).stem().string();
      spec.instances.push_back(std::move(bi));
    }
    for (const auto& f : list_of<std::string>(j, "formulations", {"arc", "embedded"}))
      spec.formulations.push_back(parse_formulation(f));
    spec.zones = list_of<int>(j, "zones", spec.zones);
    spec.transbots = list_of<int>(j, "transbots", spec.transbots);
    spec.layout_seeds = list_of<std::uint64_t>(j, "layout_seeds", spec.layout_seeds);
    spec.time_limit = j.value("time_limit", spec.time_limit);
    spec.workers = j.value("workers", spec.workers);
    spec.repetitions = j.value("repetitions", spec.repetitions);
    spec.seed = j.value("seed", spec.seed);
    spec.warm_start = j.value("warm_start", spec.warm_start);
    spec.relaxation = j.value("relaxation", spec.relaxation);
    spec.initial_deadhead = j.value("initial_deadhead", spec.initial_deadhead);
    spec.parallel = j.value("parallel", spec.parallel);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad bench spec: {}", e.what()));
  }
  if (spec.instances.empty()) throw ConfigError("bench spec has no instances");
  if (spec.formulations.empty()) throw ConfigError("bench spec has no formulations");
  if (spec.zones.empty() || spec.transbots.empty() || spec.layout_seeds.empty())
    throw ConfigError("grid axes must be non-empty");
  if (!(spec.time_limit > 0)) throw ConfigError("time_limit must be positive");
  if (spec.workers < 1 || spec.repetitions < 1 || spec.parallel < 1)
    throw ConfigError("workers, repetitions and parallel must be positive");
  return spec;
}

namespace {

struct Cell {
  std::string instance;
  std::string group;
  int zones = 0, transbots = 0;
  std::optional<std::uint64_t> layout_seed;
  std::optional<Instance> data;  // nullopt when construction failed
  std::string error;
};

std::vector<Cell> build_cells(const BenchInstance& bi, const BenchSpec& spec) {
  std::vector<Cell> cells;
  if (bi.instance_file) {
    Cell c;
    c.instance = bi.name;
    c.group = bi.group;
    try {
      c.data = parse_instance(read_text_file(*bi.instance_file));
      c.zones = static_cast<int>(c.data->zones.size());
      c.transbots = static_cast<int>(c.data->transbots.size());
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    cells.push_back(std::move(c));
    return cells;
  }
  std::optional<FlexibleJobShop> base;
  std::optional<std::vector<std::vector<Time>>> layout;
  std::string load_error;
  try {
    std::istringstream in(read_text_file(*bi.base_file));
    base = parse_flexible_jobshop(in);
    if (bi.layout_file) {
      std::istringstream lin(read_text_file(*bi.layout_file));
      layout = parse_layout(lin);
    }
  } catch (const std::exception& e) {
    load_error = e.what();
  }
  for (int z : spec.zones)
    for (int v : spec.transbots)
      for (std::uint64_t s : spec.layout_seeds) {
        Cell c;
        c.instance = fmt::format("{}-z{}-v{}-s{}", bi.name, z, v, s);
        c.group = bi.group;
        c.zones = z;
        c.transbots = v;
        c.layout_seed = s;
        if (!base) {
          c.error = load_error;
        } else {
          try {
            GenConfig g;
            g.base = *base;
            g.zones = z;
            g.transbots = v;
            g.seed = s;
            g.scale = bi.scale;
            g.layout = layout;
            c.data = generate_instance(g);
          } catch (const std::exception& e) {
            c.error = e.what();
          }
        }
        cells.push_back(std::move(c));
      }
  return cells;
}

BenchRow run_one(const Cell& cell, Formulation f, int rep, const BenchSpec& spec) {
  BenchRow row;
  row.instance = cell.instance;
  row.group = cell.group;
  row.model = to_string(f);
  row.zones = cell.zones;
  row.transbots = cell.transbots;
  row.layout_seed = cell.layout_seed;
  row.rep = rep;
  row.seed = spec.seed + static_cast<std::uint64_t>(rep);
  row.status = "Error";
  if (!cell.data) {
    row.error = cell.error;
    return row;
  }
  const Instance& inst = *cell.data;
  try {
    cp::SolverConfig sc;
    sc.time_limit = spec.time_limit;
    sc.workers = spec.workers;
    sc.seed = row.seed;
    if (f == Formulation::Relaxation) {
      const BuiltModel built = build_fjsp_relaxation(inst);
      const cp::SolveReport r = cp::solve(built.model, sc);
      row.cmax = r.objective;
      row.bound = r.bound;
      row.status = cp::to_string(r.status);
      row.seconds = r.runtime_seconds;
      row.nodes = r.nodes;
      return row;
    }
    AccelerationConfig ac;
    ac.solver = sc;
    ac.relaxation = spec.relaxation;
    ac.warm_start = spec.warm_start;
    ac.build.initial_deadhead = spec.initial_deadhead;
    const SolveOutcome out = solve_with_acceleration(inst, f, ac);
    row.seconds = out.report.runtime_seconds;
    row.nodes = out.report.nodes;
    row.bound = out.report.bound;
    if (out.schedule) {
      const auto violations = validate_schedule(inst, *out.schedule, {spec.initial_deadhead});
      if (!violations.empty()) {
        row.error = fmt::format("solver schedule rejected: {} {}", to_string(violations.front().kind),
                                violations.front().detail);
        return row;
      }
      row.cmax = out.schedule->makespan;
    }
    row.status = cp::to_string(out.report.status);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  std::vector<Cell> cells;
  for (const auto& bi : spec.instances)
    for (auto& c : build_cells(bi, spec)) cells.push_back(std::move(c));

  struct Task {
    std::size_t cell;
    Formulation f;
    int rep;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (Formulation f : spec.formulations)
      for (int r = 0; r < spec.repetitions; ++r) tasks.push_back({c, f, r});

  std::vector<BenchRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();)
      rows[i] = run_one(cells[tasks[i].cell], tasks[i].f, tasks[i].rep, spec);
  };
  const int threads = std::min<int>(spec.parallel, static_cast<int>(tasks.size()));
  if (threads <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string format_mean(std::int64_t sum, std::int64_t count) {
  if (count <= 0) return "";
  // Scaled by 1000 with half-away-from-zero rounding, all in integers.
  const bool neg = sum < 0;
  const unsigned __int128 mag = static_cast<unsigned __int128>(neg ? -static_cast<__int128>(sum) : sum);
  const unsigned __int128 scaled = (mag * 2000 + static_cast<unsigned __int128>(count)) /
                                   (2 * static_cast<unsigned __int128>(count));
  const auto whole = static_cast<std::uint64_t>(scaled / 1000);
  const auto frac = static_cast<unsigned>(scaled % 1000);
  return fmt::format("{}{}.{:03}", neg && scaled != 0 ? "-" : "", whole, frac);
}

namespace {

std::int64_t millis(double seconds) { return std::llround(seconds * 1000.0); }

std::string opt(const std::optional<Time>& v) { return v ? std::to_string(*v) : ""; }

}  // namespace

std::string solve_csv_row(const BenchRow& row) {
  return fmt::format("{},{},{},{},{},{}.{:03},{}", row.instance, row.model, opt(row.cmax), opt(row.bound),
                     row.status, millis(row.seconds) / 1000, millis(row.seconds) % 1000, row.nodes);
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out =
      "row_type,instance,group,model,zones,transbots,layout_seed,rep,seed,CMAX,bound,status,seconds,nodes,runs,"
      "solved,optimal\n";
  struct Acc {
    std::int64_t runs = 0, solved = 0, optimal = 0, cmax = 0, bounds = 0, bound = 0, ms = 0, nodes = 0;
  };
  using Key = std::tuple<std::string, std::string, int, int, std::string>;
  std::vector<Key> order;
  std::map<Key, Acc> acc;
  for (const auto& r : rows) {
    const std::string seed = r.layout_seed ? std::to_string(*r.layout_seed) : "";
    const std::int64_t ms = millis(r.seconds);
    out += fmt::format("run,{},{},{},{},{},{},{},{},{},{},{},{}.{:03},{},,,\n", r.instance, r.group, r.model, r.zones,
                       r.transbots, seed, r.rep, r.seed, opt(r.cmax), opt(r.bound), r.status, ms / 1000, ms % 1000,
                       r.nodes);
    Key key{r.group, r.model, r.zones, r.transbots, seed};
    auto [it, fresh] = acc.try_emplace(key);
    if (fresh) order.push_back(key);
    Acc& a = it->second;
    ++a.runs;
    a.ms += ms;
    a.nodes += r.nodes;
    if (r.cmax) ++a.solved, a.cmax += *r.cmax;
    if (r.status == "Optimal") ++a.optimal;
    if (r.bound) ++a.bounds, a.bound += *r.bound;
  }
  for (const auto& key : order) {
    const Acc& a = acc.at(key);
    const auto& [group, model, zones, transbots, seed] = key;
    out += fmt::format("average,*,{},{},{},{},{},,,{},{},-,{},{},{},{},{}\n", group, model, zones, transbots, seed,
                       format_mean(a.cmax, a.solved), format_mean(a.bound, a.bounds),
                       format_mean(a.ms, a.runs * 1000), format_mean(a.nodes, a.runs), a.runs, a.solved, a.optimal);
  }
  return out;
}

std::string station_label(const Instance& instance, StationId s) {
  switch (instance.stations.at(s).kind) {
    case StationKind::Stocker: return "L/U";
    case StationKind::Handoff: return "H";
    case StationKind::Machine: break;
  }
  return fmt::format("M{}", s + 1);
}

std::string gantt_svg(const Instance& instance, const Schedule& schedule, bool initial_deadhead) {
  const bool empty = schedule.operations.empty();
  if (!empty) {
    const auto violations = validate_schedule(instance, schedule, {initial_deadhead});
    if (!violations.empty())
      throw std::invalid_argument(fmt::format("schedule is invalid ({} violations, first: {} {})", violations.size(),
                                              to_string(violations.front().kind), violations.front().detail));
  }
  const auto machines = instance.machines();
  const int bands = static_cast<int>(machines.size() + instance.transbots.size());
  constexpr int kLeft = 56, kTop = 24, kBand = 30, kPlot = 900, kAxis = 28;
  const Time span = std::max<Time>(schedule.makespan, 1);
  auto x = [&](Time t) { return kLeft + static_cast<double>(t) * kPlot / static_cast<double>(span); };
  const int width = kLeft + kPlot + 16;
  const int height = kTop + bands * kBand + kAxis;
  static constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                             "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"10\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      width, height);
  auto band_y = [&](int band) { return kTop + band * kBand; };
  for (int b = 0; b < bands; ++b) {
    const bool is_machine = b < static_cast<int>(machines.size());
    const std::string label = is_machine ? station_label(instance, machines[b])
                                         : fmt::format("V{}", b - static_cast<int>(machines.size()) + 1);
    svg += fmt::format(
        "<g class=\"band\" id=\"band-{0}\"><rect x=\"{1}\" y=\"{2}\" width=\"{3}\" height=\"{4}\" fill=\"{5}\"/>"
        "<text x=\"4\" y=\"{6}\">{0}</text></g>\n",
        label, kLeft, band_y(b), kPlot, kBand, b % 2 ? "#f4f4f4" : "#fafafa", band_y(b) + kBand / 2 + 4);
  }
  const int axis_y = kTop + bands * kBand;
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kLeft, axis_y,
                     kLeft + kPlot);
  for (int k = 0; k <= 10; ++k) {
    const Time t = span * k / 10;
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x(t), axis_y + 14, t);
  }
  auto bar = [&](const char* cls, int band, Time s, Time e, const char* fill, const std::string& text) {
    const int y = band_y(band) + 4;
    svg += fmt::format(
        "<g class=\"{0}\"><rect x=\"{1:.1f}\" y=\"{2}\" width=\"{3:.1f}\" height=\"{4}\" fill=\"{5}\" "
        "stroke=\"black\" stroke-width=\"0.5\"/><text x=\"{6:.1f}\" y=\"{7}\" text-anchor=\"middle\">{8}</text>"
        "</g>\n",
        cls, x(s), y, x(e) - x(s), kBand - 8, fill, (x(s) + x(e)) / 2, y + kBand / 2, text);
  };
  if (!empty) {
    for (const auto& op : instance.operations) {
      const auto& a = schedule.operations[op.id];
      const auto band = std::find(machines.begin(), machines.end(), a.machine) - machines.begin();
      bar("op", static_cast<int>(band), a.start, a.end, kPalette[op.job % 10],
          fmt::format("{}.{}", op.job + 1, op.order_index));
    }
    for (const auto& op : instance.operations)
      for (const auto& leg : schedule.transfers[op.id])
        bar("leg", static_cast<int>(machines.size()) + leg.transbot, leg.start, leg.end, kPalette[op.job % 10],
            fmt::format("{}&#8594;{}", station_label(instance, leg.pickup), station_label(instance, leg.dropoff)));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace fjspth::bench
