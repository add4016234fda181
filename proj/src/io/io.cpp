#include "io/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "routing/routing.hpp"

namespace fjspth {

namespace {

struct Token {
  std::string text;
  int line = 0;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream ss(line);
    std::string word;
    while (ss >> word) out.push_back({word, number});
  }
  return out;
}

std::int64_t to_int(const std::string& text, int line) {
  std::int64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(fmt::format("line {}: '{}' is not an integer", line, text));
  return value;
}

class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  std::int64_t next(const char* what) {
    if (pos_ >= tokens_.size()) {
      const int line = tokens_.empty() ? 0 : tokens_.back().line;
      throw ParseError(fmt::format("truncated input after line {} while reading {}", line, what));
    }
    const auto& t = tokens_[pos_++];
    return to_int(t.text, t.line);
  }
  int line() const { return pos_ < tokens_.size() ? tokens_[pos_].line : (tokens_.empty() ? 0 : tokens_.back().line); }
  bool done() const { return pos_ >= tokens_.size(); }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

FlexibleJobShop parse_flexible_jobshop(std::istream& in) {
  // Header line may carry a third, informational token (average flexibility,
  // possibly non-integer); read it line-wise so it never shifts job data.
  std::string header;
  int line_no = 0;
  while (std::getline(in, header)) {
    ++line_no;
    if (header.find_first_not_of(" \t\r") != std::string::npos) break;
    header.clear();
  }
  std::istringstream hs(header);
  std::string a, b;
  if (!(hs >> a >> b)) throw ParseError("missing header 'numJobs numMachines'");
  FlexibleJobShop out;
  const auto jobs = to_int(a, line_no);
  out.machine_count = static_cast<int>(to_int(b, line_no));
  if (jobs < 0 || out.machine_count <= 0)
    throw ParseError(fmt::format("line {}: invalid header dimensions {} {}", line_no, jobs, out.machine_count));

  auto tokens = tokenize(in);
  for (auto& t : tokens) t.line += line_no;
  TokenCursor cur(std::move(tokens));
  for (std::int64_t j = 0; j < jobs; ++j) {
    const auto ops = cur.next("operation count");
    if (ops <= 0) throw ParseError(fmt::format("line {}: job {} has {} operations", cur.line(), j + 1, ops));
    std::vector<std::vector<Alternative>> job;
    for (std::int64_t o = 0; o < ops; ++o) {
      const int line = cur.line();
      const auto k = cur.next("alternative count");
      if (k <= 0) throw ParseError(fmt::format("line {}: operation {} of job {} has zero alternatives", line, o + 1, j + 1));
      std::vector<Alternative> alts;
      for (std::int64_t i = 0; i < k; ++i) {
        const int mline = cur.line();
        const auto m = cur.next("machine index");
        const auto p = cur.next("processing time");
        if (m < 1 || m > out.machine_count)
          throw ParseError(fmt::format("line {}: machine index {} out of range 1..{}", mline, m, out.machine_count));
        if (p <= 0) throw ParseError(fmt::format("line {}: nonpositive processing time {}", mline, p));
        alts.push_back({static_cast<MachineId>(m - 1), p});
      }
      std::sort(alts.begin(), alts.end(), [](const Alternative& x, const Alternative& y) { return x.machine < y.machine; });
      for (std::size_t i = 1; i < alts.size(); ++i)
        if (alts[i].machine == alts[i - 1].machine)
          throw ParseError(fmt::format("line {}: machine {} listed twice", line, alts[i].machine + 1));
      job.push_back(std::move(alts));
    }
    out.jobs.push_back(std::move(job));
  }
  if (!cur.done()) throw ParseError(fmt::format("line {}: unexpected trailing data", cur.line()));
  return out;
}

std::vector<std::vector<Time>> parse_layout(std::istream& in) {
  TokenCursor cur(tokenize(in));
  const auto n = cur.next("layout dimension");
  if (n <= 0) throw ParseError(fmt::format("layout dimension {} must be positive", n));
  std::vector<std::vector<Time>> m(n, std::vector<Time>(n));
  for (auto& row : m)
    for (auto& cell : row) {
      cell = cur.next("layout entry");
      if (cell < 0) throw ParseError("negative layout entry");
    }
  if (!cur.done()) throw ParseError(fmt::format("line {}: unexpected trailing data", cur.line()));
  return m;
}

namespace {

Time uniform(std::mt19937_64& rng, TimeRange r) {
  const auto span = static_cast<std::uint64_t>(r.hi - r.lo) + 1;
  constexpr auto max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % span + 1) % span;  // accept x <= limit
  std::uint64_t x = 0;
  do x = rng();
  while (x > limit);
  return r.lo + static_cast<Time>(x % span);
}

void check_range(const TimeRange& r, const char* name) {
  if (r.lo < 0 || r.hi < r.lo) throw ConfigError(fmt::format("{} [{}, {}] is empty or negative", name, r.lo, r.hi));
}

}  // namespace

Instance instance_from_jobshop(const FlexibleJobShop& base, int zones, int transbots,
                               std::vector<std::vector<Time>> travel) {
  const int m = base.machine_count;
  Instance inst;
  for (int i = 0; i < m; ++i) inst.stations.push_back({i, StationKind::Machine, i % zones});
  inst.stations.push_back({m, StationKind::Stocker, std::nullopt});
  inst.stations.push_back({m + 1, StationKind::Handoff, std::nullopt});
  for (int z = 0; z < zones; ++z) inst.zones.push_back({z, {}, {}});
  for (int i = 0; i < m; ++i) inst.zones[i % zones].machines.push_back(i);
  for (int v = 0; v < transbots; ++v) {
    inst.transbots.push_back({v, v % zones, m, 1});
    inst.zones[v % zones].transbots.push_back(v);
  }
  for (int j = 0; j < static_cast<int>(base.jobs.size()); ++j) {
    std::vector<OperationId> job;
    for (int k = 0; k < static_cast<int>(base.jobs[j].size()); ++k) {
      const auto id = static_cast<OperationId>(inst.operations.size());
      inst.operations.push_back({id, j, k + 1, base.jobs[j][k]});
      job.push_back(id);
    }
    inst.jobs.push_back(std::move(job));
  }
  inst.travel = std::move(travel);
  return inst;
}

Instance generate_instance(const GenConfig& config) {
  if (config.zones <= 0) throw ConfigError(fmt::format("zone count {} must be positive", config.zones));
  if (config.transbots <= 0) throw ConfigError(fmt::format("transbot count {} must be positive", config.transbots));
  if (config.transbots < config.zones)
    throw ConfigError(fmt::format("{} transbots cannot cover {} zones; need at least as many transbots as zones",
                                  config.transbots, config.zones));
  check_range(config.handoff_range, "handoff time range");
  check_range(config.layout_range, "layout time range");
  const int m = config.base.machine_count;
  if (m <= 0) throw ConfigError("base instance has no machines");

  const int n = m + 2;
  const int stocker = m, handoff = m + 1;
  std::vector<std::vector<Time>> travel(n, std::vector<Time>(n, 0));
  std::mt19937_64 rng(config.seed);

  if (config.scale == Scale::Small) {
    if (!config.layout) throw ConfigError("small scale requires a base layout matrix");
    const auto& layout = *config.layout;
    if (static_cast<int>(layout.size()) < m + 1)
      throw ConfigError(fmt::format("layout has {} stations, base instance needs {}", layout.size(), m + 1));
    auto layout_index = [&](int station) { return station == stocker ? 0 : station + 1; };
    for (int a = 0; a <= m; ++a)
      for (int b = 0; b <= m; ++b) {
        if (a == b) continue;
        const auto& row = layout.at(layout_index(a));
        if (row.size() < layout.size()) throw ConfigError("layout matrix is not square");
        travel[a][b] = row.at(layout_index(b));
      }
    for (int s = 0; s < handoff; ++s) travel[s][handoff] = travel[handoff][s] = uniform(rng, config.handoff_range);
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) travel[a][b] = travel[b][a] = uniform(rng, config.layout_range);
  }
  return instance_from_jobshop(config.base, config.zones, config.transbots, std::move(travel));
}

// ---------------------------------------------------------------------------
// Canonical instance format

std::string serialize_instance(const Instance& inst) {
  std::string out = "FJSPTH-INSTANCE 1\n";
  out += "# generator prng: mt19937_64, uniform integers by rejection sampling\n";
  out += fmt::format("STATIONS {}\n", inst.stations.size());
  for (const auto& s : inst.stations) {
    if (s.kind == StationKind::Machine)
      out += fmt::format("{} MACHINE {}\n", s.id, s.zone.value_or(-1));
    else
      out += fmt::format("{} {}\n", s.id, to_string(s.kind));
  }
  out += fmt::format("ZONES {}\n", inst.zones.size());
  for (const auto& z : inst.zones)
    out += fmt::format("{} {} {} {} {}\n", z.id, z.machines.size(), fmt::join(z.machines, " "), z.transbots.size(),
                       fmt::join(z.transbots, " "));
  out += fmt::format("TRANSBOTS {}\n", inst.transbots.size());
  for (const auto& v : inst.transbots) out += fmt::format("{} {} {}\n", v.id, v.zone, v.initial_station);
  out += fmt::format("JOBS {}\n", inst.jobs.size());
  for (const auto& job : inst.jobs) out += fmt::format("{} {}\n", job.size(), fmt::join(job, " "));
  out += fmt::format("OPERATIONS {}\n", inst.operations.size());
  for (const auto& o : inst.operations) {
    out += fmt::format("{} {} {} {}", o.id, o.job, o.order_index, o.eligibility.size());
    for (const auto& alt : o.eligibility) out += fmt::format(" {} {}", alt.machine, alt.processing_time);
    out += '\n';
  }
  out += fmt::format("TRAVEL {}\n", inst.travel.size());
  for (const auto& row : inst.travel) out += fmt::format("{}\n", fmt::join(row, " "));
  return out;
}

namespace {

struct Line {
  std::vector<std::string> words;
  int number = 0;
};

class LineReader {
 public:
  explicit LineReader(std::istream& in) {
    std::string text;
    int number = 0;
    while (std::getline(in, text)) {
      ++number;
      const auto first = text.find_first_not_of(" \t\r");
      if (first == std::string::npos || text[first] == '#') continue;
      Line line{{}, number};
      std::istringstream ss(text);
      std::string w;
      while (ss >> w) line.words.push_back(w);
      lines_.push_back(std::move(line));
    }
  }

  bool done() const { return pos_ >= lines_.size(); }
  const Line& peek() const { return lines_.at(pos_); }
  const Line& next(const std::string& what) {
    if (done()) throw ParseError(fmt::format("unexpected end of input while reading {}", what));
    return lines_[pos_++];
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

// Integer fields of a record line, with an exact or minimum field count.
class Fields {
 public:
  Fields(const Line& line, std::size_t from = 0) : line_(line), pos_(from) {}
  std::int64_t next() {
    if (pos_ >= line_.words.size()) throw ParseError(fmt::format("line {}: too few fields", line_.number));
    return to_int(line_.words[pos_++], line_.number);
  }
  int next_int() { return static_cast<int>(next()); }
  void finish() const {
    if (pos_ != line_.words.size()) throw ParseError(fmt::format("line {}: unexpected extra fields", line_.number));
  }

 private:
  const Line& line_;
  std::size_t pos_;
};

std::int64_t section_count(const Line& line, const std::string& name) {
  if (line.words.size() != 2) throw ParseError(fmt::format("line {}: malformed {} section header", line.number, name));
  const auto n = to_int(line.words[1], line.number);
  if (n < 0) throw ParseError(fmt::format("line {}: negative {} count", line.number, name));
  return n;
}

}  // namespace

Instance parse_instance(std::istream& in) {
  LineReader reader(in);
  {
    const auto& header = reader.next("header");
    if (header.words.size() != 2 || header.words[0] != "FJSPTH-INSTANCE" || header.words[1] != "1")
      throw ParseError(fmt::format("line {}: expected header 'FJSPTH-INSTANCE 1'", header.number));
  }
  Instance inst;
  std::set<std::string> seen;
  const std::vector<std::string> required = {"STATIONS", "ZONES", "TRANSBOTS", "JOBS", "OPERATIONS", "TRAVEL"};
  while (!reader.done()) {
    const Line& head = reader.next("section header");
    const std::string name = head.words.at(0);
    if (std::find(required.begin(), required.end(), name) == required.end())
      throw ParseError(fmt::format("line {}: unknown section '{}'", head.number, name));
    if (!seen.insert(name).second) throw ParseError(fmt::format("line {}: duplicate section {}", head.number, name));
    const auto count = section_count(head, name);
    for (std::int64_t i = 0; i < count; ++i) {
      const Line& line = reader.next(fmt::format("{} record {}", name, i));
      if (line.words.empty()) continue;
      if (name == "STATIONS") {
        if (line.words.size() < 2) throw ParseError(fmt::format("line {}: too few fields", line.number));
        Station s;
        s.id = static_cast<int>(to_int(line.words[0], line.number));
        const auto& kind = line.words[1];
        if (kind == "MACHINE") {
          if (line.words.size() != 3) throw ParseError(fmt::format("line {}: machine needs a zone", line.number));
          s.kind = StationKind::Machine;
          s.zone = static_cast<int>(to_int(line.words[2], line.number));
        } else if (kind == "STOCKER" || kind == "HANDOFF") {
          if (line.words.size() != 2) throw ParseError(fmt::format("line {}: unexpected extra fields", line.number));
          s.kind = kind == "STOCKER" ? StationKind::Stocker : StationKind::Handoff;
        } else {
          throw ParseError(fmt::format("line {}: unknown station kind '{}'", line.number, kind));
        }
        inst.stations.push_back(s);
      } else if (name == "ZONES") {
        Fields f(line);
        Zone z;
        z.id = f.next_int();
        const auto km = f.next();
        for (std::int64_t k = 0; k < km; ++k) z.machines.push_back(f.next_int());
        const auto kv = f.next();
        for (std::int64_t k = 0; k < kv; ++k) z.transbots.push_back(f.next_int());
        f.finish();
        inst.zones.push_back(std::move(z));
      } else if (name == "TRANSBOTS") {
        Fields f(line);
        Transbot v;
        v.id = f.next_int();
        v.zone = f.next_int();
        v.initial_station = f.next_int();
        f.finish();
        inst.transbots.push_back(v);
      } else if (name == "JOBS") {
        Fields f(line);
        const auto k = f.next();
        std::vector<OperationId> job;
        for (std::int64_t x = 0; x < k; ++x) job.push_back(f.next_int());
        f.finish();
        inst.jobs.push_back(std::move(job));
      } else if (name == "OPERATIONS") {
        Fields f(line);
        Operation o;
        o.id = f.next_int();
        o.job = f.next_int();
        o.order_index = f.next_int();
        const auto k = f.next();
        for (std::int64_t x = 0; x < k; ++x) {
          Alternative alt;
          alt.machine = f.next_int();
          alt.processing_time = f.next();
          o.eligibility.push_back(alt);
        }
        f.finish();
        inst.operations.push_back(std::move(o));
      } else {  // TRAVEL
        Fields f(line);
        std::vector<Time> row;
        for (std::int64_t x = 0; x < count; ++x) row.push_back(f.next());
        f.finish();
        inst.travel.push_back(std::move(row));
      }
    }
  }
  for (const auto& name : required)
    if (!seen.count(name)) throw ParseError(fmt::format("missing section {}", name));
  if (inst.travel.size() != inst.stations.size())
    throw ParseError(fmt::format("TRAVEL has {} rows for {} stations", inst.travel.size(), inst.stations.size()));
  const auto violations = validate_instance(inst);
  if (!violations.empty()) throw ParseError(fmt::format("invalid instance: {}", fmt::join(violations, "; ")));
  return inst;
}

Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

// ---------------------------------------------------------------------------
// Canonical schedule format

std::string serialize_schedule(const Instance& instance, const Schedule& schedule) {
  struct OpRow {
    Time start;
    OperationId op;
  };
  struct LegRow {
    Time start;
    int leg;
    OperationId op;
  };
  std::vector<OpRow> ops;
  std::vector<LegRow> legs;
  for (OperationId o = 0; o < static_cast<int>(schedule.operations.size()); ++o) {
    ops.push_back({schedule.operations[o].start, o});
    if (o < static_cast<int>(schedule.transfers.size()))
      for (const auto& leg : schedule.transfers[o]) legs.push_back({leg.start, leg.leg_id, o});
  }
  std::sort(ops.begin(), ops.end(), [](const OpRow& a, const OpRow& b) { return std::tie(a.start, a.op) < std::tie(b.start, b.op); });
  std::sort(legs.begin(), legs.end(),
            [](const LegRow& a, const LegRow& b) { return std::tie(a.start, a.leg, a.op) < std::tie(b.start, b.leg, b.op); });

  std::string out = "FJSPTH-SCHEDULE 1\n";
  out += fmt::format("MAKESPAN {}\n", schedule.makespan);
  out += fmt::format("OPERATIONS {}\n", ops.size());
  for (const auto& row : ops) {
    const auto& a = schedule.operations[row.op];
    const JobId job = row.op < static_cast<int>(instance.operations.size()) ? instance.operations[row.op].job : -1;
    out += fmt::format("{} {} {} {} {}\n", job, row.op, a.machine, a.start, a.end);
  }
  out += fmt::format("LEGS {}\n", legs.size());
  for (const auto& row : legs) {
    for (const auto& leg : schedule.transfers[row.op])
      if (leg.leg_id == row.leg && leg.start == row.start)
        out += fmt::format("{} {} {} {} {}\n", row.op, leg.leg_id, leg.transbot, leg.start, leg.end);
  }
  return out;
}

Schedule parse_schedule(const Instance& instance, std::istream& in) {
  LineReader reader(in);
  const auto& header = reader.next("header");
  if (header.words.size() != 2 || header.words[0] != "FJSPTH-SCHEDULE" || header.words[1] != "1")
    throw ParseError(fmt::format("line {}: expected header 'FJSPTH-SCHEDULE 1'", header.number));

  auto expect = [&](const std::string& name) {
    const Line& line = reader.next(name);
    if (line.words.empty() || line.words[0] != name)
      throw ParseError(fmt::format("line {}: expected {} section", line.number, name));
    return section_count(line, name);
  };

  const int n = static_cast<int>(instance.operations.size());
  Schedule s;
  s.makespan = expect("MAKESPAN");
  s.operations.resize(n);
  s.transfers.resize(n);
  std::vector<bool> covered(n, false);
  const auto op_count = expect("OPERATIONS");
  for (std::int64_t i = 0; i < op_count; ++i) {
    const Line& line = reader.next("operation record");
    Fields f(line);
    const JobId job = f.next_int();
    const OperationId op = f.next_int();
    OperationAssignment a;
    a.machine = f.next_int();
    a.start = f.next();
    a.end = f.next();
    f.finish();
    if (op < 0 || op >= n) throw ParseError(fmt::format("line {}: unknown operation {}", line.number, op));
    if (instance.operations[op].job != job)
      throw ParseError(fmt::format("line {}: operation {} belongs to job {}, not {}", line.number, op,
                                   instance.operations[op].job, job));
    if (covered[op]) throw ParseError(fmt::format("line {}: operation {} listed twice", line.number, op));
    covered[op] = true;
    s.operations[op] = a;
  }
  for (int o = 0; o < n; ++o)
    if (!covered[o]) throw ParseError(fmt::format("operation {} missing from schedule", o));

  const LegTable table(instance);
  const int leg_total = static_cast<int>(table.legs().size());
  const auto leg_count = expect("LEGS");
  for (std::int64_t i = 0; i < leg_count; ++i) {
    const Line& line = reader.next("leg record");
    Fields f(line);
    const OperationId op = f.next_int();
    const int leg_id = f.next_int();
    LegAssignment a;
    a.transbot = f.next_int();
    a.start = f.next();
    a.end = f.next();
    f.finish();
    if (op < 0 || op >= n) throw ParseError(fmt::format("line {}: unknown operation {}", line.number, op));
    if (leg_id < 0 || leg_id >= leg_total) throw ParseError(fmt::format("line {}: unknown leg {}", line.number, leg_id));
    const Leg& leg = table.leg(leg_id);
    a.leg_id = leg_id;
    a.pickup = leg.pickup;
    a.dropoff = leg.dropoff;
    a.position = leg.position;
    s.transfers[op].push_back(a);
  }
  if (!reader.done()) throw ParseError(fmt::format("line {}: unexpected trailing data", reader.peek().number));
  for (auto& t : s.transfers)
    std::stable_sort(t.begin(), t.end(), [](const LegAssignment& a, const LegAssignment& b) { return a.position < b.position; });
  return s;
}

Schedule parse_schedule(const Instance& instance, const std::string& text) {
  std::istringstream in(text);
  return parse_schedule(instance, in);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("read failure on '{}'", path.string()));
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("write failure on '{}'", path.string()));
}

}  // namespace fjspth
