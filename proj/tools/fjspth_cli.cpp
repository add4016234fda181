// Command-line front end. Talks to the solver only through the C API.
//
// Exit status: 0 success, 1 usage or configuration, 2 I/O or parse error,
// 3 infeasible instance or invalid schedule, 4 internal failure.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fjspth/fjspth.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kInfeasible = 3, kInternal = 4 };

int exit_code(fjspth_status s) {
  switch (s) {
    case FJSPTH_OK: return kOk;
    case FJSPTH_ERR_ARGUMENT: return kUsage;
    case FJSPTH_ERR_IO:
    case FJSPTH_ERR_PARSE: return kIo;
    case FJSPTH_ERR_INFEASIBLE:
    case FJSPTH_ERR_INVALID_SCHEDULE: return kInfeasible;
    case FJSPTH_ERR_INTERNAL: return kInternal;
  }
  return kInternal;
}

int report(fjspth_status s, const std::string& what) {
  std::fprintf(stderr, "error: %s: %s\n", what.c_str(), fjspth_last_error());
  return exit_code(s);
}

struct InstanceDeleter {
  void operator()(fjspth_instance* p) const { fjspth_instance_free(p); }
};
struct ScheduleDeleter {
  void operator()(fjspth_schedule* p) const { fjspth_schedule_free(p); }
};
struct ReportDeleter {
  void operator()(fjspth_report* p) const { fjspth_report_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { fjspth_string_free(p); }
};
using InstancePtr = std::unique_ptr<fjspth_instance, InstanceDeleter>;
using SchedulePtr = std::unique_ptr<fjspth_schedule, ScheduleDeleter>;
using ReportPtr = std::unique_ptr<fjspth_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

bool write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

const std::map<std::string, bool> kOnOff{{"on", true}, {"off", false}};

struct GenerateArgs {
  std::string base, layout, out, scale = "small";
  int zones = 2, transbots = 2;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateArgs& a) {
  fjspth_generate_options o;
  fjspth_generate_options_init(&o);
  o.base_path = a.base.c_str();
  o.layout_path = a.layout.empty() ? nullptr : a.layout.c_str();
  o.zones = a.zones;
  o.transbots = a.transbots;
  o.seed = a.seed;
  o.scale = a.scale == "medium" ? FJSPTH_SCALE_MEDIUM : FJSPTH_SCALE_SMALL;
  fjspth_instance* raw = nullptr;
  if (auto s = fjspth_generate(&o, &raw); s != FJSPTH_OK) return report(s, "generate");
  InstancePtr inst(raw);
  if (auto s = fjspth_instance_save(inst.get(), a.out.c_str()); s != FJSPTH_OK) return report(s, "write");
  fjspth_instance_info info;
  fjspth_instance_get_info(inst.get(), &info);
  std::printf("%s: jobs %d, operations %d, machines %d, zones %d, transbots %d, seed %" PRIu64 "\n", a.out.c_str(),
              info.jobs, info.operations, info.machines, info.zones, info.transbots, a.seed);
  return kOk;
}

struct SolveArgs {
  std::string instance, out, model = "arc";
  double time_limit = 600;
  int workers = 1;
  std::uint64_t seed = 0;
  bool warm_start = true, initial_deadhead = true, relaxation = true, header = false, trace = false;
};

int cmd_solve(const SolveArgs& a) {
  fjspth_instance* raw = nullptr;
  if (auto s = fjspth_instance_load(a.instance.c_str(), &raw); s != FJSPTH_OK) return report(s, a.instance);
  InstancePtr inst(raw);
  fjspth_solve_options o;
  fjspth_solve_options_init(&o);
  o.model = a.model == "embedded" ? FJSPTH_MODEL_EMBEDDED : FJSPTH_MODEL_ARC;
  o.time_limit = a.time_limit;
  o.workers = a.workers;
  o.seed = a.seed;
  o.warm_start = a.warm_start;
  o.initial_deadhead = a.initial_deadhead;
  o.relaxation = a.relaxation;
  fjspth_report* rraw = nullptr;
  fjspth_schedule* sraw = nullptr;
  if (auto s = fjspth_solve(inst.get(), &o, &rraw, &sraw); s != FJSPTH_OK) return report(s, "solve");
  ReportPtr rep(rraw);
  SchedulePtr sched(sraw);

  std::int64_t cmax = 0;
  const bool has = fjspth_report_objective(rep.get(), &cmax) && sched;
  if (has) cmax = fjspth_schedule_makespan(sched.get());
  const std::string name = std::filesystem::path(a.instance).stem().string();
  if (a.header) std::printf("instance,model,CMAX,bound,status,seconds,nodes\n");
  std::printf("%s,%s,%s,%" PRId64 ",%s,%.3f,%" PRId64 "\n", name.c_str(), a.model.c_str(),
              has ? std::to_string(cmax).c_str() : "", fjspth_report_bound(rep.get()),
              fjspth_report_status_name(rep.get()), fjspth_report_seconds(rep.get()), fjspth_report_nodes(rep.get()));
  if (a.trace)
    for (std::size_t i = 0; i < fjspth_report_trace_size(rep.get()); ++i) {
      double t = 0;
      std::int64_t v = 0;
      fjspth_report_trace_point(rep.get(), i, &t, &v);
      std::fprintf(stderr, "trace %.3f %" PRId64 "\n", t, v);
    }
  if (has && !a.out.empty()) {
    // fjspth_solve already validated; re-check the exact bytes being written.
    char* text = nullptr;
    if (auto s = fjspth_schedule_serialize(inst.get(), sched.get(), &text); s != FJSPTH_OK)
      return report(s, "serialize");
    StringPtr owned(text);
    fjspth_schedule* back = nullptr;
    if (auto s = fjspth_schedule_parse(inst.get(), text, &back); s != FJSPTH_OK) return report(s, "reparse");
    SchedulePtr reparsed(back);
    std::size_t count = 0;
    if (auto s = fjspth_schedule_validate(inst.get(), reparsed.get(), a.initial_deadhead, &count, nullptr);
        s != FJSPTH_OK)
      return report(s, "validate");
    if (count != 0) {
      std::fprintf(stderr, "error: refusing to write a schedule with %zu violations\n", count);
      return kInternal;
    }
    if (!write_file(a.out, text)) {
      std::fprintf(stderr, "error: cannot write %s\n", a.out.c_str());
      return kIo;
    }
  }
  return fjspth_report_status(rep.get()) == FJSPTH_SOLVE_INFEASIBLE ? kInfeasible : kOk;
}

int load_pair(const std::string& ipath, const std::string& spath, InstancePtr& inst, SchedulePtr& sched) {
  fjspth_instance* iraw = nullptr;
  if (auto s = fjspth_instance_load(ipath.c_str(), &iraw); s != FJSPTH_OK) return report(s, ipath);
  inst.reset(iraw);
  fjspth_schedule* sraw = nullptr;
  if (auto s = fjspth_schedule_load(inst.get(), spath.c_str(), &sraw); s != FJSPTH_OK) return report(s, spath);
  sched.reset(sraw);
  return kOk;
}

int cmd_validate(const std::string& ipath, const std::string& spath, bool initial_deadhead) {
  InstancePtr inst;
  SchedulePtr sched;
  if (int rc = load_pair(ipath, spath, inst, sched)) return rc;
  std::size_t count = 0;
  char* text = nullptr;
  if (auto s = fjspth_schedule_validate(inst.get(), sched.get(), initial_deadhead, &count, &text); s != FJSPTH_OK)
    return report(s, "validate");
  StringPtr owned(text);
  std::fputs(text, stdout);
  return count == 0 ? kOk : kInfeasible;
}

int cmd_gantt(const std::string& ipath, const std::string& spath, const std::string& out) {
  InstancePtr inst;
  SchedulePtr sched;
  if (int rc = load_pair(ipath, spath, inst, sched)) return rc;
  char* svg = nullptr;
  if (auto s = fjspth_gantt_svg(inst.get(), sched.get(), &svg); s != FJSPTH_OK) return report(s, "gantt");
  StringPtr owned(svg);
  if (out.empty()) {
    std::fputs(svg, stdout);
  } else if (!write_file(out, svg)) {
    std::fprintf(stderr, "error: cannot write %s\n", out.c_str());
    return kIo;
  }
  return kOk;
}

int cmd_bench(const std::string& spec_path, const std::string& out) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: cannot read %s\n", spec_path.c_str());
    return kIo;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string dir = std::filesystem::absolute(spec_path).parent_path().string();
  char* csv = nullptr;
  if (auto s = fjspth_bench_run(buf.str().c_str(), dir.c_str(), &csv); s != FJSPTH_OK) return report(s, "bench");
  StringPtr owned(csv);
  if (out.empty()) {
    std::fputs(csv, stdout);
  } else if (!write_file(out, csv)) {
    std::fprintf(stderr, "error: cannot write %s\n", out.c_str());
    return kIo;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flexible job shop with zoned transbots: generate, solve, validate, bench, gantt"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "zone a flexible job shop file into an instance");
  g->add_option("--base", gen.base, "flexible job shop file")->required();
  g->add_option("--layout", gen.layout, "travel layout (small scale)");
  g->add_option("--zones", gen.zones)->capture_default_str();
  g->add_option("--transbots", gen.transbots)->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--scale", gen.scale)->check(CLI::IsMember({"small", "medium"}))->capture_default_str();
  g->add_option("--out", gen.out, "instance file to write")->required();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "solve an instance and print a CSV result row");
  s->add_option("instance", sol.instance)->required();
  s->add_option("--model", sol.model)->check(CLI::IsMember({"arc", "embedded"}))->capture_default_str();
  s->add_option("--time-limit", sol.time_limit, "seconds")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--workers", sol.workers)->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--seed", sol.seed)->capture_default_str();
  s->add_option("--warm-start", sol.warm_start)->transform(CLI::CheckedTransformer(kOnOff))->default_str("on");
  s->add_option("--initial-deadhead", sol.initial_deadhead)
      ->transform(CLI::CheckedTransformer(kOnOff))
      ->default_str("on");
  s->add_option("--relaxation", sol.relaxation, "relaxation lower bound first")
      ->transform(CLI::CheckedTransformer(kOnOff))
      ->default_str("on");
  s->add_option("--out", sol.out, "schedule file to write");
  s->add_flag("--header", sol.header, "print the CSV header first");
  s->add_flag("--trace", sol.trace, "print incumbent improvements to stderr");

  std::string vi, vs;
  bool v_deadhead = true;
  auto* v = app.add_subcommand("validate", "check a schedule against an instance");
  v->add_option("instance", vi)->required();
  v->add_option("schedule", vs)->required();
  v->add_option("--initial-deadhead", v_deadhead)->transform(CLI::CheckedTransformer(kOnOff))->default_str("on");

  std::string bspec, bout;
  auto* b = app.add_subcommand("bench", "run a JSON benchmark spec and print CSV");
  b->add_option("spec", bspec)->required();
  b->add_option("--out", bout, "CSV file to write");

  std::string gi, gs, gout;
  auto* gt = app.add_subcommand("gantt", "render a schedule as SVG");
  gt->add_option("instance", gi)->required();
  gt->add_option("schedule", gs)->required();
  gt->add_option("--out", gout, "SVG file to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (g->parsed()) return cmd_generate(gen);
  if (s->parsed()) return cmd_solve(sol);
  if (v->parsed()) return cmd_validate(vi, vs, v_deadhead);
  if (b->parsed()) return cmd_bench(bspec, bout);
  if (gt->parsed()) return cmd_gantt(gi, gs, gout);
  return kUsage;
}
