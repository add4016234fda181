#include "fjspth/fjspth.h"

#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "bench/bench.hpp"
#include "formulations/formulations.hpp"
#include "io/io.hpp"
#include "verify/verify.hpp"

struct fjspth_instance {
  fjspth::Instance value;
};

struct fjspth_schedule {
  fjspth::Schedule value;
};

struct fjspth_report {
  fjspth::cp::SolveReport value;
  std::optional<fjspth::Time> relaxation_bound;
};

namespace {

thread_local std::string g_last_error;

fjspth_status fail(fjspth_status code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Maps exceptions thrown by the core onto status codes.
template <class F>
fjspth_status guarded(F&& body) {
  try {
    return body();
  } catch (const fjspth::IoError& e) {
    return fail(FJSPTH_ERR_IO, e.what());
  } catch (const fjspth::ParseError& e) {
    return fail(FJSPTH_ERR_PARSE, e.what());
  } catch (const fjspth::ConfigError& e) {
    return fail(FJSPTH_ERR_ARGUMENT, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(FJSPTH_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FJSPTH_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FJSPTH_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FJSPTH_ERR_INTERNAL, "unknown error");
  }
}

#define FJSPTH_REQUIRE(ptr) \
  if (!(ptr)) return fail(FJSPTH_ERR_ARGUMENT, #ptr " must not be null")

}  // namespace

extern "C" {

const char* fjspth_last_error(void) { return g_last_error.c_str(); }

void fjspth_string_free(char* s) { delete[] s; }

fjspth_status fjspth_instance_parse(const char* text, fjspth_instance** out) {
  FJSPTH_REQUIRE(text);
  FJSPTH_REQUIRE(out);
  return guarded([&] {
    *out = new fjspth_instance{fjspth::parse_instance(std::string(text))};
    return FJSPTH_OK;
  });
}

fjspth_status fjspth_instance_load(const char* path, fjspth_instance** out) {
  FJSPTH_REQUIRE(path);
  FJSPTH_REQUIRE(out);
  return guarded([&] {
    *out = new fjspth_instance{fjspth::parse_instance(fjspth::read_text_file(path))};
    return FJSPTH_OK;
  });
}

fjspth_status fjspth_instance_serialize(const fjspth_instance* inst, char** out) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(out);
  return guarded([&] {
    *out = dup(fjspth::serialize_instance(inst->value));
    return FJSPTH_OK;
  });
}

fjspth_status fjspth_instance_save(const fjspth_instance* inst, const char* path) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(path);
  return guarded([&] {
    fjspth::write_text_file(path, fjspth::serialize_instance(inst->value));
    return FJSPTH_OK;
  });
}

void fjspth_instance_free(fjspth_instance* inst) { delete inst; }

fjspth_status fjspth_instance_get_info(const fjspth_instance* inst, fjspth_instance_info* out) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(out);
  const auto& v = inst->value;
  out->jobs = static_cast<int>(v.jobs.size());
  out->operations = static_cast<int>(v.operations.size());
  out->machines = v.machine_count();
  out->zones = static_cast<int>(v.zones.size());
  out->transbots = static_cast<int>(v.transbots.size());
  return FJSPTH_OK;
}

void fjspth_generate_options_init(fjspth_generate_options* opts) {
  if (!opts) return;
  *opts = {};
  opts->zones = 2;
  opts->transbots = 2;
  opts->scale = FJSPTH_SCALE_SMALL;
  opts->handoff_lo = 2;
  opts->handoff_hi = 8;
  opts->layout_lo = 20;
  opts->layout_hi = 40;
}

fjspth_status fjspth_generate(const fjspth_generate_options* opts, fjspth_instance** out) {
  FJSPTH_REQUIRE(opts);
  FJSPTH_REQUIRE(out);
  FJSPTH_REQUIRE(opts->base_path);
  return guarded([&] {
    fjspth::GenConfig g;
    {
      std::istringstream in(fjspth::read_text_file(opts->base_path));
      g.base = fjspth::parse_flexible_jobshop(in);
    }
    if (opts->layout_path) {
      std::istringstream in(fjspth::read_text_file(opts->layout_path));
      g.layout = fjspth::parse_layout(in);
    }
    g.zones = opts->zones;
    g.transbots = opts->transbots;
    g.seed = opts->seed;
    g.scale = opts->scale == FJSPTH_SCALE_MEDIUM ? fjspth::Scale::Medium : fjspth::Scale::Small;
    g.handoff_range = {opts->handoff_lo, opts->handoff_hi};
    g.layout_range = {opts->layout_lo, opts->layout_hi};
    *out = new fjspth_instance{fjspth::generate_instance(g)};
    return FJSPTH_OK;
  });
}

void fjspth_solve_options_init(fjspth_solve_options* opts) {
  if (!opts) return;
  opts->model = FJSPTH_MODEL_ARC;
  opts->time_limit = 600;
  opts->workers = 1;
  opts->seed = 0;
  opts->warm_start = 1;
  opts->relaxation = 1;
  opts->initial_deadhead = 1;
}

fjspth_status fjspth_solve(const fjspth_instance* inst, const fjspth_solve_options* opts,
                           fjspth_report** report_out, fjspth_schedule** schedule_out) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(opts);
  FJSPTH_REQUIRE(report_out);
  if (schedule_out) *schedule_out = nullptr;
  *report_out = nullptr;
  return guarded([&] {
    fjspth::cp::SolverConfig sc;
    sc.time_limit = opts->time_limit;
    sc.workers = opts->workers;
    sc.seed = opts->seed;
    auto report = std::make_unique<fjspth_report>();
    std::optional<fjspth::Schedule> schedule;
    switch (opts->model) {
      case FJSPTH_MODEL_FJSP_RELAX: {
        const auto built = fjspth::build_fjsp_relaxation(inst->value);
        report->value = fjspth::cp::solve(built.model, sc);
        break;
      }
      case FJSPTH_MODEL_ARC:
      case FJSPTH_MODEL_EMBEDDED: {
        fjspth::AccelerationConfig ac;
        ac.solver = sc;
        ac.warm_start = opts->warm_start != 0;
        ac.relaxation = opts->relaxation != 0;
        ac.build.initial_deadhead = opts->initial_deadhead != 0;
        const auto f = opts->model == FJSPTH_MODEL_ARC ? fjspth::Formulation::Arc : fjspth::Formulation::Embedded;
        auto outcome = fjspth::solve_with_acceleration(inst->value, f, ac);
        report->value = std::move(outcome.report);
        report->relaxation_bound = outcome.relaxation_bound;
        schedule = std::move(outcome.schedule);
        break;
      }
      default:
        return fail(FJSPTH_ERR_ARGUMENT, fmt::format("unknown model {}", static_cast<int>(opts->model)));
    }
    if (schedule) {
      const auto violations = fjspth::validate_schedule(inst->value, *schedule, {opts->initial_deadhead != 0});
      if (!violations.empty())
        return fail(FJSPTH_ERR_INTERNAL,
                    fmt::format("solver produced an invalid schedule: {} {}", fjspth::to_string(violations[0].kind),
                                violations[0].detail));
      if (schedule_out) *schedule_out = new fjspth_schedule{std::move(*schedule)};
    }
    *report_out = report.release();
    return FJSPTH_OK;
  });
}

fjspth_solve_status fjspth_report_status(const fjspth_report* r) {
  using S = fjspth::cp::SolveStatus;
  switch (r->value.status) {
    case S::Optimal: return FJSPTH_SOLVE_OPTIMAL;
    case S::Feasible: return FJSPTH_SOLVE_FEASIBLE;
    case S::Infeasible: return FJSPTH_SOLVE_INFEASIBLE;
    case S::TimeoutNoSolution: return FJSPTH_SOLVE_TIMEOUT;
  }
  return FJSPTH_SOLVE_TIMEOUT;
}

const char* fjspth_report_status_name(const fjspth_report* r) { return fjspth::cp::to_string(r->value.status); }

int fjspth_report_objective(const fjspth_report* r, int64_t* out) {
  if (!r->value.objective) return 0;
  if (out) *out = *r->value.objective;
  return 1;
}

int64_t fjspth_report_bound(const fjspth_report* r) { return r->value.bound; }

int fjspth_report_relaxation_bound(const fjspth_report* r, int64_t* out) {
  if (!r->relaxation_bound) return 0;
  if (out) *out = *r->relaxation_bound;
  return 1;
}

double fjspth_report_seconds(const fjspth_report* r) { return r->value.runtime_seconds; }
int64_t fjspth_report_nodes(const fjspth_report* r) { return r->value.nodes; }
int64_t fjspth_report_fails(const fjspth_report* r) { return r->value.fails; }
size_t fjspth_report_trace_size(const fjspth_report* r) { return r->value.trace.size(); }

fjspth_status fjspth_report_trace_point(const fjspth_report* r, size_t i, double* seconds, int64_t* objective) {
  FJSPTH_REQUIRE(r);
  if (i >= r->value.trace.size()) return fail(FJSPTH_ERR_ARGUMENT, fmt::format("trace index {} out of range", i));
  if (seconds) *seconds = r->value.trace[i].seconds;
  if (objective) *objective = r->value.trace[i].objective;
  return FJSPTH_OK;
}

void fjspth_report_free(fjspth_report* r) { delete r; }

fjspth_status fjspth_schedule_parse(const fjspth_instance* inst, const char* text, fjspth_schedule** out) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(text);
  FJSPTH_REQUIRE(out);
  return guarded([&] {
    *out = new fjspth_schedule{fjspth::parse_schedule(inst->value, std::string(text))};
    return FJSPTH_OK;
  });
}

fjspth_status fjspth_schedule_load(const fjspth_instance* inst, const char* path, fjspth_schedule** out) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(path);
  FJSPTH_REQUIRE(out);
  return guarded([&] {
    *out = new fjspth_schedule{fjspth::parse_schedule(inst->value, fjspth::read_text_file(path))};
    return FJSPTH_OK;
  });
}

fjspth_status fjspth_schedule_serialize(const fjspth_instance* inst, const fjspth_schedule* s, char** out) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(s);
  FJSPTH_REQUIRE(out);
  return guarded([&] {
    *out = dup(fjspth::serialize_schedule(inst->value, s->value));
    return FJSPTH_OK;
  });
}

fjspth_status fjspth_schedule_save(const fjspth_instance* inst, const fjspth_schedule* s, const char* path) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(s);
  FJSPTH_REQUIRE(path);
  return guarded([&] {
    fjspth::write_text_file(path, fjspth::serialize_schedule(inst->value, s->value));
    return FJSPTH_OK;
  });
}

int64_t fjspth_schedule_makespan(const fjspth_schedule* s) { return s->value.makespan; }

void fjspth_schedule_free(fjspth_schedule* s) { delete s; }

fjspth_status fjspth_schedule_validate(const fjspth_instance* inst, const fjspth_schedule* s, int initial_deadhead,
                                       size_t* count_out, char** report_out) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(s);
  return guarded([&] {
    const auto violations = fjspth::validate_schedule(inst->value, s->value, {initial_deadhead != 0});
    if (count_out) *count_out = violations.size();
    if (report_out) {
      std::string text;
      for (const auto& v : violations)
        text += fmt::format("{} {}: {}\n", fjspth::to_string(v.kind), fmt::join(v.subjects, " "), v.detail);
      *report_out = dup(text);
    }
    return FJSPTH_OK;
  });
}

fjspth_status fjspth_gantt_svg(const fjspth_instance* inst, const fjspth_schedule* s, char** out) {
  FJSPTH_REQUIRE(inst);
  FJSPTH_REQUIRE(s);
  FJSPTH_REQUIRE(out);
  return guarded([&] {
    if (!s->value.operations.empty()) {
      const auto violations = fjspth::validate_schedule(inst->value, s->value);
      if (!violations.empty())
        return fail(FJSPTH_ERR_INVALID_SCHEDULE,
                    fmt::format("refusing to plot an invalid schedule: {} {}", fjspth::to_string(violations[0].kind),
                                violations[0].detail));
    }
    *out = dup(fjspth::bench::gantt_svg(inst->value, s->value));
    return FJSPTH_OK;
  });
}

fjspth_status fjspth_bench_run(const char* spec_json, const char* base_dir, char** csv_out) {
  FJSPTH_REQUIRE(spec_json);
  FJSPTH_REQUIRE(csv_out);
  return guarded([&] {
    const std::filesystem::path dir = base_dir ? std::filesystem::path(base_dir) : std::filesystem::current_path();
    const auto spec = fjspth::bench::parse_bench_spec(spec_json, dir);
    *csv_out = dup(fjspth::bench::bench_csv(fjspth::bench::run_bench(spec)));
    return FJSPTH_OK;
  });
}

}  // extern "C"
