#ifndef FJSPTH_FJSPTH_H
#define FJSPTH_FJSPTH_H

/* Flexible job shop with zone-restricted transfer robots: instances,
 * constraint-programming solver, schedule validation and benchmark harness.
 *
 * Every function returning fjspth_status leaves a message for
 * fjspth_last_error() on failure (thread-local, valid until the next failing
 * call on the same thread). Strings handed out through char** are owned by the
 * caller and released with fjspth_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FJSPTH_API __declspec(dllexport)
#else
#define FJSPTH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fjspth_status {
  FJSPTH_OK = 0,
  FJSPTH_ERR_ARGUMENT = 1,         /* null pointer, bad option or config */
  FJSPTH_ERR_IO = 2,               /* file cannot be read or written */
  FJSPTH_ERR_PARSE = 3,            /* malformed text */
  FJSPTH_ERR_INFEASIBLE = 4,       /* the instance admits no schedule */
  FJSPTH_ERR_INVALID_SCHEDULE = 5, /* a schedule failed validation */
  FJSPTH_ERR_INTERNAL = 6
} fjspth_status;

typedef enum fjspth_model {
  FJSPTH_MODEL_ARC = 0,
  FJSPTH_MODEL_EMBEDDED = 1,
  FJSPTH_MODEL_FJSP_RELAX = 2 /* lower bound only; produces no schedule */
} fjspth_model;

typedef enum fjspth_solve_status {
  FJSPTH_SOLVE_OPTIMAL = 0,
  FJSPTH_SOLVE_FEASIBLE = 1,
  FJSPTH_SOLVE_INFEASIBLE = 2,
  FJSPTH_SOLVE_TIMEOUT = 3 /* time limit hit with no schedule */
} fjspth_solve_status;

typedef enum fjspth_scale { FJSPTH_SCALE_SMALL = 0, FJSPTH_SCALE_MEDIUM = 1 } fjspth_scale;

typedef struct fjspth_instance fjspth_instance;
typedef struct fjspth_schedule fjspth_schedule;
typedef struct fjspth_report fjspth_report;

FJSPTH_API const char* fjspth_last_error(void);
FJSPTH_API void fjspth_string_free(char* s);

/* Instances in the canonical text format. */
FJSPTH_API fjspth_status fjspth_instance_parse(const char* text, fjspth_instance** out);
FJSPTH_API fjspth_status fjspth_instance_load(const char* path, fjspth_instance** out);
FJSPTH_API fjspth_status fjspth_instance_serialize(const fjspth_instance* inst, char** out);
FJSPTH_API fjspth_status fjspth_instance_save(const fjspth_instance* inst, const char* path);
FJSPTH_API void fjspth_instance_free(fjspth_instance* inst);

typedef struct fjspth_instance_info {
  int jobs;
  int operations;
  int machines;
  int zones;
  int transbots;
} fjspth_instance_info;

FJSPTH_API fjspth_status fjspth_instance_get_info(const fjspth_instance* inst, fjspth_instance_info* out);

typedef struct fjspth_generate_options {
  const char* base_path;   /* classic flexible job shop file (required) */
  const char* layout_path; /* travel layout, required for the small scale */
  int zones;
  int transbots;
  uint64_t seed;
  fjspth_scale scale;
  int64_t handoff_lo, handoff_hi; /* small scale handoff travel range */
  int64_t layout_lo, layout_hi;   /* medium scale travel range */
} fjspth_generate_options;

FJSPTH_API void fjspth_generate_options_init(fjspth_generate_options* opts);
FJSPTH_API fjspth_status fjspth_generate(const fjspth_generate_options* opts, fjspth_instance** out);

typedef struct fjspth_solve_options {
  fjspth_model model;
  double time_limit; /* seconds */
  int workers;
  uint64_t seed;
  int warm_start;       /* boolean */
  int relaxation;       /* boolean: relaxation lower bound before the main solve */
  int initial_deadhead; /* boolean */
} fjspth_solve_options;

FJSPTH_API void fjspth_solve_options_init(fjspth_solve_options* opts);

/* Solves and validates. *schedule_out (optional) receives the best schedule or
 * NULL when there is none. A solver schedule failing validation yields
 * FJSPTH_ERR_INTERNAL. Infeasibility is reported through the report status,
 * not the return value. */
FJSPTH_API fjspth_status fjspth_solve(const fjspth_instance* inst, const fjspth_solve_options* opts,
                                      fjspth_report** report_out, fjspth_schedule** schedule_out);

FJSPTH_API fjspth_solve_status fjspth_report_status(const fjspth_report* r);
FJSPTH_API const char* fjspth_report_status_name(const fjspth_report* r);
FJSPTH_API int fjspth_report_objective(const fjspth_report* r, int64_t* out); /* 0 when none */
FJSPTH_API int64_t fjspth_report_bound(const fjspth_report* r);
FJSPTH_API int fjspth_report_relaxation_bound(const fjspth_report* r, int64_t* out); /* 0 when none */
FJSPTH_API double fjspth_report_seconds(const fjspth_report* r);
FJSPTH_API int64_t fjspth_report_nodes(const fjspth_report* r);
FJSPTH_API int64_t fjspth_report_fails(const fjspth_report* r);
FJSPTH_API size_t fjspth_report_trace_size(const fjspth_report* r);
FJSPTH_API fjspth_status fjspth_report_trace_point(const fjspth_report* r, size_t i, double* seconds,
                                                   int64_t* objective);
FJSPTH_API void fjspth_report_free(fjspth_report* r);

/* Schedules in the canonical text format, resolved against an instance. */
FJSPTH_API fjspth_status fjspth_schedule_parse(const fjspth_instance* inst, const char* text,
                                               fjspth_schedule** out);
FJSPTH_API fjspth_status fjspth_schedule_load(const fjspth_instance* inst, const char* path,
                                              fjspth_schedule** out);
FJSPTH_API fjspth_status fjspth_schedule_serialize(const fjspth_instance* inst, const fjspth_schedule* s,
                                                   char** out);
FJSPTH_API fjspth_status fjspth_schedule_save(const fjspth_instance* inst, const fjspth_schedule* s,
                                              const char* path);
FJSPTH_API int64_t fjspth_schedule_makespan(const fjspth_schedule* s);
FJSPTH_API void fjspth_schedule_free(fjspth_schedule* s);

/* One line per violation ("Kind subjects: detail") in *report_out, empty when
 * valid; *count_out receives the number of violations. */
FJSPTH_API fjspth_status fjspth_schedule_validate(const fjspth_instance* inst, const fjspth_schedule* s,
                                                  int initial_deadhead, size_t* count_out, char** report_out);

/* Standalone SVG; FJSPTH_ERR_INVALID_SCHEDULE when validation fails. */
FJSPTH_API fjspth_status fjspth_gantt_svg(const fjspth_instance* inst, const fjspth_schedule* s, char** out);

/* Runs a JSON benchmark spec; relative paths resolve against base_dir (may be
 * NULL for the working directory). Writes the results CSV. */
FJSPTH_API fjspth_status fjspth_bench_run(const char* spec_json, const char* base_dir, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif
