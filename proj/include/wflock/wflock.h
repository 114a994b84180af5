/*
 * Copyright 2026 The wflock Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef WFLOCK_WFLOCK_H
#define WFLOCK_WFLOCK_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define WFL_API __declspec(dllexport)
#else
#define WFL_API __attribute__((visibility("default")))
#endif

/* Return codes double as the command line's exit codes. */
typedef enum wfl_status {
  WFL_OK = 0,
  WFL_VIOLATION = 1, /* ran to completion, some check failed */
  WFL_ERR_CONFIG = 2,
  WFL_ERR_IO = 3,
  WFL_ERR_INTERNAL = 4
} wfl_status;

typedef enum wfl_format { WFL_FORMAT_TEXT = 0, WFL_FORMAT_JSON = 1 } wfl_format;

typedef struct wfl_config wfl_config;
typedef struct wfl_report wfl_report;

WFL_API const char* wfl_version(void);

/* Message for the last failing call on this thread ("" if none). */
WFL_API const char* wfl_last_error(void);

/* Strings returned through char** out-parameters. */
WFL_API void wfl_string_free(char* s);

/* ---- benchmark configuration ---- */

/* Defaults: philosophers, n=8, 1000 attempts, seed 1, one seed,
 * uniform_random schedule, known variant, think time 0..16, calibrated
 * constants, checks mutex,regularity,slot-bound,steps. */
WFL_API wfl_status wfl_config_new(wfl_config** out);
WFL_API void wfl_config_free(wfl_config* cfg);

/* Keys: command (philosophers|graph), n, attempts, seed, seeds,
 * schedule (round_robin|uniform_random|scripted:FILE), variant
 * (known|adaptive), shape (random|ring|star|empty), locking
 * (neighborhood|edges), max_degree, graph_seed, think_min, think_max, kappa,
 * L, c, c_prime, priority_range, checks (comma separated), keep_histories
 * (0|1). Numeric 0 for kappa, L, c, c_prime selects the derived value. */
WFL_API wfl_status wfl_config_set(wfl_config* cfg, const char* key, const char* value);

/* Configuration embedded in a JSON report (or a bare config object). */
WFL_API wfl_status wfl_config_from_json(const char* json, wfl_config** out);

/* ---- running ---- */

/* Runs the benchmark and its checks. On WFL_OK or WFL_VIOLATION *out holds
 * the report; otherwise *out is NULL. */
WFL_API wfl_status wfl_run(const wfl_config* cfg, wfl_report** out);
WFL_API void wfl_report_free(wfl_report* r);

WFL_API uint64_t wfl_report_attempts(const wfl_report* r);
WFL_API uint64_t wfl_report_successes(const wfl_report* r);
WFL_API double wfl_report_rate(const wfl_report* r);
/* One-sided 99% lower confidence bound on the success rate. */
WFL_API double wfl_report_rate_lcb(const wfl_report* r);
/* 1 when every check passed. */
WFL_API int wfl_report_ok(const wfl_report* r);

WFL_API wfl_status wfl_report_render(const wfl_report* r, wfl_format format, char** out);

/* Writes the histories kept by the run (keep_histories=1). With one seed
 * the file is `path`; otherwise `.seed<N>` goes before the extension. A
 * `.bin` extension selects the binary format. */
WFL_API wfl_status wfl_report_write_histories(const wfl_report* r, const char* path);

/* ---- offline checking and calibration ---- */

/* Checks a recorded history. `checks` is a comma separated list (NULL for
 * the defaults); `linearizable` is also accepted. */
WFL_API wfl_status wfl_check_file(const char* path, const char* checks, wfl_format format, char** out);

/* Sizes c and c' for the given bounds and, when `validation_schedules` > 0,
 * re-measures on that many fresh schedules. WFL_VIOLATION means a fresh
 * measurement exceeded a delay target. */
WFL_API wfl_status wfl_calibrate(uint32_t kappa, uint32_t max_locks, const char* variant,
                                 uint32_t validation_schedules, wfl_format format, char** out);

#ifdef __cplusplus
}
#endif

#endif /* WFLOCK_WFLOCK_H */
