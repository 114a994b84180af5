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

#include "wflock/wflock.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "bench/report.hpp"

using namespace wfl;
using namespace wfl::bench;

struct wfl_config {
  BenchConfig cfg;
};

struct wfl_report {
  StatsReport report;
};

namespace {

thread_local std::string g_last_error;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

wfl_status fail(wfl_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

/// Runs `body`, mapping exceptions to status codes.
template <class F>
wfl_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const ConfigError& e) {
    return fail(WFL_ERR_CONFIG, e.what());
  } catch (const IoError& e) {
    return fail(WFL_ERR_IO, e.what());
  } catch (const HistoryFormatError& e) {
    return fail(WFL_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(WFL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WFL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WFL_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class T>
T number(const std::string& key, const std::string& v) {
  T out{};
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size() || v.empty())
    throw ConfigError("'" + key + "' needs a number, got '" + v + "'");
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    if (comma > start) out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

void require_readable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
}

void set_key(BenchConfig& c, const std::string& key, const std::string& v) {
  if (key == "command") {
    if (v == "philosophers")
      c.kind = WorkloadKind::Philosophers;
    else if (v == "graph")
      c.kind = WorkloadKind::Graph;
    else
      throw ConfigError("unknown command '" + v + "'");
  } else if (key == "n") {
    c.n = number<std::uint32_t>(key, v);
  } else if (key == "attempts") {
    c.attempts = number<std::uint64_t>(key, v);
  } else if (key == "seed") {
    c.seed = number<std::uint64_t>(key, v);
  } else if (key == "seeds") {
    c.seeds = number<std::uint32_t>(key, v);
  } else if (key == "schedule") {
    const std::string prefix = "scripted:";
    if (v.rfind(prefix, 0) == 0) {
      std::string path = v.substr(prefix.size());
      require_readable(path);
      c.schedule = ScheduleKind::Scripted;
      c.script = load_script(path);
      c.script_name = std::filesystem::path(path).filename().string();
    } else {
      c.schedule = parse_schedule_kind(v);
      if (c.schedule == ScheduleKind::Scripted) throw ConfigError("scripted schedules are given as scripted:FILE");
      c.script.clear();
      c.script_name.clear();
    }
  } else if (key == "variant") {
    c.variant = parse_variant(v);
  } else if (key == "shape") {
    c.shape = parse_graph_shape(v);
  } else if (key == "locking") {
    c.locking = parse_graph_locking(v);
  } else if (key == "max_degree") {
    c.max_degree = number<std::uint32_t>(key, v);
  } else if (key == "graph_seed") {
    c.graph_seed = number<std::uint64_t>(key, v);
  } else if (key == "think_min") {
    c.think_min = number<std::uint64_t>(key, v);
  } else if (key == "think_max") {
    c.think_max = number<std::uint64_t>(key, v);
  } else if (key == "kappa") {
    c.kappa = number<std::uint32_t>(key, v);
  } else if (key == "L") {
    c.max_locks = number<std::uint32_t>(key, v);
  } else if (key == "c") {
    c.c = number<std::uint64_t>(key, v);
  } else if (key == "c_prime") {
    c.c_prime = number<std::uint64_t>(key, v);
  } else if (key == "priority_range") {
    c.priority_range = number<std::int64_t>(key, v);
  } else if (key == "checks") {
    c.checks = split_csv(v);
  } else if (key == "keep_histories") {
    c.keep_histories = number<int>(key, v) != 0;
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

std::string seed_path(const std::string& base, std::uint64_t seed) {
  std::filesystem::path p(base);
  std::string ext = p.extension().string();
  p.replace_extension();
  return p.string() + ".seed" + std::to_string(seed) + ext;
}

}  // namespace

extern "C" {

const char* wfl_version(void) { return "0.1.0"; }

const char* wfl_last_error(void) { return g_last_error.c_str(); }

void wfl_string_free(char* s) { std::free(s); }

wfl_status wfl_config_new(wfl_config** out) {
  return guarded([&] {
    if (!out) throw ConfigError("null output pointer");
    *out = new wfl_config();
    return WFL_OK;
  });
}

void wfl_config_free(wfl_config* cfg) { delete cfg; }

wfl_status wfl_config_set(wfl_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    if (!cfg || !key || !value) throw ConfigError("null argument");
    set_key(cfg->cfg, key, value);
    return WFL_OK;
  });
}

wfl_status wfl_config_from_json(const char* json, wfl_config** out) {
  return guarded([&] {
    if (!json || !out) throw ConfigError("null argument");
    *out = nullptr;
    BenchConfig c = config_from_json(json);
    *out = new wfl_config{std::move(c)};
    return WFL_OK;
  });
}

wfl_status wfl_run(const wfl_config* cfg, wfl_report** out) {
  return guarded([&] {
    if (!cfg || !out) throw ConfigError("null argument");
    *out = nullptr;
    StatsReport r = run_bench(cfg->cfg);
    bool ok = r.ok();
    *out = new wfl_report{std::move(r)};
    if (!ok) g_last_error = "a safety or step check failed";
    return ok ? WFL_OK : WFL_VIOLATION;
  });
}

void wfl_report_free(wfl_report* r) { delete r; }

uint64_t wfl_report_attempts(const wfl_report* r) { return r ? r->report.attempts : 0; }
uint64_t wfl_report_successes(const wfl_report* r) { return r ? r->report.successes : 0; }
double wfl_report_rate(const wfl_report* r) { return r ? r->report.rate() : 0.0; }
double wfl_report_rate_lcb(const wfl_report* r) { return r ? r->report.lower_bound() : 0.0; }
int wfl_report_ok(const wfl_report* r) { return r && r->report.ok() ? 1 : 0; }

wfl_status wfl_report_render(const wfl_report* r, wfl_format format, char** out) {
  return guarded([&] {
    if (!r || !out) throw ConfigError("null argument");
    *out = dup(format == WFL_FORMAT_JSON ? report_json(r->report) : report_text(r->report));
    return WFL_OK;
  });
}

wfl_status wfl_report_write_histories(const wfl_report* r, const char* path) {
  return guarded([&] {
    if (!r || !path) throw ConfigError("null argument");
    const auto& hs = r->report.histories;
    if (hs.empty()) throw ConfigError("the run kept no histories (set keep_histories=1)");
    bool binary = std::filesystem::path(path).extension() == ".bin";
    for (const History& h : hs) {
      std::string target = path;
      if (hs.size() > 1) target = seed_path(path, std::stoull(h.meta().at("seed")));
      try {
        h.save(target, binary);
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
    }
    return WFL_OK;
  });
}

wfl_status wfl_check_file(const char* path, const char* checks, wfl_format format, char** out) {
  return guarded([&] {
    if (!path || !out) throw ConfigError("null argument");
    *out = nullptr;
    std::vector<std::string> names = checks ? split_csv(checks) : BenchConfig::default_checks();
    require_readable(path);
    std::vector<Verdict> vs = cmd_check(path, names);
    *out = dup(format == WFL_FORMAT_JSON ? verdicts_json(vs) : verdicts_text(vs));
    for (const Verdict& v : vs)
      if (!v.ok()) return fail(WFL_VIOLATION, v.summary());
    return WFL_OK;
  });
}

wfl_status wfl_calibrate(uint32_t kappa, uint32_t max_locks, const char* variant,
                         uint32_t validation_schedules, wfl_format format, char** out) {
  return guarded([&] {
    if (!variant || !out) throw ConfigError("null argument");
    *out = nullptr;
    CalibrationReport r = cmd_calibrate(kappa, max_locks, parse_variant(variant), validation_schedules);
    *out = dup(format == WFL_FORMAT_JSON ? calibration_json(r) : calibration_text(r));
    if (!r.validated()) return fail(WFL_VIOLATION, "a fresh schedule exceeded a delay target");
    return WFL_OK;
  });
}

}  // extern "C"
