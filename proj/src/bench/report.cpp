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

#include "bench/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace wfl::bench {

using nlohmann::json;

namespace {

json range_json(const Range& r) { return {{"min", r.min}, {"max", r.max}}; }

json config_obj(const BenchConfig& c) {
  json j;
  j["command"] = to_string(c.kind);
  j["n"] = c.n;
  if (c.kind == WorkloadKind::Graph) {
    j["shape"] = to_string(c.shape);
    j["locking"] = to_string(c.locking);
    j["max_degree"] = c.max_degree;
    j["graph_seed"] = c.graph_seed;
  }
  j["attempts"] = c.attempts;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["schedule"] = to_string(c.schedule);
  if (c.schedule == ScheduleKind::Scripted) {
    j["script"] = c.script;
    j["script_name"] = c.script_name;
  }
  j["variant"] = to_string(c.variant);
  j["think_min"] = c.think_min;
  j["think_max"] = c.think_max;
  j["kappa"] = c.kappa;
  j["L"] = c.max_locks;
  j["c"] = c.c;
  j["c_prime"] = c.c_prime;
  j["priority_range"] = c.priority_range;
  j["checks"] = c.checks;
  return j;
}

json verdict_obj(const Verdict& v) {
  json vs = json::array();
  for (const Violation& x : v.violations)
    vs.push_back({{"rule", x.rule}, {"ticks", x.ticks}, {"explanation", x.explanation}});
  return {{"check", v.check}, {"ok", v.ok()}, {"violations", vs}, {"notes", v.notes}};
}

json verdicts_arr(const std::vector<Verdict>& vs) {
  json a = json::array();
  for (const Verdict& v : vs) a.push_back(verdict_obj(v));
  return a;
}

template <class T>
T field(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string config_json(const BenchConfig& c) { return config_obj(c).dump(2) + "\n"; }

BenchConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("report is not JSON: ") + e.what());
  }
  if (j.contains("config")) j = j["config"];
  if (!j.is_object() || !j.contains("command")) throw ConfigError("no benchmark configuration in the JSON");
  try {
    BenchConfig c;
    std::string cmd = j["command"].get<std::string>();
    if (cmd == "philosophers")
      c.kind = WorkloadKind::Philosophers;
    else if (cmd == "graph")
      c.kind = WorkloadKind::Graph;
    else
      throw ConfigError("unknown command '" + cmd + "'");
    c.n = field(j, "n", c.n);
    c.shape = parse_graph_shape(field<std::string>(j, "shape", to_string(c.shape)));
    c.locking = parse_graph_locking(field<std::string>(j, "locking", to_string(c.locking)));
    c.max_degree = field(j, "max_degree", c.max_degree);
    c.graph_seed = field(j, "graph_seed", c.graph_seed);
    c.attempts = field(j, "attempts", c.attempts);
    c.seed = field(j, "seed", c.seed);
    c.seeds = field(j, "seeds", c.seeds);
    c.schedule = parse_schedule_kind(field<std::string>(j, "schedule", to_string(c.schedule)));
    c.script = field(j, "script", c.script);
    c.script_name = field(j, "script_name", c.script_name);
    c.variant = parse_variant(field<std::string>(j, "variant", to_string(c.variant)));
    c.think_min = field(j, "think_min", c.think_min);
    c.think_max = field(j, "think_max", c.think_max);
    c.kappa = field(j, "kappa", c.kappa);
    c.max_locks = field(j, "L", c.max_locks);
    c.c = field(j, "c", c.c);
    c.c_prime = field(j, "c_prime", c.c_prime);
    c.priority_range = field(j, "priority_range", c.priority_range);
    c.checks = field(j, "checks", c.checks);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad configuration field: ") + e.what());
  }
}

std::string report_json(const StatsReport& r) {
  json j;
  j["schema"] = kReportSchema;
  j["config"] = config_obj(r.config);
  const LockConfig& lc = r.lock;
  j["lock"] = {{"procs", lc.procs}, {"kappa", lc.kappa},     {"L", lc.max_locks},
               {"T", lc.thunk_ticks}, {"c", lc.c},         {"c_prime", lc.c_prime},
               {"M", lc.m()},         {"t0", lc.t0()},     {"t1", lc.t1()},
               {"locks", r.topology.locks}};
  j["attempts"] = r.attempts;
  j["successes"] = r.successes;
  j["rate"] = r.rate();
  j["rate_lcb99"] = r.lower_bound();
  json procs = json::array();
  for (const ProcStats& p : r.per_proc) {
    double rate = p.attempts ? static_cast<double>(p.successes) / static_cast<double>(p.attempts) : 0.0;
    procs.push_back({{"proc", p.proc},
                     {"attempts", p.attempts},
                     {"successes", p.successes},
                     {"rate", rate},
                     {"contention", p.c_p},
                     {"bound", p.c_p ? 1.0 / static_cast<double>(p.c_p) : 0.0}});
  }
  j["per_process"] = procs;
  json seeds = json::array();
  for (const SeedStats& s : r.per_seed)
    seeds.push_back({{"seed", s.seed},
                     {"attempts", s.attempts},
                     {"successes", s.successes},
                     {"ticks", s.ticks},
                     {"truncated", s.truncated}});
  j["per_seed"] = seeds;
  j["steps"] = {{"pre", range_json(r.pre_steps)},
                {"post", range_json(r.post_steps)},
                {"total", range_json(r.total_steps)}};
  j["checks"] = verdicts_arr(r.verdicts);
  j["ok"] = r.ok();
  return j.dump(2) + "\n";
}

std::string report_text(const StatsReport& r) {
  std::ostringstream o;
  const LockConfig& lc = r.lock;
  o << to_string(r.config.kind) << " n=" << r.config.n;
  if (r.config.kind == WorkloadKind::Graph)
    o << " shape=" << to_string(r.config.shape) << " locking=" << to_string(r.config.locking);
  o << " variant=" << to_string(r.config.variant) << " schedule=" << to_string(r.config.schedule)
    << " seeds=" << r.config.seed << ".." << r.config.seed + r.config.seeds - 1 << "\n";
  o << "P=" << lc.procs << " kappa=" << lc.kappa << " L=" << lc.max_locks << " T=" << lc.thunk_ticks
    << " c=" << lc.c << " c'=" << lc.c_prime << " M=" << lc.m() << " t0=" << lc.t0() << " t1=" << lc.t1()
    << "\n";
  o << "attempts " << r.attempts << "  successes " << r.successes << "  rate " << fixed(r.rate(), 4)
    << "  lcb99 " << fixed(r.lower_bound(), 4) << "\n";
  o << "steps pre " << r.pre_steps.min << ".." << r.pre_steps.max << "  post " << r.post_steps.min << ".."
    << r.post_steps.max << "  total " << r.total_steps.min << ".." << r.total_steps.max << "\n\n";
  o << "proc  attempts  successes    rate  C_p   1/C_p\n";
  for (const ProcStats& p : r.per_proc) {
    double rate = p.attempts ? static_cast<double>(p.successes) / static_cast<double>(p.attempts) : 0.0;
    char line[128];
    std::snprintf(line, sizeof line, "%4u  %8llu  %9llu  %6.4f  %3llu  %6.4f\n", p.proc,
                  static_cast<unsigned long long>(p.attempts), static_cast<unsigned long long>(p.successes), rate,
                  static_cast<unsigned long long>(p.c_p), p.c_p ? 1.0 / static_cast<double>(p.c_p) : 0.0);
    o << line;
  }
  o << "\n" << verdicts_text(r.verdicts);
  return o.str();
}

std::string verdicts_json(const std::vector<Verdict>& vs) {
  bool ok = std::all_of(vs.begin(), vs.end(), [](const Verdict& v) { return v.ok(); });
  json j{{"checks", verdicts_arr(vs)}, {"ok", ok}};
  return j.dump(2) + "\n";
}

std::string verdicts_text(const std::vector<Verdict>& vs) {
  std::ostringstream o;
  for (const Verdict& v : vs) {
    o << (v.ok() ? "ok    " : "FAIL  ") << v.check;
    if (!v.ok()) o << "  (" << v.violations.size() << " violation" << (v.violations.size() == 1 ? "" : "s") << ")";
    o << "\n";
    std::size_t shown = 0;
    for (const Violation& x : v.violations) {
      if (++shown > 10) {
        o << "      ... " << v.violations.size() - 10 << " more\n";
        break;
      }
      o << "      " << x.rule << ": " << x.explanation << "\n";
    }
  }
  return o.str();
}

std::string calibration_json(const CalibrationReport& r) {
  const Calibration& c = r.calibration;
  json j{{"variant", to_string(r.variant)},
         {"kappa", c.kappa},
         {"L", c.max_locks},
         {"T", c.thunk_ticks},
         {"c", c.c},
         {"c_prime", c.c_prime},
         {"t0", r.t0},
         {"t1", r.t1},
         {"measured",
          {{"attempts", c.attempts},
           {"max_pre", c.max_pre},
           {"max_post", c.max_post},
           {"max_post_per_contender", c.max_post_per_contender}}},
         {"validation",
          {{"schedules", r.validation_schedules},
           {"max_pre", r.validation_max_pre},
           {"max_post", r.validation_max_post},
           {"ok", r.validated()}}}};
  return j.dump(2) + "\n";
}

std::string calibration_text(const CalibrationReport& r) {
  const Calibration& c = r.calibration;
  std::ostringstream o;
  o << "variant=" << to_string(r.variant) << " kappa=" << c.kappa << " L=" << c.max_locks << " T=" << c.thunk_ticks
    << "\n";
  o << "measured over " << c.attempts << " attempts: pre<=" << c.max_pre << " post<=" << c.max_post
    << " post/contender<=" << c.max_post_per_contender << "\n";
  o << "c=" << c.c << " c'=" << c.c_prime << " t0=" << r.t0 << " t1=" << r.t1 << "\n";
  if (r.validation_schedules > 0)
    o << "validation over " << r.validation_schedules << " fresh schedules: pre<=" << r.validation_max_pre
      << " post<=" << r.validation_max_post << (r.validated() ? "  ok" : "  EXCEEDED") << "\n";
  return o.str();
}

}  // namespace wfl::bench
