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

#include "bench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace wfl::bench {

namespace {

constexpr std::uint64_t kHorizon = 1ULL << 40;

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> k{"mutex", "regularity", "slot-bound", "steps", "linearizable"};
  return k;
}

void validate_checks(const std::vector<std::string>& checks) {
  for (const std::string& c : checks)
    if (std::find(known_checks().begin(), known_checks().end(), c) == known_checks().end())
      throw ConfigError("unknown check '" + c + "'");
}

std::uint64_t meta_u64(const History& h, const std::string& key) {
  auto it = h.meta().find(key);
  if (it == h.meta().end())
    throw ConfigError("history has no '" + key + "' entry; the step check needs the lock configuration");
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("history entry '" + key + "' is not a number: " + it->second);
  }
}

LockConfig lock_config_for(const BenchConfig& cfg, const LockTopology& topo) {
  LockConfig lc;
  lc.procs = topo.procs();
  lc.kappa = cfg.kappa ? cfg.kappa : topo.max_contention();
  lc.max_locks = cfg.max_locks ? cfg.max_locks : topo.max_locks();
  lc.priority_range = cfg.priority_range;
  lc.c = cfg.c;
  lc.c_prime = cfg.c_prime;
  if (cfg.c == 0 || cfg.c_prime == 0) {
    Calibration cal = calibrate(lc.kappa, lc.max_locks, cfg.variant);
    if (cfg.c == 0) lc.c = cal.c;
    if (cfg.c_prime == 0) lc.c_prime = cal.c_prime;
  }
  return lc;
}

void annotate(History& h, const StatsReport& rep, std::uint64_t seed) {
  const LockConfig& lc = rep.lock;
  auto& m = h.meta();
  m["command"] = to_string(rep.config.kind);
  m["seed"] = std::to_string(seed);
  m["schedule"] = to_string(rep.config.schedule);
  m["variant"] = to_string(rep.config.variant);
  m["procs"] = std::to_string(lc.procs);
  m["kappa"] = std::to_string(lc.kappa);
  m["L"] = std::to_string(lc.max_locks);
  m["T"] = std::to_string(lc.thunk_ticks);
  m["c"] = std::to_string(lc.c);
  m["c_prime"] = std::to_string(lc.c_prime);
  m["M"] = std::to_string(lc.m());
  m["t0"] = std::to_string(lc.t0());
  m["t1"] = std::to_string(lc.t1());
  m["unit"] = std::to_string(lc.c_prime * lc.thunk_ticks);
}

void widen(Range& r, std::uint64_t v, bool first) {
  if (first) {
    r.min = r.max = v;
  } else {
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  }
}

}  // namespace

const char* to_string(WorkloadKind k) { return k == WorkloadKind::Philosophers ? "philosophers" : "graph"; }

const char* to_string(GraphShape s) {
  switch (s) {
    case GraphShape::Random: return "random";
    case GraphShape::Ring: return "ring";
    case GraphShape::Star: return "star";
    case GraphShape::Empty: return "empty";
  }
  return "?";
}

const char* to_string(GraphLocking l) { return l == GraphLocking::Neighborhood ? "neighborhood" : "edges"; }

GraphShape parse_graph_shape(const std::string& s) {
  for (GraphShape g : {GraphShape::Random, GraphShape::Ring, GraphShape::Star, GraphShape::Empty})
    if (s == to_string(g)) return g;
  throw ConfigError("unknown graph shape '" + s + "'");
}

GraphLocking parse_graph_locking(const std::string& s) {
  for (GraphLocking g : {GraphLocking::Neighborhood, GraphLocking::Edges})
    if (s == to_string(g)) return g;
  throw ConfigError("unknown graph locking '" + s + "'");
}

double lower_confidence_bound(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return 0.0;
  double p = static_cast<double>(successes) / static_cast<double>(n);
  return p - z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double StatsReport::rate() const {
  return attempts == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(attempts);
}

double StatsReport::lower_bound() const { return lower_confidence_bound(successes, attempts); }

bool StatsReport::ok() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.ok(); });
}

LockTopology make_topology(const BenchConfig& cfg) {
  if (cfg.kind == WorkloadKind::Philosophers) return philosophers(cfg.n);
  if (cfg.n == 0) throw ConfigError("graph needs at least one node");
  std::vector<Edge> edges;
  switch (cfg.shape) {
    case GraphShape::Random: edges = random_edges(cfg.n, cfg.max_degree, cfg.graph_seed); break;
    case GraphShape::Ring: edges = ring_edges(cfg.n); break;
    case GraphShape::Star: edges = star_edges(cfg.n); break;
    case GraphShape::Empty: break;
  }
  return cfg.locking == GraphLocking::Edges ? edge_topology(cfg.n, edges) : graph_topology(cfg.n, edges);
}

StatsReport run_bench(const BenchConfig& cfg) {
  if (cfg.seeds == 0) throw ConfigError("at least one seed is needed");
  if (cfg.attempts == 0) throw ConfigError("at least one attempt is needed");
  if (cfg.schedule == ScheduleKind::Scripted && cfg.script.empty())
    throw ConfigError("scripted schedule without a script");
  validate_checks(cfg.checks);

  StatsReport rep;
  rep.config = cfg;
  rep.topology = make_topology(cfg);
  LockWorkload w(rep.topology, lock_config_for(cfg, rep.topology), cfg.variant);
  rep.lock = w.config();
  const std::uint32_t procs = rep.topology.procs();

  auto contention = rep.topology.contention();
  for (ProcId p = 0; p < procs; ++p) {
    ProcStats ps;
    ps.proc = p;
    for (LockId l : rep.topology.per_proc[p]) ps.c_p += contention[l];
    rep.per_proc.push_back(ps);
  }
  std::map<std::string, Verdict> merged;
  for (const std::string& c : cfg.checks) merged[c].check = c;

  bool first = true;
  for (std::uint32_t i = 0; i < cfg.seeds; ++i) {
    SeedStats ss;
    ss.seed = cfg.seed + i;
    std::uint64_t quota = cfg.attempts / cfg.seeds + (i < cfg.attempts % cfg.seeds ? 1 : 0);
    if (quota == 0) {
      rep.per_seed.push_back(ss);
      continue;
    }
    Schedule sched = make_schedule(cfg.schedule, ss.seed, procs,
                                   cfg.schedule == ScheduleKind::Scripted ? 0 : kHorizon, cfg.script);
    RandomThinkPolicy player(w.chooser(), cfg.think_min, cfg.think_max);
    RunConfig rc;
    rc.procs = procs;
    rc.seed = ss.seed;
    rc.max_attempts = quota;
    RunResult r = run_sim(sched, player, w, rc);
    annotate(r.history, rep, ss.seed);
    ss.ticks = r.ticks;
    ss.truncated = r.truncated;

    for (const AttemptSteps& a : attempt_steps(r.history)) {
      ++ss.attempts;
      ProcStats& ps = rep.per_proc.at(a.proc);
      ++ps.attempts;
      if (a.won) {
        ++ss.successes;
        ++ps.successes;
      }
      widen(rep.pre_steps, a.reveal - a.start, first);
      widen(rep.post_steps, a.end - a.reveal, first);
      widen(rep.total_steps, a.end - a.start, first);
      first = false;
    }
    rep.attempts += ss.attempts;
    rep.successes += ss.successes;

    std::vector<Verdict> vs = run_checks(r.history, cfg.checks);
    for (std::size_t k = 0; k < vs.size(); ++k) {
      Verdict& into = merged[cfg.checks[k]];
      const std::string prefix = "seed " + std::to_string(ss.seed) + ": ";
      for (Violation v : vs[k].violations) {
        v.explanation = prefix + v.explanation;
        into.violations.push_back(std::move(v));
      }
      for (const std::string& n : vs[k].notes) into.notes.push_back(prefix + n);
    }
    rep.per_seed.push_back(ss);
    if (cfg.keep_histories) rep.histories.push_back(std::move(r.history));
  }
  for (const std::string& c : cfg.checks) rep.verdicts.push_back(std::move(merged[c]));
  return rep;
}

StatsReport cmd_philosophers(BenchConfig cfg) {
  cfg.kind = WorkloadKind::Philosophers;
  return run_bench(cfg);
}

StatsReport cmd_graph(BenchConfig cfg) {
  cfg.kind = WorkloadKind::Graph;
  if (cfg.shape == GraphShape::Random && cfg.max_locks != 0 && cfg.max_locks < cfg.max_degree + 1)
    throw ConfigError("L must be at least max degree + 1 for neighbourhood locking");
  return run_bench(cfg);
}

std::vector<Verdict> run_checks(const History& h, const std::vector<std::string>& checks) {
  validate_checks(checks);
  std::vector<Verdict> out;
  for (const std::string& c : checks) {
    Verdict v;
    if (c == "mutex") {
      v = check_mutex_idempotence(h);
    } else if (c == "regularity") {
      v = check_set_regularity(h);
    } else if (c == "slot-bound") {
      v = check_slot_bound(h);
    } else if (c == "linearizable") {
      v = check_linearizable_active_set(h);
    } else {
      auto it = h.meta().find("variant");
      if (it == h.meta().end()) throw ConfigError("history does not record the lock variant");
      if (parse_variant(it->second) == Variant::Known)
        v = check_fixed_steps(h, meta_u64(h, "t0"), meta_u64(h, "t1"));
      else
        v = check_adaptive_steps(h, meta_u64(h, "unit"));
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Verdict> cmd_check(const std::string& path, const std::vector<std::string>& checks) {
  return run_checks(History::load(path), checks);
}

bool CalibrationReport::validated() const {
  if (validation_schedules == 0) return true;
  if (validation_max_pre > t0) return false;
  if (variant == Variant::Known) return validation_max_post <= t1;
  return validation_max_post <= calibration.c_prime * calibration.thunk_ticks;
}

CalibrationReport cmd_calibrate(std::uint32_t kappa, std::uint32_t max_locks, Variant variant,
                                std::uint32_t validation_schedules) {
  CalibrationReport rep;
  rep.variant = variant;
  rep.calibration = calibrate(kappa, max_locks, variant);
  LockConfig lc;
  lc.procs = kappa;
  lc.kappa = kappa;
  lc.max_locks = max_locks;
  lc.thunk_ticks = rep.calibration.thunk_ticks;
  lc.c = rep.calibration.c;
  lc.c_prime = rep.calibration.c_prime;
  rep.t0 = lc.t0();
  rep.t1 = lc.t1();
  if (validation_schedules > 0) {
    // Fresh seeds, disjoint from the ones used to size the constants.
    CalibrationOptions o;
    o.seeds = validation_schedules;
    o.first_seed = 1001;
    o.round_robin = false;
    o.attempts_per_proc = 10;
    o.margin = 1;
    Calibration v = calibrate(kappa, max_locks, variant, o);
    rep.validation_schedules = validation_schedules;
    rep.validation_max_pre = v.max_pre;
    rep.validation_max_post = variant == Variant::Known ? v.max_post : v.max_post_per_contender;
  }
  return rep;
}

}  // namespace wfl::bench
