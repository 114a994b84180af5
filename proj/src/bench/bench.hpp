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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lock/calibrate.hpp"
#include "verify/checks.hpp"

namespace wfl::bench {

enum class WorkloadKind { Philosophers, Graph };
enum class GraphShape { Random, Ring, Star, Empty };
/// Neighborhood: one process per node, locking the node and its neighbours.
/// Edges: one process per edge, locking both endpoints (a ring is then the
/// philosophers table).
enum class GraphLocking { Neighborhood, Edges };

const char* to_string(WorkloadKind k);
const char* to_string(GraphShape s);
const char* to_string(GraphLocking l);
GraphShape parse_graph_shape(const std::string& s);
GraphLocking parse_graph_locking(const std::string& s);

struct BenchConfig {
  WorkloadKind kind = WorkloadKind::Philosophers;
  std::uint32_t n = 8;  // philosophers, or graph nodes
  GraphShape shape = GraphShape::Random;
  GraphLocking locking = GraphLocking::Neighborhood;
  std::uint32_t max_degree = 2;
  std::uint64_t graph_seed = 1;

  /// Completed attempts wanted, split evenly over the seeds.
  std::uint64_t attempts = 1000;
  /// Runs use seeds seed, seed+1, ..., seed+seeds-1 (schedule and process
  /// randomness both derive from it).
  std::uint64_t seed = 1;
  std::uint32_t seeds = 1;
  ScheduleKind schedule = ScheduleKind::UniformRandom;
  std::vector<ProcId> script;  // scripted schedules
  std::string script_name;     // echoed in the report

  Variant variant = Variant::Known;
  std::uint64_t think_min = 0;
  std::uint64_t think_max = 16;

  /// 0 takes the value from the topology (kappa, L) or from calibration
  /// (c, c').
  std::uint32_t kappa = 0;
  std::uint32_t max_locks = 0;
  std::uint64_t c = 0;
  std::uint64_t c_prime = 0;
  std::int64_t priority_range = 0;

  /// Subset of mutex, regularity, slot-bound, steps, linearizable.
  std::vector<std::string> checks = default_checks();
  /// Keep every run's history in the report (for --history-out).
  bool keep_histories = false;

  static std::vector<std::string> default_checks() { return {"mutex", "regularity", "slot-bound", "steps"}; }
};

struct ProcStats {
  ProcId proc = 0;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  /// Sum of the contention bounds of the process's locks.
  std::uint64_t c_p = 0;
};

struct SeedStats {
  std::uint64_t seed = 0;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::uint64_t ticks = 0;
  bool truncated = false;
};

struct Range {
  std::uint64_t min = 0;
  std::uint64_t max = 0;
};

struct StatsReport {
  BenchConfig config;
  LockTopology topology;
  LockConfig lock;  // as run, with T filled in
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::vector<ProcStats> per_proc;
  std::vector<SeedStats> per_seed;
  Range pre_steps, post_steps, total_steps;
  std::vector<Verdict> verdicts;
  std::vector<History> histories;

  double rate() const;
  /// One-sided 99% lower confidence bound on the per-attempt success rate.
  double lower_bound() const;
  bool ok() const;
};

inline constexpr double kZ99 = 2.326;

/// Point estimate minus z * standard error, for `successes` out of `n`.
double lower_confidence_bound(std::uint64_t successes, std::uint64_t n, double z = kZ99);

LockTopology make_topology(const BenchConfig& cfg);

/// Runs the configured workload over every seed, runs the checks on each
/// history and aggregates. Throws ConfigError on bad configuration.
StatsReport run_bench(const BenchConfig& cfg);

/// Philosophers around a table of n.
StatsReport cmd_philosophers(BenchConfig cfg);
/// Graph locking; requires max_degree + 1 <= L when L is given.
StatsReport cmd_graph(BenchConfig cfg);

/// Runs the named checks on one history. "steps" picks the fixed or
/// adaptive step check from the history's recorded configuration.
std::vector<Verdict> run_checks(const History& h, const std::vector<std::string>& checks);

/// Reads a history file (text or binary) and checks it. Throws
/// HistoryFormatError or std::runtime_error on unreadable input.
std::vector<Verdict> cmd_check(const std::string& path, const std::vector<std::string>& checks);

struct CalibrationReport {
  Calibration calibration;
  Variant variant = Variant::Known;
  std::uint64_t t0 = 0, t1 = 0;
  /// Largest pre-reveal and per-contender post steps over the validation
  /// schedules (0 when validation was skipped).
  std::uint32_t validation_schedules = 0;
  std::uint64_t validation_max_pre = 0;
  std::uint64_t validation_max_post = 0;
  bool validated() const;
};

CalibrationReport cmd_calibrate(std::uint32_t kappa, std::uint32_t max_locks, Variant variant,
                                std::uint32_t validation_schedules = 0);

}  // namespace wfl::bench
