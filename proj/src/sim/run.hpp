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
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sim/engine.hpp"

namespace wfl {

enum class ScheduleKind { RoundRobin, UniformRandom, Scripted };

const char* to_string(ScheduleKind k);
ScheduleKind parse_schedule_kind(const std::string& s);

/// Oblivious scheduler: a fixed function from tick to process, determined
/// entirely by its construction parameters. Immutable after construction.
class Schedule {
 public:
  ScheduleKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  std::uint32_t procs() const { return procs_; }
  std::uint64_t horizon() const { return horizon_; }
  const std::vector<ProcId>& script() const { return script_; }

  /// Process that runs at tick `t` (t < horizon).
  ProcId at(Tick t) const;

  friend Schedule make_schedule(ScheduleKind, std::uint64_t, std::uint32_t, std::uint64_t,
                                std::vector<ProcId>);

 private:
  Schedule() = default;

  ScheduleKind kind_ = ScheduleKind::RoundRobin;
  std::uint64_t seed_ = 0;
  std::uint32_t procs_ = 1;
  std::uint64_t horizon_ = 1;
  std::vector<ProcId> script_;
};

/// Scripted schedules take their horizon from the script length when
/// `horizon` is 0. Throws ConfigError on bad parameters.
Schedule make_schedule(ScheduleKind kind, std::uint64_t seed, std::uint32_t procs,
                       std::uint64_t horizon, std::vector<ProcId> script = {});

/// Reads a whitespace-separated list of process ids.
std::vector<ProcId> load_script(const std::string& path);

/// What the player asks an idle process to do.
struct AttemptRequest {
  std::vector<std::uint32_t> locks;
};

/// Adaptive player adversary: decides, for an idle process, whether to start
/// an attempt now and with which locks. Sees only the history strictly
/// before the current tick.
class PlayerPolicy {
 public:
  virtual ~PlayerPolicy() = default;
  virtual std::optional<AttemptRequest> decide(ProcId p, std::span<const Event> prefix,
                                               std::mt19937_64& rng) = 0;
};

using LockChooser = std::function<std::vector<std::uint32_t>(ProcId)>;

/// Starts a new attempt every time the process is idle.
class ImmediateRetryPolicy final : public PlayerPolicy {
 public:
  explicit ImmediateRetryPolicy(LockChooser chooser) : chooser_(std::move(chooser)) {}
  std::optional<AttemptRequest> decide(ProcId p, std::span<const Event>, std::mt19937_64&) override;

 private:
  LockChooser chooser_;
};

/// Thinks for a uniform number of own idle ticks in [min, max] between
/// attempts.
class RandomThinkPolicy final : public PlayerPolicy {
 public:
  RandomThinkPolicy(LockChooser chooser, std::uint64_t min_think, std::uint64_t max_think);
  std::optional<AttemptRequest> decide(ProcId p, std::span<const Event>, std::mt19937_64& rng) override;

 private:
  LockChooser chooser_;
  std::uint64_t min_;
  std::uint64_t max_;
  std::vector<std::optional<std::uint64_t>> remaining_;
};

/// Fixed per-process list of (idle ticks to wait, lock set) entries; a
/// process whose list is exhausted stays idle.
class ScriptedPolicy final : public PlayerPolicy {
 public:
  struct Entry {
    std::uint64_t wait = 0;
    std::vector<std::uint32_t> locks;
  };
  explicit ScriptedPolicy(std::vector<std::vector<Entry>> per_proc);
  std::optional<AttemptRequest> decide(ProcId p, std::span<const Event>, std::mt19937_64&) override;

 private:
  std::vector<std::vector<Entry>> script_;
  std::vector<std::size_t> next_;
  std::vector<std::uint64_t> waited_;
};

/// Per-process programs run by run_sim.
class Workload {
 public:
  virtual ~Workload() = default;
  /// Allocates shared objects before the first tick.
  virtual void setup(Engine& engine) = 0;
  /// One attempt by `self`; completes when the attempt returns.
  virtual Task<void> attempt(Process& self, AttemptRequest request) = 0;
};

struct RunConfig {
  std::uint32_t procs = 1;
  std::uint64_t seed = 0;
  /// Stop starting attempts after this many; 0 means unlimited.
  std::uint64_t max_attempts = 0;
  /// Called with the final engine state before the history is moved out.
  std::function<void(const Engine&)> inspect;
};

struct RunResult {
  History history;
  bool truncated = false;
  std::uint64_t ticks = 0;
  std::uint64_t attempts_started = 0;
  std::uint64_t attempts_completed = 0;
  std::vector<std::uint64_t> final_steps;
};

/// Runs the workload under the schedule. Ends when the attempt budget is
/// spent and every process is idle, or when the horizon runs out (then the
/// result is flagged truncated). Deterministic in all of its inputs.
RunResult run_sim(const Schedule& schedule, PlayerPolicy& player, Workload& workload,
                  const RunConfig& config);

}  // namespace wfl
