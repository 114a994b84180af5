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

#include "sim/run.hpp"

#include <fstream>

namespace wfl {

const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::RoundRobin: return "round_robin";
    case ScheduleKind::UniformRandom: return "uniform_random";
    case ScheduleKind::Scripted: return "scripted";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(const std::string& s) {
  if (s == "round_robin") return ScheduleKind::RoundRobin;
  if (s == "uniform_random") return ScheduleKind::UniformRandom;
  if (s == "scripted") return ScheduleKind::Scripted;
  throw ConfigError("unknown schedule kind '" + s + "'");
}

Schedule make_schedule(ScheduleKind kind, std::uint64_t seed, std::uint32_t procs,
                       std::uint64_t horizon, std::vector<ProcId> script) {
  if (procs == 0) throw ConfigError("schedule needs at least one process");
  if (kind == ScheduleKind::Scripted) {
    if (script.empty()) throw ConfigError("scripted schedule with an empty script");
    for (ProcId p : script)
      if (p >= procs)
        throw ConfigError("scripted entry " + std::to_string(p) + " out of range for " +
                          std::to_string(procs) + " processes");
    if (horizon == 0 || horizon > script.size()) horizon = script.size();
  }
  if (horizon == 0) throw ConfigError("schedule horizon must be at least 1");
  Schedule s;
  s.kind_ = kind;
  s.seed_ = seed;
  s.procs_ = procs;
  s.horizon_ = horizon;
  s.script_ = std::move(script);
  return s;
}

ProcId Schedule::at(Tick t) const {
  switch (kind_) {
    case ScheduleKind::RoundRobin:
      return static_cast<ProcId>(t % procs_);
    case ScheduleKind::UniformRandom: {
      auto r = splitmix64(splitmix64(seed_) ^ splitmix64(t + 0x51ed2701ULL));
      return static_cast<ProcId>((static_cast<unsigned __int128>(r) * procs_) >> 64);
    }
    case ScheduleKind::Scripted:
      return script_.at(t);
  }
  return 0;
}

std::vector<ProcId> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schedule script '" + path + "'");
  std::vector<ProcId> out;
  long long v = 0;
  while (in >> v) {
    if (v < 0) throw ConfigError("negative process id in schedule script");
    out.push_back(static_cast<ProcId>(v));
  }
  if (!in.eof()) throw ConfigError("malformed schedule script '" + path + "'");
  return out;
}

std::optional<AttemptRequest> ImmediateRetryPolicy::decide(ProcId p, std::span<const Event>,
                                                           std::mt19937_64&) {
  return AttemptRequest{chooser_(p)};
}

RandomThinkPolicy::RandomThinkPolicy(LockChooser chooser, std::uint64_t min_think,
                                     std::uint64_t max_think)
    : chooser_(std::move(chooser)), min_(min_think), max_(max_think) {
  if (min_ > max_) throw ConfigError("think time bounds reversed");
}

std::optional<AttemptRequest> RandomThinkPolicy::decide(ProcId p, std::span<const Event>,
                                                        std::mt19937_64& rng) {
  if (remaining_.size() <= p) remaining_.resize(p + 1);
  auto& left = remaining_[p];
  if (!left) left = std::uniform_int_distribution<std::uint64_t>(min_, max_)(rng);
  if (*left > 0) {
    --*left;
    return std::nullopt;
  }
  left.reset();
  return AttemptRequest{chooser_(p)};
}

ScriptedPolicy::ScriptedPolicy(std::vector<std::vector<Entry>> per_proc)
    : script_(std::move(per_proc)), next_(script_.size(), 0), waited_(script_.size(), 0) {}

std::optional<AttemptRequest> ScriptedPolicy::decide(ProcId p, std::span<const Event>,
                                                     std::mt19937_64&) {
  if (p >= script_.size() || next_[p] >= script_[p].size()) return std::nullopt;
  const Entry& e = script_[p][next_[p]];
  if (waited_[p] < e.wait) {
    ++waited_[p];
    return std::nullopt;
  }
  waited_[p] = 0;
  ++next_[p];
  return AttemptRequest{e.locks};
}

RunResult run_sim(const Schedule& schedule, PlayerPolicy& player, Workload& workload,
                  const RunConfig& config) {
  if (schedule.procs() != config.procs)
    throw ConfigError("schedule covers " + std::to_string(schedule.procs()) +
                      " processes but the run has " + std::to_string(config.procs));
  Engine engine(EngineOptions{config.procs, config.seed});
  workload.setup(engine);

  std::vector<std::mt19937_64> player_rng;
  player_rng.reserve(config.procs);
  for (ProcId p = 0; p < config.procs; ++p)
    player_rng.emplace_back(splitmix64(config.seed ^ splitmix64(0x91a7e40000ULL + p)));

  RunResult result;
  std::uint64_t in_flight = 0;
  bool budget_spent = false;
  Tick t = 0;
  for (; t < schedule.horizon(); ++t) {
    budget_spent = config.max_attempts != 0 && result.attempts_started >= config.max_attempts;
    if (budget_spent && in_flight == 0) break;
    ProcId p = schedule.at(t);
    if (engine.busy(p)) {
      engine.step(p);
      if (!engine.busy(p)) {
        --in_flight;
        ++result.attempts_completed;
      }
      continue;
    }
    std::optional<AttemptRequest> req;
    if (!budget_spent) {
      const auto& ev = engine.history().events();
      req = player.decide(p, std::span<const Event>(ev.data(), ev.size()), player_rng[p]);
    }
    engine.idle_tick(p, req ? 1 : 0);
    if (req) {
      ++result.attempts_started;
      ++in_flight;
      engine.spawn(p, workload.attempt(engine.proc(p), std::move(*req)));
      if (!engine.busy(p)) {
        --in_flight;
        ++result.attempts_completed;
      }
    }
  }
  result.ticks = t;
  result.truncated = in_flight > 0;
  for (ProcId p = 0; p < config.procs; ++p) result.final_steps.push_back(engine.proc(p).steps());
  if (config.inspect) config.inspect(engine);
  engine.history().set_truncated(result.truncated);
  result.history = std::move(engine.history());
  return result;
}

}  // namespace wfl
