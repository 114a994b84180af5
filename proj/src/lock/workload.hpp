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
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lock/trylock.hpp"
#include "sim/run.hpp"

namespace wfl {

/// Critical section used by the lock workloads: increments one counter per
/// lock plus a per-attempt effect cell (the last param), reading everything
/// in one capsule and storing in the next.
ThunkProgram counter_program(int locks);

/// Fixed lock set per process.
struct LockTopology {
  std::uint32_t locks = 0;
  std::vector<std::vector<LockId>> per_proc;

  std::uint32_t procs() const { return static_cast<std::uint32_t>(per_proc.size()); }
  /// Largest lock set.
  std::uint32_t max_locks() const;
  /// Number of processes naming each lock: the per-lock contention bound.
  std::vector<std::uint32_t> contention() const;
  std::uint32_t max_contention() const;
};

/// Philosopher i takes chopsticks i and (i+1) mod n.
LockTopology philosophers(std::uint32_t n);
using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Edges of a random graph where every node ends with degree at most
/// `max_degree`.
std::vector<Edge> random_edges(std::uint32_t nodes, std::uint32_t max_degree, std::uint64_t seed);
std::vector<Edge> ring_edges(std::uint32_t nodes);
/// Node 0 joined to every other node.
std::vector<Edge> star_edges(std::uint32_t nodes);

/// Every node locks itself and its neighbours.
LockTopology graph_topology(std::uint32_t nodes, const std::vector<Edge>& edges);
/// One process per edge, locking its two endpoints.
LockTopology edge_topology(std::uint32_t nodes, const std::vector<Edge>& edges);
/// Random graph where every node ends with degree at most `max_degree`.
LockTopology random_graph(std::uint32_t nodes, std::uint32_t max_degree, std::uint64_t seed);
LockTopology ring_graph(std::uint32_t nodes);
/// Node 0 joined to every other node.
LockTopology star_graph(std::uint32_t nodes);
/// `procs` processes all naming the same `locks` locks.
LockTopology clique(std::uint32_t procs, std::uint32_t locks);

/// Runs tryLock attempts with the counter thunk over a topology. One
/// instance serves one run at a time; setup rebuilds the shared objects.
class LockWorkload final : public Workload {
 public:
  /// `config.thunk_ticks` is overwritten with the thunk's solo run length.
  LockWorkload(LockTopology topology, LockConfig config, Variant variant);

  void setup(Engine& engine) override;
  Task<void> attempt(Process& self, AttemptRequest request) override;

  const LockTopology& topology() const { return topo_; }
  const LockConfig& config() const { return config_; }
  Variant variant() const { return variant_; }
  /// Active-set capacity: kappa for the known-bounds lock, P otherwise.
  std::uint32_t capacity() const;

  void set_priority_draw(PriorityDraw d) { draw_ = std::move(d); }
  void set_measure_only(bool on) { measure_only_ = on; }

  /// Chooser for the player policies: each process's fixed lock set.
  LockChooser chooser() const;

  /// Valid after setup.
  const TryLock& lock() const { return *lock_; }
  CellId counter(LockId l) const { return counters_.at(l); }

 private:
  const ThunkProgram& program_for(std::size_t locks) const;

  LockTopology topo_;
  LockConfig config_;
  Variant variant_;
  std::map<std::size_t, ThunkProgram> programs_;
  PriorityDraw draw_;
  bool measure_only_ = false;

  std::unique_ptr<LockRegistry> registry_;
  std::unique_ptr<TryLock> lock_;
  std::vector<CellId> counters_;
};

/// Thunk length T for a topology: the longest solo run over its lock sets.
std::uint64_t thunk_ticks_for(const LockTopology& topo);

}  // namespace wfl
