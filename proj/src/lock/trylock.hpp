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
#include <memory>
#include <string>
#include <vector>

#include "aset/multi_active_set.hpp"
#include "thunk/runner.hpp"

namespace wfl {

using LockId = std::uint32_t;

enum class Variant { Known, Adaptive };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Bounds and delay constants of a lock instance.
struct LockConfig {
  std::uint32_t procs = 1;      // P
  std::uint32_t kappa = 1;      // max point contention per lock
  std::uint32_t max_locks = 1;  // L
  std::uint64_t thunk_ticks = 1;  // T
  std::uint64_t c = 1;
  std::uint64_t c_prime = 1;
  /// Priorities are drawn from [1, M]; 0 selects P^3.
  std::int64_t priority_range = 0;

  std::uint64_t t0() const;
  std::uint64_t t1() const;
  std::int64_t m() const;
  /// Throws ConfigError on zero or overflowing parameters.
  void validate() const;
};

/// One active set per lock.
class LockRegistry {
 public:
  LockRegistry() = default;

  template <class Owner>
  LockRegistry(Owner& owner, std::uint32_t locks, std::uint32_t capacity) {
    for (LockId l = 0; l < locks; ++l) sets_.push_back(std::make_unique<ActiveSet>(owner, capacity, l));
  }

  std::uint32_t size() const { return static_cast<std::uint32_t>(sets_.size()); }
  const ActiveSet& at(LockId l) const;

 private:
  std::vector<std::unique_ptr<ActiveSet>> sets_;
};

/// A tryLock attempt. Immutable once published; priority and status live in
/// cells.
struct Descriptor final : HeapObject {
  static constexpr HeapKind kKind = HeapKind::Descriptor;
  Descriptor(std::vector<LockId> locks_, SharedThunk thunk_, CellId priority_, CellId status_)
      : HeapObject(kKind), locks(std::move(locks_)), thunk(std::move(thunk_)), priority(priority_), status(status_) {}
  std::vector<LockId> locks;
  SharedThunk thunk;
  CellId priority;  // -1, TBD or a drawn priority
  CellId status;    // Status word
};

/// Chooses the priority installed for descriptor `d`. The default draws
/// uniformly from [1, M] on the caller's private stream.
using PriorityDraw = std::function<std::int64_t(Process& self, Handle d, std::int64_t m)>;

/// Smallest power of two that is >= k (k >= 1).
std::uint64_t next_power_of_two(std::uint64_t k);
/// Step at which the adaptive post delay ends: `prev` plus contenders times
/// the per-contender unit.
std::uint64_t adaptive_post_delay_target(std::uint64_t prev, std::uint64_t contenders, std::uint64_t unit);

/// Outcome of one attempt as seen by its initiator.
struct AttemptResult {
  bool won = false;
  Handle descriptor;
  std::uint64_t start_step = 0;
  std::uint64_t reveal_step = 0;
  std::uint64_t end_step = 0;
  std::uint64_t contenders = 0;  // adaptive only
};

/// The wait-free randomized tryLock over a registry of locks. Stateless
/// apart from configuration, so one instance serves every process.
class TryLock {
 public:
  TryLock(const LockRegistry& registry, LockConfig config, Variant variant);

  const LockConfig& config() const { return config_; }
  Variant variant() const { return variant_; }
  const LockRegistry& registry() const { return *registry_; }

  void set_priority_draw(PriorityDraw draw) { draw_ = std::move(draw); }
  /// Skips both delays and records the raw step counts instead; used by
  /// calibration only.
  void set_measure_only(bool on) { measure_only_ = on; }

  /// Priority for `d` from the override hook or the caller's stream.
  std::int64_t draw_priority(Process& self, Handle d) const;

  /// Runs one attempt for `thunk` on `locks`. `effect` is recorded in the
  /// attempt-start event for checkers (a cell index or null). Throws
  /// ConfigError before any shared step when the lock list is bad.
  Task<AttemptResult> try_locks(Process& self, std::vector<LockId> locks, SharedThunk thunk,
                                Word effect = Word::null()) const;

  /// Competes `d` against every flagged descriptor on its locks; on return
  /// d is no longer active. Returns d's final status.
  Task<Status> run(Process& self, Word d) const;
  struct AdaptiveOutcome {
    Status status = Status::Active;
    std::uint64_t contenders = 0;
  };
  /// Adaptive run: snapshots the sets, reveals the priority, then competes
  /// over the snapshot. Reports the number of contenders seen.
  Task<AdaptiveOutcome> run_adaptive(Process& self, Word d) const;

  Task<void> decide(Process& self, Word d) const;
  Task<void> eliminate(Process& self, Word d) const;
  /// Runs d's thunk if d has won. Returns the status read.
  Task<Status> celebrate_if_won(Process& self, Word d) const;

  /// Flag view of descriptor priorities: priority > 0, or TBD as well for
  /// the adaptive variant.
  class PriorityFlag : public FlagAccess {
   public:
    explicit PriorityFlag(const TryLock& lock) : lock_(&lock) {}
    Task<void> set_flag(Process& self, Word item) override;
    Task<void> clear_flag(Process& self, Word item) override;
    Task<bool> get_flag(Process& self, Word item) override;

   protected:
    const TryLock* lock_;
  };

 private:
  class RevealFlag;

  const Descriptor& desc(Process& self, Word d) const;
  Task<void> compete(Process& self, Word d, const std::vector<Word>& set) const;
  Collection collection(const std::vector<LockId>& locks) const;

  const LockRegistry* registry_;
  LockConfig config_;
  Variant variant_;
  PriorityDraw draw_;
  bool measure_only_ = false;
};

}  // namespace wfl
