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
#include <vector>

#include "sim/engine.hpp"

namespace wfl {

/// An insert found every slot owned.
class CapacityError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Linearizable active set over an announcements array of `capacity`
/// slots. Each slot has an owner cell and a set cell; the set cell holds the
/// head of an immutable cons list (or null). get_set is a single read of
/// slot 0's set.
///
/// The object itself only names cells, so one instance can be shared by all
/// processes of an engine.
class ActiveSet {
 public:
  /// What climb conses onto at the highest slot. EmptyAbove treats the
  /// missing slot C as an empty set; OwnSet reuses the top slot's current
  /// set, which keeps removed items there forever (kept for regression
  /// tests only).
  enum class TopRule { EmptyAbove, OwnSet };

  ActiveSet() = default;

  /// `Owner` is an Engine (setup time) or a Process.
  template <class Owner>
  ActiveSet(Owner& owner, std::uint32_t capacity, std::int64_t id, TopRule top = TopRule::EmptyAbove)
      : id_(id), top_rule_(top) {
    if (capacity == 0) throw ConfigError("active set capacity must be at least 1");
    for (std::uint32_t i = 0; i < capacity; ++i) {
      owners_.push_back(owner.alloc_cell(Word::null()));
      sets_.push_back(owner.alloc_cell(Word::null()));
    }
  }

  std::uint32_t capacity() const { return static_cast<std::uint32_t>(owners_.size()); }
  std::int64_t id() const { return id_; }
  CellId owner_cell(std::uint32_t i) const { return owners_.at(i); }
  CellId set_cell(std::uint32_t i) const { return sets_.at(i); }

  /// Claims the first free slot and climbs from it. Returns the slot index.
  /// Throws CapacityError when every slot is owned.
  Task<std::uint32_t> insert(Process& self, Word item) const;
  /// Clears `slot` (which `item` must own) and climbs from it.
  Task<void> remove(Process& self, std::uint32_t slot, Word item) const;
  /// Head of the current set list. Exactly one tick.
  Task<Word> get_set(Process& self) const;
  /// Propagates owners from slot i down to slot 0, two attempts per level.
  Task<void> climb(Process& self, std::uint32_t i) const;

 private:
  std::int64_t id_ = -1;
  TopRule top_rule_ = TopRule::EmptyAbove;
  std::vector<CellId> owners_;
  std::vector<CellId> sets_;
};

}  // namespace wfl
