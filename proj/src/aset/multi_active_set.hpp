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
#include <memory>
#include <vector>

#include "aset/active_set.hpp"

namespace wfl {

/// How the multi active set reads and writes an item's membership flag.
/// The lock plugs in its descriptor priority here; tests use BoolFlag.
class FlagAccess {
 public:
  virtual ~FlagAccess() = default;
  virtual Task<void> set_flag(Process& self, Word item) = 0;
  virtual Task<void> clear_flag(Process& self, Word item) = 0;
  virtual Task<bool> get_flag(Process& self, Word item) = 0;
};

/// Item record with a boolean flag cell.
struct FlagItem final : HeapObject {
  static constexpr HeapKind kKind = HeapKind::Item;
  FlagItem(CellId flag_, std::int64_t payload_) : HeapObject(kKind), flag(flag_), payload(payload_) {}
  CellId flag;
  std::int64_t payload;
};

template <class Owner>
Word make_flag_item(Owner& owner, std::int64_t payload) {
  CellId flag = owner.alloc_cell(Word::integer(0));
  return Word::handle(owner.publish(std::make_unique<FlagItem>(flag, payload)));
}

class BoolFlag final : public FlagAccess {
 public:
  Task<void> set_flag(Process& self, Word item) override;
  Task<void> clear_flag(Process& self, Word item) override;
  Task<bool> get_flag(Process& self, Word item) override;
};

using Collection = std::vector<const ActiveSet*>;

/// Where an item landed in each set of its collection; kept by the inserting
/// process for the matching remove.
struct Membership {
  Word item;
  Collection sets;
  std::vector<std::uint32_t> slots;
};

/// Clears the flag, inserts into every set in order, then sets the flag.
/// Throws ConfigError for an empty or duplicated collection and
/// CapacityError when a set is full.
Task<Membership> multi_insert(Process& self, Word item, Collection collection, FlagAccess& flags);

/// Clears the flag, then removes from every set using the stored slots.
/// Throws SimFault when `collection` differs from the inserted one.
Task<void> multi_remove(Process& self, const Membership& m, const Collection& collection,
                        FlagAccess& flags);

/// The set's current items whose flag reads true.
Task<std::vector<Word>> get_set_filtered(Process& self, const ActiveSet& set, FlagAccess& flags);

}  // namespace wfl
