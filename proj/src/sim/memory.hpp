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

#include "sim/history.hpp"
#include "sim/word.hpp"

namespace wfl {

/// A request for one atomic primitive. Applied by the engine in exactly one
/// tick of the issuing process.
struct MemRequest {
  MemOpKind op = MemOpKind::None;
  CellId cell;
  Word a;
  Word b;
  Label label;
};

struct MemResult {
  Word value;                 // value read, or value after the op
  bool ok = false;            // success of cas/cam/lsc/mcam; true otherwise
  std::uint64_t version = 0;  // cell version after the op
};

/// Simulated sequentially consistent word memory. Every cell carries a
/// version that grows by one per successful mutation, which doubles as the
/// lll label.
class SharedMemory {
 public:
  CellId allocate(Word init, std::uint64_t key = 0);

  MemResult apply(const MemRequest& r);

  /// Harness access; not a simulated step.
  Word peek(CellId c) const { return cell(c).value; }
  std::uint64_t version(CellId c) const { return cell(c).version; }
  std::uint64_t key(CellId c) const { return cell(c).key; }
  std::size_t size() const { return cells_.size(); }
  /// Harness write for fixtures; bumps the version like a real write.
  void poke(CellId c, Word v) {
    cell(c).value = v;
    ++cell(c).version;
  }

 private:
  struct Cell {
    Word value;
    std::uint64_t version = 0;
    std::uint64_t key = 0;
  };

  const Cell& cell(CellId c) const;
  Cell& cell(CellId c);

  std::vector<Cell> cells_;
};

enum class HeapKind : std::uint8_t { ConsNode, Context, Descriptor, Item, Other };

/// Immutable record reachable through a handle. Published once, never
/// mutated, never reclaimed during a run.
struct HeapObject {
  explicit HeapObject(HeapKind k) : kind(k) {}
  virtual ~HeapObject() = default;
  const HeapKind kind;
};

class Heap {
 public:
  Handle publish(std::unique_ptr<const HeapObject> obj, std::uint64_t key = 0);

  template <class T>
  const T& get(Handle h) const {
    const HeapObject& o = at(h);
    if (o.kind != T::kKind) throw SimFault("heap record has unexpected kind");
    return static_cast<const T&>(o);
  }
  const HeapObject& at(Handle h) const;
  std::uint64_t key(Handle h) const;
  std::size_t size() const { return objects_.size(); }

 private:
  std::vector<std::unique_ptr<const HeapObject>> objects_;
  std::vector<std::uint64_t> keys_;
};

/// Immutable list node used for active-set contents.
struct ConsNode final : HeapObject {
  static constexpr HeapKind kKind = HeapKind::ConsNode;
  ConsNode(Word item_, Word next_) : HeapObject(kKind), item(item_), next(next_) {}
  Word item;
  Word next;  // handle of the next node, or null
};

/// Collects the items of a cons list headed by `head` (a handle or null).
/// Nodes with a null item stand for "no owner at this level" and are skipped.
std::vector<Word> cons_items(const Heap& heap, Word head);

}  // namespace wfl
