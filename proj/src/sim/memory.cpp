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

#include "sim/memory.hpp"

#include <string>

namespace wfl {

CellId SharedMemory::allocate(Word init, std::uint64_t key) {
  cells_.push_back(Cell{init, 0, key});
  return CellId{static_cast<std::uint32_t>(cells_.size() - 1)};
}

const SharedMemory::Cell& SharedMemory::cell(CellId c) const {
  if (!c.valid() || c.index >= cells_.size())
    throw SimFault("access to unallocated cell " + std::to_string(c.index));
  return cells_[c.index];
}

SharedMemory::Cell& SharedMemory::cell(CellId c) {
  return const_cast<Cell&>(static_cast<const SharedMemory&>(*this).cell(c));
}

MemResult SharedMemory::apply(const MemRequest& r) {
  Cell& c = cell(r.cell);
  MemResult res;
  switch (r.op) {
    case MemOpKind::Read:
    case MemOpKind::Lll:
      res.ok = true;
      break;
    case MemOpKind::Write:
      c.value = r.a;
      ++c.version;
      res.ok = true;
      break;
    case MemOpKind::Cas:
    case MemOpKind::Cam:
    case MemOpKind::MCam:
      if (c.value == r.a) {
        c.value = r.b;
        ++c.version;
        res.ok = true;
      }
      break;
    case MemOpKind::Lsc:
      if (r.label.cell != r.cell)
        throw SimFault("lsc on cell " + std::to_string(r.cell.index) +
                       " with a label read from cell " + std::to_string(r.label.cell.index));
      if (r.label.version > c.version)
        throw SimFault("lsc label from the future on cell " + std::to_string(r.cell.index));
      if (r.label.version == c.version) {
        c.value = r.b;
        ++c.version;
        res.ok = true;
      }
      break;
    case MemOpKind::None:
      throw SimFault("empty memory request");
  }
  res.value = c.value;
  res.version = c.version;
  return res;
}

Handle Heap::publish(std::unique_ptr<const HeapObject> obj, std::uint64_t key) {
  objects_.push_back(std::move(obj));
  keys_.push_back(key);
  return Handle{static_cast<std::uint32_t>(objects_.size() - 1)};
}

const HeapObject& Heap::at(Handle h) const {
  if (!h.valid() || h.index >= objects_.size())
    throw SimFault("dangling handle " + std::to_string(h.index));
  return *objects_[h.index];
}

std::uint64_t Heap::key(Handle h) const {
  at(h);
  return keys_[h.index];
}

std::vector<Word> cons_items(const Heap& heap, Word head) {
  std::vector<Word> out;
  while (!head.is_null()) {
    const auto& n = heap.get<ConsNode>(head.as_handle());
    if (!n.item.is_null()) out.push_back(n.item);
    head = n.next;
  }
  return out;
}

}  // namespace wfl
