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

#include "aset/active_set.hpp"

#include <memory>
#include <string>

namespace wfl {

namespace {
void marker(Process& self, EventKind kind, ObjOp op, std::int64_t obj, Word a = {}, Word b = {},
            std::vector<Word> list = {}) {
  Event e;
  e.kind = kind;
  e.op = static_cast<std::uint8_t>(op);
  e.obj = obj;
  e.a = a;
  e.b = b;
  e.list = std::move(list);
  e.ok = true;
  self.emit(std::move(e));
}
}  // namespace

Task<void> ActiveSet::climb(Process& self, std::uint32_t i) const {
  const std::uint32_t top = capacity() - 1;
  for (std::uint32_t j = i + 1; j-- > 0;) {
    for (int k = 0; k < 2; ++k) {
      Word cur = co_await self.read(sets_[j]);
      Word next = Word::null();
      if (j != top)
        next = co_await self.read(sets_[j + 1]);
      else if (top_rule_ == TopRule::OwnSet)
        next = cur;
      Word member = co_await self.read(owners_[j]);
      // Always a new node, even with no owner: reinstalling an older head
      // would let a stale cas succeed (ABA) and resurrect removed items.
      Word fresh = Word::handle(self.publish(std::make_unique<ConsNode>(member, next)));
      co_await self.cas(sets_[j], cur, fresh);
    }
  }
}

Task<std::uint32_t> ActiveSet::insert(Process& self, Word item) const {
  marker(self, EventKind::OpInvoke, ObjOp::AsInsert, id_, item);
  for (std::uint32_t i = 0; i < capacity(); ++i) {
    if (co_await self.cas(owners_[i], Word::null(), item)) {
      co_await climb(self, i);
      marker(self, EventKind::OpResponse, ObjOp::AsInsert, id_, Word::integer(i), item);
      co_return i;
    }
  }
  throw CapacityError("active set " + std::to_string(id_) + " is full (capacity " +
                      std::to_string(capacity()) + ")");
}

Task<void> ActiveSet::remove(Process& self, std::uint32_t slot, Word item) const {
  if (slot >= capacity() || !(self.memory().peek(owners_[slot]) == item))
    throw SimFault("remove of slot " + std::to_string(slot) + " not owned by the caller's item");
  marker(self, EventKind::OpInvoke, ObjOp::AsRemove, id_, item, Word::integer(slot));
  co_await self.write(owners_[slot], Word::null());
  co_await climb(self, slot);
  marker(self, EventKind::OpResponse, ObjOp::AsRemove, id_, Word::null(), Word::integer(slot));
}

Task<Word> ActiveSet::get_set(Process& self) const {
  marker(self, EventKind::OpInvoke, ObjOp::AsGetSet, id_);
  Word head = co_await self.read(sets_[0]);
  marker(self, EventKind::OpResponse, ObjOp::AsGetSet, id_, head, {}, cons_items(self.heap(), head));
  co_return head;
}

}  // namespace wfl
