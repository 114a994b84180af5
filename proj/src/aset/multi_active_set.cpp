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

#include "aset/multi_active_set.hpp"

#include <set>

namespace wfl {

Task<void> BoolFlag::set_flag(Process& self, Word item) {
  co_await self.write(self.heap().get<FlagItem>(item.as_handle()).flag, Word::integer(1));
}

Task<void> BoolFlag::clear_flag(Process& self, Word item) {
  co_await self.write(self.heap().get<FlagItem>(item.as_handle()).flag, Word::integer(0));
}

Task<bool> BoolFlag::get_flag(Process& self, Word item) {
  Word v = co_await self.read(self.heap().get<FlagItem>(item.as_handle()).flag);
  co_return v == Word::integer(1);
}

namespace {

std::vector<Word> ids(const Collection& c) {
  std::vector<Word> out;
  for (const ActiveSet* s : c) out.push_back(Word::integer(s->id()));
  return out;
}

void marker(Process& self, EventKind kind, ObjOp op, std::int64_t obj, Word a, std::vector<Word> list) {
  Event e;
  e.kind = kind;
  e.op = static_cast<std::uint8_t>(op);
  e.obj = obj;
  e.a = a;
  e.list = std::move(list);
  e.ok = true;
  self.emit(std::move(e));
}

}  // namespace

Task<Membership> multi_insert(Process& self, Word item, Collection collection, FlagAccess& flags) {
  if (collection.empty()) throw ConfigError("multi insert into an empty collection");
  std::set<const ActiveSet*> uniq(collection.begin(), collection.end());
  if (uniq.size() != collection.size()) throw ConfigError("collection lists a set twice");

  marker(self, EventKind::OpInvoke, ObjOp::MasInsert, -1, item, ids(collection));
  co_await flags.clear_flag(self, item);
  Membership m{item, collection, {}};
  for (const ActiveSet* s : collection) m.slots.push_back(co_await s->insert(self, item));
  co_await flags.set_flag(self, item);
  marker(self, EventKind::OpResponse, ObjOp::MasInsert, -1, item, ids(collection));
  co_return m;
}

Task<void> multi_remove(Process& self, const Membership& m, const Collection& collection,
                        FlagAccess& flags) {
  if (collection != m.sets) throw SimFault("multi remove with a different collection than the insert");
  marker(self, EventKind::OpInvoke, ObjOp::MasRemove, -1, m.item, ids(collection));
  co_await flags.clear_flag(self, m.item);
  for (std::size_t i = 0; i < collection.size(); ++i)
    co_await collection[i]->remove(self, m.slots[i], m.item);
  marker(self, EventKind::OpResponse, ObjOp::MasRemove, -1, m.item, ids(collection));
}

Task<std::vector<Word>> get_set_filtered(Process& self, const ActiveSet& set, FlagAccess& flags) {
  marker(self, EventKind::OpInvoke, ObjOp::MasGetSet, set.id(), {}, {});
  Word head = co_await set.get_set(self);
  std::vector<Word> out;
  for (const Word& item : cons_items(self.heap(), head))
    if (co_await flags.get_flag(self, item)) out.push_back(item);
  marker(self, EventKind::OpResponse, ObjOp::MasGetSet, set.id(), {}, out);
  co_return out;
}

}  // namespace wfl
