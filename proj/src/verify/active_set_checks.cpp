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

#include <algorithm>
#include <bit>
#include <map>
#include <string>
#include <unordered_set>

#include "verify/checks.hpp"
#include "verify/ops.hpp"

namespace wfl {

using detail::kPending;
using detail::OpSpan;

namespace {

std::int64_t item_key(const Word& w) { return w.bits() * 8 + static_cast<std::int64_t>(w.tag()); }

struct LinOp {
  ObjOp kind;
  std::int64_t item = 0;
  std::vector<std::int64_t> result;  // sorted; getSet only
  std::size_t inv, resp;
};

class WingGong {
 public:
  WingGong(std::vector<LinOp> ops, std::uint64_t max_nodes) : ops_(std::move(ops)), max_nodes_(max_nodes) {
    for (std::size_t i = 0; i < ops_.size(); ++i)
      if (ops_[i].resp != kPending) required_ |= std::uint64_t{1} << i;
  }

  enum class Result { Linearizable, NotLinearizable, BoundedOut };

  Result run() {
    std::vector<std::int64_t> state;
    bool found = search(0, state);
    if (out_of_budget_) return Result::BoundedOut;
    return found ? Result::Linearizable : Result::NotLinearizable;
  }

  /// Earliest-responding operation left unplaced on the deepest path.
  std::size_t stuck_op() const { return stuck_; }

 private:
  bool search(std::uint64_t done, std::vector<std::int64_t>& state) {
    if ((done & required_) == required_) return true;
    if (++nodes_ > max_nodes_) {
      out_of_budget_ = true;
      return false;
    }
    std::string key(reinterpret_cast<const char*>(&done), sizeof done);
    for (std::int64_t v : state) key.append(reinterpret_cast<const char*>(&v), sizeof v);
    if (!seen_.insert(std::move(key)).second) return false;

    std::size_t min_resp = kPending, min_op = 0;
    for (std::size_t i = 0; i < ops_.size(); ++i)
      if (!(done >> i & 1) && ops_[i].resp < min_resp) {
        min_resp = ops_[i].resp;
        min_op = i;
      }
    int depth = std::popcount(done);
    if (depth >= deepest_) {
      deepest_ = depth;
      stuck_ = min_op;
    }
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      if (done >> i & 1 || ops_[i].inv > min_resp) continue;
      const LinOp& op = ops_[i];
      auto it = std::lower_bound(state.begin(), state.end(), op.item);
      bool present = it != state.end() && *it == op.item;
      std::uint64_t next = done | std::uint64_t{1} << i;
      if (op.kind == ObjOp::AsInsert) {
        if (present) continue;
        it = state.insert(it, op.item);
        if (search(next, state)) return true;
        state.erase(std::lower_bound(state.begin(), state.end(), op.item));
      } else if (op.kind == ObjOp::AsRemove) {
        if (!present) continue;
        state.erase(it);
        if (search(next, state)) return true;
        state.insert(std::lower_bound(state.begin(), state.end(), op.item), op.item);
      } else {
        if (op.result != state) continue;
        if (search(next, state)) return true;
      }
      if (out_of_budget_) return false;
    }
    return false;
  }

  std::vector<LinOp> ops_;
  std::uint64_t required_ = 0;
  std::uint64_t max_nodes_;
  std::uint64_t nodes_ = 0;
  bool out_of_budget_ = false;
  std::unordered_set<std::string> seen_;
  int deepest_ = -1;
  std::size_t stuck_ = 0;
};

}  // namespace

Verdict check_linearizable_active_set(const History& h, const LinearizabilityLimits& limits) {
  Verdict v;
  v.check = "linearizable";
  const auto& ev = h.events();
  std::map<std::int64_t, std::vector<LinOp>> per_set;
  for (ObjOp kind : {ObjOp::AsInsert, ObjOp::AsRemove, ObjOp::AsGetSet}) {
    for (const OpSpan& s : detail::op_spans(h, kind)) {
      LinOp op{kind, 0, {}, s.inv, s.resp};
      if (kind == ObjOp::AsGetSet) {
        if (!s.complete()) continue;
        for (const Word& w : ev[s.resp].list) op.result.push_back(item_key(w));
        std::sort(op.result.begin(), op.result.end());
        if (std::adjacent_find(op.result.begin(), op.result.end()) != op.result.end()) {
          v.add("linearizable/duplicate", detail::ticks_of(h, {s.inv, s.resp}),
                "getSet on set " + std::to_string(s.obj) + " returned an item twice");
          continue;
        }
      } else {
        op.item = item_key(ev[s.inv].a);
      }
      per_set[s.obj].push_back(std::move(op));
    }
  }
  for (auto& [set, ops] : per_set) {
    std::sort(ops.begin(), ops.end(), [](const LinOp& a, const LinOp& b) { return a.inv < b.inv; });
    const std::string name = "set " + std::to_string(set);
    if (ops.size() > std::min<std::size_t>(limits.max_ops, 64)) {
      v.add(kBoundedOut, {}, name + ": " + std::to_string(ops.size()) + " operations exceed the search limit");
      continue;
    }
    WingGong search(ops, limits.max_nodes);
    switch (search.run()) {
      case WingGong::Result::Linearizable:
        break;
      case WingGong::Result::BoundedOut:
        v.add(kBoundedOut, {}, name + ": search budget exhausted");
        break;
      case WingGong::Result::NotLinearizable: {
        const LinOp& op = ops[search.stuck_op()];
        v.add("linearizable/no-order", detail::ticks_of(h, {op.inv, op.resp}),
              name + ": no legal sequential order; stuck before the " + to_string(op.kind) +
                  " invoked at event " + std::to_string(op.inv));
        break;
      }
    }
  }
  return v;
}

Verdict check_slot_bound(const History& h) {
  Verdict v;
  v.check = "slot-bound";
  const auto& ev = h.events();
  struct Open {
    std::size_t inv;
    std::uint64_t max_members;
  };
  std::map<std::int64_t, std::uint64_t> members;                      // per set
  std::map<std::pair<std::int64_t, ProcId>, Open> open;               // inserts in flight
  const auto ins = static_cast<std::uint8_t>(ObjOp::AsInsert);
  const auto rem = static_cast<std::uint8_t>(ObjOp::AsRemove);
  auto bump = [&](std::int64_t set) {
    for (auto& [key, o] : open)
      if (key.first == set) o.max_members = std::max(o.max_members, members[set]);
  };
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const Event& e = ev[i];
    if (e.kind == EventKind::OpInvoke && e.op == ins) {
      ++members[e.obj];
      open[{e.obj, e.proc}] = {i, 0};
      bump(e.obj);
    } else if (e.kind == EventKind::OpResponse && e.op == ins) {
      auto it = open.find({e.obj, e.proc});
      if (it == open.end()) continue;
      std::int64_t slot = e.a.as_int();
      if (it->second.max_members < static_cast<std::uint64_t>(slot) + 1)
        v.add("slot-bound/contention", detail::ticks_of(h, {it->second.inv, i}),
              "insert into set " + std::to_string(e.obj) + " by process " + std::to_string(e.proc) +
                  " landed in slot " + std::to_string(slot) + " but at most " +
                  std::to_string(it->second.max_members) + " members were present during it");
      open.erase(it);
    } else if (e.kind == EventKind::OpResponse && e.op == rem) {
      auto& m = members[e.obj];
      if (m > 0) --m;
    }
  }
  return v;
}

}  // namespace wfl
