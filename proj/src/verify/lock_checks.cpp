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
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "verify/checks.hpp"
#include "verify/ops.hpp"

namespace wfl {

using detail::kPending;
using detail::OpSpan;

namespace {

std::string desc_name(std::int64_t d) { return "attempt d" + std::to_string(d); }

// ---- regularity ----

struct Epoch {
  std::vector<std::int64_t> sets;
  std::size_t ins_inv = kPending, ins_resp = kPending, rem_inv = kPending, rem_resp = kPending;
};

bool before(std::size_t a, std::size_t b) { return a != kPending && a < b; }

// ---- attempts ----

struct Attempt {
  std::int64_t d = -1;
  ProcId proc = 0;
  std::size_t start = kPending, reveal = kPending, end = kPending;
  std::int64_t effect = -1;
  std::int64_t tag = -1;
  std::vector<std::int64_t> locks;
  std::vector<std::pair<std::size_t, Status>> changes;
  bool returned = false;
  std::int64_t contenders = 0;
};

std::map<std::int64_t, Attempt> collect_attempts(const History& h) {
  std::map<std::int64_t, Attempt> out;
  const auto& ev = h.events();
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const Event& e = ev[i];
    switch (e.kind) {
      case EventKind::AttemptStart: {
        Attempt& a = out[e.obj];
        a.d = e.obj;
        a.proc = e.proc;
        a.start = i;
        a.effect = e.a.is_int() ? e.a.as_int() : -1;
        a.tag = e.b.is_handle() ? static_cast<std::int64_t>(e.b.as_handle().index) : -1;
        for (const Word& w : e.list) a.locks.push_back(w.as_int());
        break;
      }
      case EventKind::Reveal: {
        auto it = out.find(e.obj);
        if (it != out.end() && it->second.proc == e.proc && it->second.reveal == kPending) it->second.reveal = i;
        break;
      }
      case EventKind::StatusChange: {
        auto it = out.find(e.obj);
        if (it != out.end()) it->second.changes.emplace_back(i, e.a.as_status());
        break;
      }
      case EventKind::AttemptEnd: {
        auto it = out.find(e.obj);
        if (it != out.end()) {
          it->second.end = i;
          it->second.returned = e.ok;
          it->second.contenders = e.a.is_int() ? e.a.as_int() : 0;
        }
        break;
      }
      default:
        break;
    }
  }
  return out;
}

}  // namespace

Verdict check_set_regularity(const History& h) {
  Verdict v;
  v.check = "regularity";
  const auto& ev = h.events();
  std::unordered_map<std::int64_t, std::vector<Epoch>> epochs;  // by item bits
  auto item_of = [](const Word& w) { return w.bits() * 8 + static_cast<std::int64_t>(w.tag()); };
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const Event& e = ev[i];
    if (e.kind != EventKind::OpInvoke && e.kind != EventKind::OpResponse) continue;
    auto op = static_cast<ObjOp>(e.op);
    if (op != ObjOp::MasInsert && op != ObjOp::MasRemove) continue;
    auto& list = epochs[item_of(e.a)];
    bool inv = e.kind == EventKind::OpInvoke;
    if (op == ObjOp::MasInsert && inv) {
      Epoch ep;
      for (const Word& w : e.list) ep.sets.push_back(w.as_int());
      ep.ins_inv = i;
      list.push_back(std::move(ep));
      continue;
    }
    if (list.empty()) {
      v.add("regularity/unmatched", {e.tick}, "multi-active-set operation on an item never inserted");
      continue;
    }
    Epoch& ep = list.back();
    if (op == ObjOp::MasInsert)
      ep.ins_resp = i;
    else if (inv)
      ep.rem_inv = i;
    else
      ep.rem_resp = i;
  }

  // Items per set, for the scan below.
  std::unordered_map<std::int64_t, std::vector<std::pair<std::int64_t, const Epoch*>>> on_set;
  for (const auto& [item, list] : epochs)
    for (const Epoch& ep : list)
      for (std::int64_t s : ep.sets) on_set[s].emplace_back(item, &ep);

  for (const OpSpan& g : detail::op_spans(h, ObjOp::MasGetSet)) {
    if (!g.complete()) continue;
    std::unordered_set<std::int64_t> got;
    for (const Word& w : ev[g.resp].list) got.insert(item_of(w));
    const std::string where = "getSet on set " + std::to_string(g.obj) + " by process " + std::to_string(g.proc);
    std::unordered_set<std::int64_t> allowed;
    auto it = on_set.find(g.obj);
    if (it != on_set.end()) {
      for (const auto& [item, ep] : it->second) {
        bool must_include = before(ep->ins_resp, g.inv) && (ep->rem_inv == kPending || g.resp < ep->rem_inv);
        bool must_exclude = g.resp < ep->ins_inv || before(ep->rem_resp, g.inv);
        bool has = got.count(item) > 0;
        if (must_include && !has)
          v.add("regularity/missing", detail::ticks_of(h, {g.inv, g.resp, ep->ins_resp}),
                where + " omitted an item whose multi_insert had returned and whose multi_remove had not begun");
        if (!must_exclude) allowed.insert(item);
      }
    }
    for (std::int64_t item : got)
      if (!allowed.count(item))
        v.add("regularity/extra", detail::ticks_of(h, {g.inv, g.resp}),
              where + " returned an item outside every window in which it may appear");
  }
  return v;
}

Verdict check_mutex_idempotence(const History& h) {
  Verdict v;
  v.check = "mutex";
  const auto& ev = h.events();
  auto attempts = collect_attempts(h);

  // Thunk intervals: first tagged event to the end of the first finished run.
  struct Span {
    std::size_t first = kPending, done = kPending;
    std::size_t events = 0;
  };
  std::unordered_map<std::int64_t, Span> spans;
  std::unordered_map<std::int64_t, std::size_t> lsc_ok;  // by cell
  const auto lsc = static_cast<std::uint8_t>(MemOpKind::Lsc);
  const auto run = static_cast<std::uint8_t>(ObjOp::ThunkRun);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const Event& e = ev[i];
    if (e.kind == EventKind::MemOp && e.op == lsc && e.ok) ++lsc_ok[e.obj];
    if (e.kind == EventKind::OpResponse && e.op == run && e.ok) {
      Span& s = spans[e.obj];
      if (s.done == kPending) s.done = i;
    }
    if (e.thunk < 0) continue;
    Span& s = spans[e.thunk];
    if (s.first == kPending) s.first = i;
    ++s.events;
  }

  std::map<std::int64_t, std::vector<const Attempt*>> winners_by_lock;
  for (const auto& [d, a] : attempts) {
    if (a.changes.size() > 1)
      v.add("mutex/status-twice", detail::ticks_of(h, {a.changes[0].first, a.changes[1].first}),
            desc_name(d) + " changed status more than once");
    bool won = !a.changes.empty() && a.changes.front().second == Status::Won;
    bool lost = !a.changes.empty() && a.changes.front().second == Status::Lost;
    if (a.end != kPending) {
      if (a.changes.empty())
        v.add("mutex/undecided", detail::ticks_of(h, {a.end}), desc_name(d) + " returned while still active");
      else if (a.returned != won)
        v.add("mutex/return-value", detail::ticks_of(h, {a.end}),
              desc_name(d) + " returned " + (a.returned ? "true" : "false") + " but was decided " +
                  (won ? "won" : "lost"));
    }
    auto sp = spans.find(a.tag);
    std::size_t thunk_events = sp == spans.end() ? 0 : sp->second.events;
    std::size_t effect_hits = a.effect >= 0 && lsc_ok.count(a.effect) ? lsc_ok.at(a.effect) : 0;
    if (lost) {
      if (thunk_events > 0)
        v.add("mutex/loser-ran", detail::ticks_of(h, {sp->second.first}),
              desc_name(d) + " lost but its thunk took " + std::to_string(thunk_events) + " step(s)");
      if (effect_hits > 0)
        v.add("mutex/loser-effect", detail::ticks_of(h, {a.start}), desc_name(d) + " lost but its effect was applied");
    }
    if (won) {
      if (a.end != kPending && (sp == spans.end() || sp->second.done == kPending || sp->second.done > a.end))
        v.add("mutex/unfinished", detail::ticks_of(h, {a.end}),
              desc_name(d) + " returned before any run of its thunk finished");
      if (a.effect >= 0 && sp != spans.end() && sp->second.done != kPending && effect_hits != 1)
        v.add("mutex/effect-count", detail::ticks_of(h, {sp->second.first, sp->second.done}),
              desc_name(d) + " won and its effect was applied " + std::to_string(effect_hits) + " times");
      if (sp != spans.end())
        for (std::int64_t l : a.locks) winners_by_lock[l].push_back(&a);
    }
  }

  // Winners sharing a lock must have disjoint thunk intervals.
  auto interval = [&](const Attempt* a) {
    const Span& s = spans.at(a->tag);
    return std::pair{s.first, s.done == kPending ? ev.size() : s.done};
  };
  for (auto& [lock, list] : winners_by_lock) {
    std::sort(list.begin(), list.end(),
              [&](const Attempt* x, const Attempt* y) { return interval(x).first < interval(y).first; });
    for (std::size_t k = 1; k < list.size(); ++k) {
      auto prev = interval(list[k - 1]), cur = interval(list[k]);
      if (cur.first <= prev.second)
        v.add("mutex/overlap", detail::ticks_of(h, {prev.first, prev.second, cur.first}),
              desc_name(list[k - 1]->d) + " and " + desc_name(list[k]->d) + " both won lock " + std::to_string(lock) +
                  " with overlapping thunk intervals");
    }
  }
  return v;
}

Verdict check_fixed_steps(const History& h, std::uint64_t t0, std::uint64_t t1) {
  Verdict v;
  v.check = "fixed-steps";
  const auto& ev = h.events();
  std::size_t skipped = 0;
  for (const auto& [d, a] : collect_attempts(h)) {
    if (a.end == kPending) {
      ++skipped;
      continue;
    }
    if (a.reveal == kPending) {
      v.add("fixed-steps/no-reveal", detail::ticks_of(h, {a.start, a.end}), desc_name(d) + " returned without a reveal");
      continue;
    }
    std::uint64_t pre = ev[a.reveal].step - ev[a.start].step, post = ev[a.end].step - ev[a.reveal].step;
    if (pre != t0)
      v.add("fixed-steps/pre", detail::ticks_of(h, {a.start, a.reveal}),
            desc_name(d) + " by process " + std::to_string(a.proc) + " revealed after " + std::to_string(pre) +
                " steps, expected " + std::to_string(t0));
    if (post != t1)
      v.add("fixed-steps/post", detail::ticks_of(h, {a.reveal, a.end}),
            desc_name(d) + " by process " + std::to_string(a.proc) + " returned " + std::to_string(post) +
                " steps after its reveal, expected " + std::to_string(t1));
  }
  if (skipped) v.notes.push_back(std::to_string(skipped) + " unfinished attempt(s) skipped");
  return v;
}

Verdict check_adaptive_steps(const History& h, std::uint64_t unit) {
  Verdict v;
  v.check = "adaptive-steps";
  const auto& ev = h.events();
  std::size_t skipped = 0;
  for (const auto& [d, a] : collect_attempts(h)) {
    if (a.reveal == kPending) {
      if (a.end != kPending)
        v.add("adaptive-steps/no-reveal", detail::ticks_of(h, {a.start, a.end}),
              desc_name(d) + " returned without a reveal");
      else
        ++skipped;
      continue;
    }
    std::uint64_t pre = ev[a.reveal].step - ev[a.start].step;
    if (pre == 0 || (pre & (pre - 1)) != 0)
      v.add("adaptive-steps/power-of-two", detail::ticks_of(h, {a.start, a.reveal}),
            desc_name(d) + " revealed on attempt step " + std::to_string(pre) + ", not a power of two");
    if (a.end == kPending) {
      ++skipped;
      continue;
    }
    std::uint64_t post = ev[a.end].step - ev[a.reveal].step;
    std::uint64_t want = static_cast<std::uint64_t>(a.contenders) * unit;
    if (a.contenders < 1 || post != want)
      v.add("adaptive-steps/post", detail::ticks_of(h, {a.reveal, a.end}),
            desc_name(d) + " returned " + std::to_string(post) + " steps after its reveal with " +
                std::to_string(a.contenders) + " contender(s), expected " + std::to_string(want));
  }
  if (skipped) v.notes.push_back(std::to_string(skipped) + " unfinished attempt(s) skipped");
  return v;
}

}  // namespace wfl
