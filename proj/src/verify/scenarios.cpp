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

#include "verify/scenarios.hpp"

#include <optional>

#include "aset/multi_active_set.hpp"
#include "thunk/runner.hpp"

namespace wfl {

namespace {

void round_robin(Engine& e) {
  while (e.any_busy())
    for (ProcId p = 0; p < e.procs(); ++p)
      if (e.busy(p)) e.step(p);
}

Task<void> script(Process& self, const ActiveSet* s, std::string ops) {
  std::uint32_t slot = 0;
  Word item;
  std::int64_t k = 0;
  for (char c : ops) {
    if (c == 'i') {
      item = Word::integer(static_cast<std::int64_t>(self.id()) * 100 + k++);
      slot = co_await s->insert(self, item);
    } else if (c == 'r') {
      co_await s->remove(self, slot, item);
    } else {
      co_await s->get_set(self);
    }
  }
}

Task<void> minsert(Process& self, Word item, Collection c, FlagAccess* flags) {
  co_await multi_insert(self, item, std::move(c), *flags);
}

Task<void> filtered(Process& self, const ActiveSet* s, FlagAccess* flags, std::vector<Word>* out) {
  *out = co_await get_set_filtered(self, *s, *flags);
}

std::int64_t max_slot(const History& h) {
  std::int64_t m = -1;
  for (const Event& e : h.events())
    if (e.kind == EventKind::OpResponse && e.op == static_cast<std::uint8_t>(ObjOp::AsInsert))
      m = std::max(m, e.a.as_int());
  return m;
}

/// n processes insert at once; process k fails k owner cas steps before
/// winning slot k, then everyone finishes round robin.
Scenario staircase(std::uint32_t n) {
  Scenario sc;
  sc.name = std::to_string(n) + "-way race to slot " + std::to_string(n - 1);
  Engine e({n, 0});
  ActiveSet s(e, n + 1, 0);
  for (ProcId p = 0; p < n; ++p) e.spawn(p, script(e.proc(p), &s, "ir"));
  for (ProcId p = 0; p < n; ++p)
    for (ProcId k = 0; k <= p; ++k) e.step(p);
  round_robin(e);
  sc.history = std::move(e.history());
  sc.reached = max_slot(sc.history) == static_cast<std::int64_t>(n) - 1;
  sc.detail = "highest slot " + std::to_string(max_slot(sc.history));
  return sc;
}

}  // namespace

Scenario disjoint_get_sets_scenario() {
  Scenario sc;
  sc.name = "overlapping getSets return {a} and {b}";
  Engine e({4, 0});
  BoolFlag flags;
  ActiveSet s(e, 4, 1);
  Word a = make_flag_item(e, 1), b = make_flag_item(e, 2);
  std::vector<Word> g2, g3;
  e.spawn(0, minsert(e.proc(0), a, {&s}, &flags));
  e.spawn(1, minsert(e.proc(1), b, {&s}, &flags));
  e.spawn(2, filtered(e.proc(2), &s, &flags, &g2));
  e.spawn(3, filtered(e.proc(3), &s, &flags, &g3));
  // a: clearFlag, owner cas, 8 climb steps. b: clearFlag, 2 owner cas, 16
  // climb steps. Both stop just before setFlag.
  for (int k = 0; k < 10; ++k) e.step(0);
  for (int k = 0; k < 19; ++k) e.step(1);
  e.step(2);  // both getSets read the same head
  e.step(3);
  auto order = cons_items(e.heap(), e.memory().peek(s.set_cell(0)));
  if (order.size() != 2) {
    sc.detail = "set did not hold both items before the flags were set";
    round_robin(e);
    sc.history = std::move(e.history());
    return sc;
  }
  Word x = order[0], y = order[1];
  ProcId setter_x = x == a ? 0 : 1, setter_y = 1 - setter_x;
  e.step(2);         // P2 reads x: unflagged
  e.step(setter_x);  // x flagged
  e.step(3);         // P3 reads x: flagged
  e.step(3);         // P3 reads y: unflagged
  e.step(setter_y);  // y flagged
  e.step(2);         // P2 reads y: flagged
  round_robin(e);
  sc.reached = g2 == std::vector<Word>{y} && g3 == std::vector<Word>{x};
  sc.detail = "getSets returned " + std::to_string(g2.size()) + " and " + std::to_string(g3.size()) + " item(s)";
  sc.history = std::move(e.history());
  return sc;
}

std::vector<Scenario> slot_race_scenarios() {
  std::vector<Scenario> out{staircase(3), staircase(4)};

  Scenario churn;
  churn.name = "insert/remove churn, 4 processes";
  Engine e({4, 0});
  ActiveSet s(e, 4, 0);
  for (ProcId p = 0; p < 4; ++p) e.spawn(p, script(e.proc(p), &s, "irirg"));
  round_robin(e);
  churn.history = std::move(e.history());
  churn.reached = max_slot(churn.history) >= 2;
  churn.detail = "highest slot " + std::to_string(max_slot(churn.history));
  out.push_back(std::move(churn));
  return out;
}

SweepResult sweep_active_set(const std::vector<std::string>& programs, std::uint32_t capacity,
                             const ExploreLimits& limits) {
  SweepResult r;
  r.verdict.check = "linearizable";
  // Builds are deterministic, so one instance names the cells of every
  // explored engine.
  std::optional<ActiveSet> kept;
  ExploreSetup setup;
  setup.procs = static_cast<std::uint32_t>(programs.size());
  setup.build = [&](Engine& e) {
    ActiveSet probe(e, capacity, 0);
    if (!kept) kept = probe;
    for (ProcId p = 0; p < programs.size(); ++p) e.spawn(p, script(e.proc(p), &*kept, programs[p]));
  };
  ExploreChecks checks;
  checks.at_terminal = [&](const Engine& e) -> std::string {
    ++r.histories;
    Verdict v = check_linearizable_active_set(e.history());
    if (!v.ok()) {
      r.verdict = v;
      return v.summary();
    }
    return {};
  };
  r.stats = explore_all(setup, checks, limits);
  if (r.verdict.ok() && r.stats.bounded_out) r.verdict.add(kBoundedOut, {}, "interleaving space exceeds the limits");
  return r;
}

namespace {

Task<void> sim_ops(Process& self, CellId a, CellId b, ProcId role) {
  if (role == 0) {
    co_await sim_write(self, a, Word::integer(1));
    co_await sim_read(self, b);
  } else if (role == 1) {
    co_await sim_cam(self, b, Word::integer(0), Word::integer(2));
    co_await sim_read(self, a);
  } else {
    co_await sim_read(self, a);
    co_await sim_read(self, b);
  }
}

}  // namespace

SweepResult sweep_sim_ops(std::uint32_t procs, const ExploreLimits& limits) {
  if (procs < 1 || procs > 3) throw ConfigError("simulated-op sweep takes 1 to 3 processes");
  SweepResult r;
  r.verdict.check = "sim-op-ticks";
  CellId a, b;
  ExploreSetup setup;
  setup.procs = procs;
  setup.build = [&](Engine& e) {
    a = e.alloc_cell(Word::integer(0));
    b = e.alloc_cell(Word::integer(0));
    for (ProcId p = 0; p < procs; ++p) e.spawn(p, sim_ops(e.proc(p), a, b, p));
  };
  ExploreChecks checks;
  checks.at_terminal = [&](const Engine& e) -> std::string {
    ++r.histories;
    Verdict v = check_sim_op_ticks(e.history());
    if (v.ok() && procs >= 2 && (e.memory().peek(a) != Word::integer(1) || e.memory().peek(b) != Word::integer(2)))
      v.add("sim-op/final-value", {}, "write or cam lost: a=" + e.memory().peek(a).str() + " b=" + e.memory().peek(b).str());
    if (!v.ok()) {
      r.verdict = v;
      return v.summary();
    }
    return {};
  };
  r.stats = explore_all(setup, checks, limits);
  if (r.verdict.ok() && r.stats.bounded_out) r.verdict.add(kBoundedOut, {}, "interleaving space exceeds the limits");
  return r;
}

std::vector<std::vector<std::string>> sweep_workloads(std::uint32_t procs) {
  if (procs == 2) return {{"ir", "ir"}, {"ir", "gg"}, {"ig", "ir"}, {"irg", "g"}};
  if (procs == 3) return {{"ir", "ir", "g"}, {"ir", "ig", "g"}, {"i", "ir", "gg"}};
  throw ConfigError("sweeps are defined for 2 and 3 processes");
}

}  // namespace wfl
