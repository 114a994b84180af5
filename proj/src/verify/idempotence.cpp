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

#include <map>
#include <memory>

#include "thunk/runner.hpp"
#include "verify/checks.hpp"
#include "verify/ops.hpp"

namespace wfl {

namespace {

/// One thunk instance over fresh cells. Builds are deterministic, so every
/// explored engine gets identical cell ids and handles and can share the
/// instance the helpers reference.
struct Instance {
  const ThunkProgram* program;
  std::vector<Word> init;
  std::unique_ptr<SharedThunk> thunk;
  std::vector<CellId> cells;

  void build(Engine& e, std::uint32_t helpers) {
    cells.clear();
    for (int i = 0; i < program->params(); ++i)
      cells.push_back(e.alloc_cell(i < static_cast<int>(init.size()) ? init[i] : Word::integer(0)));
    SharedThunk st = make_shared_thunk(e, *program, cells);
    if (!thunk || thunk->context != st.context || thunk->tag != st.tag)
      thunk = std::make_unique<SharedThunk>(std::move(st));
    for (ProcId p = 0; p < helpers; ++p) e.spawn(p, run_thunk(e.proc(p), *thunk));
  }
};

struct Observed {
  std::vector<Word> final_memory;
  std::map<std::int64_t, std::size_t> lsc_ok;  // by cell
};

Observed observe(const Engine& e, const Instance& inst) {
  Observed o;
  for (CellId c : inst.cells) o.final_memory.push_back(e.memory().peek(c));
  for (const Event& ev : e.history().events())
    if (ev.kind == EventKind::MemOp && ev.op == static_cast<std::uint8_t>(MemOpKind::Lsc) && ev.ok) ++o.lsc_ok[ev.obj];
  return o;
}

std::string word_list(const std::vector<Word>& ws) {
  std::string s = "[";
  for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? " " : "") + ws[i].str();
  return s + "]";
}

}  // namespace

std::uint64_t run_tick_bound(const ThunkProgram& program) {
  std::uint64_t b = kRunOverheadTicks;
  for (const Capsule& c : program.capsules())
    for (const Instr& in : c) {
      if (in.op == ThunkOp::Lll)
        b += kMaxTicksPerSimOp;
      else if (in.op != ThunkOp::Lsc)
        b += 1;
    }
  return b;
}

Verdict check_idempotence(const ThunkProgram& program, std::uint32_t helpers, const IdempotenceOptions& opts,
                          ExploreStats* stats) {
  Verdict v;
  v.check = "idempotence";
  if (helpers == 0) throw ConfigError("idempotence check needs at least one helper");
  Instance inst{&program, opts.init, nullptr, {}};

  Engine solo({1, 0});
  inst.build(solo, 1);
  while (solo.busy(0)) solo.step(0);
  const Observed oracle = observe(solo, inst);
  const std::uint64_t bound = run_tick_bound(program);

  ExploreSetup setup;
  setup.procs = helpers;
  setup.build = [&](Engine& e) { inst.build(e, helpers); };
  ExploreChecks checks;
  checks.at_terminal = [&](const Engine& e) -> std::string {
    Observed o = observe(e, inst);
    if (o.final_memory != oracle.final_memory)
      return "final memory " + word_list(o.final_memory) + " differs from the solo run's " +
             word_list(oracle.final_memory);
    for (CellId c : inst.cells) {
      auto key = static_cast<std::int64_t>(c.index);
      std::size_t got = o.lsc_ok.count(key) ? o.lsc_ok.at(key) : 0;
      std::size_t want = oracle.lsc_ok.count(key) ? oracle.lsc_ok.at(key) : 0;
      if (got != want)
        return "cell " + std::to_string(c.index) + " was stored " + std::to_string(got) + " times, solo run stores " +
               std::to_string(want);
    }
    // Memory at the end of the first finished run, rebuilt from the history.
    const auto& ev = e.history().events();
    std::map<std::int64_t, Word> at_first;
    for (std::size_t i = 0; i < inst.cells.size(); ++i)
      at_first[inst.cells[i].index] = i < inst.init.size() ? inst.init[i] : Word::integer(0);
    at_first[inst.thunk->done.index] = Word::integer(0);
    bool finished = false;
    for (const Event& x : ev) {
      if (x.kind == EventKind::OpResponse && x.op == static_cast<std::uint8_t>(ObjOp::ThunkRun) && x.ok) {
        finished = true;
        break;
      }
      if (x.kind == EventKind::MemOp && at_first.count(x.obj)) at_first[x.obj] = x.c;
    }
    if (!finished) return "no run finished";
    if (at_first[inst.thunk->done.index] != Word::integer(1))
      return "done flag not set when the first run finished";
    for (std::size_t i = 0; i < inst.cells.size(); ++i)
      if (at_first[inst.cells[i].index] != oracle.final_memory[i])
        return "cell " + std::to_string(inst.cells[i].index) + " held " + at_first[inst.cells[i].index].str() +
               " when the first run finished, solo run leaves " + oracle.final_memory[i].str();
    // Per-run tick bound.
    for (const detail::OpSpan& s : detail::op_spans(e.history(), ObjOp::ThunkRun)) {
      if (!s.complete()) return "a helper run did not finish";
      std::uint64_t ticks = ev[s.resp].step - ev[s.inv].step;
      if (ticks > bound)
        return "a run by process " + std::to_string(s.proc) + " took " + std::to_string(ticks) +
               " ticks, more than the bound " + std::to_string(bound);
    }
    if (Verdict ops = check_sim_op_ticks(e.history()); !ops.ok()) return ops.violations[0].explanation;
    return {};
  };
  ExploreLimits limits;
  limits.max_depth = opts.step_bound;
  limits.max_states = opts.max_states;
  ExploreStats st = explore_all(setup, checks, limits);
  if (stats) *stats = st;
  if (!st.first_failure.empty()) {
    std::string sched;
    for (ProcId p : st.failing_schedule) sched += std::to_string(p);
    v.add("idempotence/differs-from-solo", {}, st.first_failure + " (schedule " + sched + ")");
  } else if (st.bounded_out) {
    v.add(kBoundedOut, {}, "interleavings exceed the step bound or state budget");
  }
  return v;
}

Verdict check_sim_op_ticks(const History& h) {
  Verdict v;
  v.check = "sim-op-ticks";
  const auto& ev = h.events();
  for (ObjOp op : {ObjOp::SimRead, ObjOp::SimWrite, ObjOp::SimCam})
    for (const detail::OpSpan& s : detail::op_spans(h, op)) {
      if (!s.complete()) continue;
      std::uint64_t ticks = ev[s.resp].step - ev[s.inv].step;
      if (ticks > kMaxTicksPerSimOp)
        v.add("sim-op-ticks/exceeded", detail::ticks_of(h, {s.inv, s.resp}),
              "a simulated operation by process " + std::to_string(s.proc) + " took " + std::to_string(ticks) +
                  " ticks, more than " + std::to_string(kMaxTicksPerSimOp));
    }
  return v;
}

ThunkFixture increment_fixture() {
  return {"increment", ThunkProgram::parse("thunk regs=2 params=1 spill=0\n"
                                           "capsule\n  lll r0 r1 @0\n  add r0 r0 1\n"
                                           "capsule\n  lsc @0 r1 r0\n"),
          {Word::integer(0)}};
}

ThunkFixture swap_fixture() {
  return {"swap", ThunkProgram::parse("thunk regs=4 params=2 spill=0\n"
                                      "capsule\n  lll r0 r1 @0\n  lll r2 r3 @1\n"
                                      "capsule\n  lsc @0 r1 r2\n  lsc @1 r3 r0\n"),
          {Word::integer(3), Word::integer(8)}};
}

ThunkFixture conditional_cam_fixture() {
  ThunkBuilder b(4, 2);
  b.sim_read(0, 0).sim_cam(1, Operand::imm(0), Operand::reg(0), 1, 2, 3);
  return {"conditional-cam", b.build(), {Word::integer(5), Word::integer(0)}};
}

ThunkFixture broken_fixture() {
  Capsule c{
      Instr{ThunkOp::Lll, 0, 1, 0, -1, {}, {}, {}},
      Instr{ThunkOp::Add, 0, -1, -1, -1, Operand::reg(0), Operand::imm(1), {}},
      Instr{ThunkOp::Lsc, -1, -1, 0, -1, Operand::reg(1), Operand::reg(0), {}},
  };
  return {"broken", ThunkProgram::make_unchecked(2, 1, 0, {c}), {Word::integer(0)}};
}

}  // namespace wfl
