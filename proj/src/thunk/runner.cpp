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

#include "thunk/runner.hpp"

namespace wfl {

Word label_word(Label l) {
  if (l.version >= (1ULL << 32)) throw SimFault("label version overflow");
  return Word::integer(static_cast<std::int64_t>(static_cast<std::uint64_t>(l.cell.index) << 32 | l.version));
}

Label word_label(const Word& w) {
  if (!w.is_int()) throw SimFault("register does not hold a label: " + w.str());
  auto bits = static_cast<std::uint64_t>(w.as_int());
  return Label{CellId{static_cast<std::uint32_t>(bits >> 32)}, bits & 0xffffffffULL};
}

namespace {

Word value_of(const Operand& o, const std::vector<Word>& regs) {
  if (o.kind == Operand::Kind::Imm) return Word::integer(o.v);
  return regs.at(static_cast<std::size_t>(o.v));
}

bool truthy(const Word& w) { return w.is_int() && w.as_int() != 0; }

Word eval_local(const Instr& in, const std::vector<Word>& regs) {
  Word x = value_of(in.x, regs);
  switch (in.op) {
    case ThunkOp::Mov: return x;
    case ThunkOp::Add: return Word::integer(x.as_int() + value_of(in.y, regs).as_int());
    case ThunkOp::Sub: return Word::integer(x.as_int() - value_of(in.y, regs).as_int());
    case ThunkOp::Eq: return Word::integer(x == value_of(in.y, regs));
    case ThunkOp::Ne: return Word::integer(!(x == value_of(in.y, regs)));
    case ThunkOp::And: return Word::integer(truthy(x) && truthy(value_of(in.y, regs)));
    case ThunkOp::Or: return Word::integer(truthy(x) || truthy(value_of(in.y, regs)));
    case ThunkOp::CamGuard: {
      Word old_v = value_of(in.y, regs);
      Word new_v = value_of(in.z, regs);
      return Word::integer(!(new_v == old_v) && x == old_v);
    }
    default: break;
  }
  throw SimFault("not a local thunk instruction");
}

}  // namespace

Task<void> context_update(Process& self, const SharedThunk& thunk, Handle previous,
                          std::uint32_t next_pc, std::vector<Word> regs) {
  const auto& prev = self.heap().get<Context>(previous);
  Handle next = self.publish(std::make_unique<Context>(next_pc, prev.capsule_no + 1, std::move(regs)));
  co_await self.mcam(thunk.context, previous, next);
}

Task<void> run_thunk(Process& self, const SharedThunk& thunk) {
  const ThunkProgram& prog = *thunk.program;
  const std::int64_t saved_tag = self.thunk_tag();
  self.set_thunk_tag(thunk.tag.index);
  Event inv;
  inv.kind = EventKind::OpInvoke;
  inv.op = static_cast<std::uint8_t>(ObjOp::ThunkRun);
  inv.obj = thunk.tag.index;
  self.emit(inv);

  for (;;) {
    // run(): load whatever context is installed and continue from it.
    Handle h = (co_await self.read(thunk.context)).as_handle();
    const Context& ctx = self.heap().get<Context>(h);
    if (ctx.pc >= prog.size()) {
      co_await self.write(thunk.done, Word::integer(1));
      break;
    }
    std::vector<Word> regs = ctx.regs;
    for (const Instr& in : prog.capsules()[ctx.pc]) {
      switch (in.op) {
        case ThunkOp::Lll: {
          LabeledValue lv = co_await self.lll(thunk.cells.at(in.param));
          if (in.dst >= 0) regs[in.dst] = lv.value;
          if (in.dst2 >= 0) regs[in.dst2] = label_word(lv.label);
          break;
        }
        case ThunkOp::Lsc: {
          if (in.guard >= 0 && !truthy(regs[in.guard])) break;
          co_await self.lsc(thunk.cells.at(in.param), word_label(regs.at(in.x.v)), value_of(in.y, regs));
          break;
        }
        default: {
          Word r = eval_local(in, regs);
          co_await self.local(static_cast<std::uint8_t>(in.op), r);
          regs[in.dst] = r;
          break;
        }
      }
    }
    co_await context_update(self, thunk, h, ctx.pc + 1, std::move(regs));
  }

  Event resp;
  resp.kind = EventKind::OpResponse;
  resp.op = static_cast<std::uint8_t>(ObjOp::ThunkRun);
  resp.obj = thunk.tag.index;
  resp.ok = true;
  self.emit(resp);
  self.set_thunk_tag(saved_tag);
}

std::uint64_t solo_run_ticks(const ThunkProgram& program) {
  Engine e(EngineOptions{1, 0});
  std::vector<CellId> params;
  for (int i = 0; i < program.params(); ++i) params.push_back(e.alloc_cell(Word::integer(0)));
  SharedThunk st = make_shared_thunk(e, program, params);
  e.spawn(0, run_thunk(e.proc(0), st));
  while (e.busy(0)) e.step(0);
  return e.proc(0).steps();
}

void RaceMonitor::begin(Process& self, CellId c, bool is_cam) {
  auto& [writes, cams] = inflight_[c.index];
  if (is_cam ? writes > 0 : cams > 0) {
    Event w;
    w.kind = EventKind::Warning;
    w.op = static_cast<std::uint8_t>(WarningCode::WriteCamRace);
    w.obj = c.index;
    self.emit(w);
    ++warnings_;
  }
  (is_cam ? cams : writes)++;
}

void RaceMonitor::end(CellId c, bool is_cam) {
  auto& [writes, cams] = inflight_[c.index];
  (is_cam ? cams : writes)--;
}

namespace {
void mark(Process& self, EventKind kind, ObjOp op, CellId c, Word a = {}, Word b = {}) {
  Event e;
  e.kind = kind;
  e.op = static_cast<std::uint8_t>(op);
  e.obj = c.index;
  e.a = a;
  e.b = b;
  self.emit(e);
}
}  // namespace

Task<Word> sim_read(Process& self, CellId c) {
  mark(self, EventKind::OpInvoke, ObjOp::SimRead, c);
  LabeledValue lv = co_await self.lll(c);
  mark(self, EventKind::OpResponse, ObjOp::SimRead, c, lv.value);
  co_return lv.value;
}

Task<void> sim_write(Process& self, CellId c, Word v, RaceMonitor* monitor) {
  mark(self, EventKind::OpInvoke, ObjOp::SimWrite, c, v);
  if (monitor) monitor->begin(self, c, false);
  LabeledValue lv = co_await self.lll(c);
  co_await self.lsc(c, lv.label, v);
  if (monitor) monitor->end(c, false);
  mark(self, EventKind::OpResponse, ObjOp::SimWrite, c);
}

Task<void> sim_cam(Process& self, CellId c, Word old_v, Word new_v, RaceMonitor* monitor) {
  mark(self, EventKind::OpInvoke, ObjOp::SimCam, c, old_v, new_v);
  if (monitor) monitor->begin(self, c, true);
  LabeledValue lv = co_await self.lll(c);
  if (!(new_v == old_v) && lv.value == old_v) co_await self.lsc(c, lv.label, new_v);
  if (monitor) monitor->end(c, true);
  mark(self, EventKind::OpResponse, ObjOp::SimCam, c);
}

}  // namespace wfl
