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
#include <map>
#include <memory>
#include <vector>

#include "sim/engine.hpp"
#include "thunk/program.hpp"

namespace wfl {

/// Published snapshot of a thunk's progress. Immutable.
struct Context final : HeapObject {
  static constexpr HeapKind kKind = HeapKind::Context;
  Context(std::uint32_t pc_, std::uint64_t no, std::vector<Word> regs_)
      : HeapObject(kKind), pc(pc_), capsule_no(no), regs(std::move(regs_)) {}
  std::uint32_t pc;          // next capsule to run; == program size when finished
  std::uint64_t capsule_no;  // grows by one per installed context
  std::vector<Word> regs;
};

/// One thunk instance that any number of helpers may run.
struct SharedThunk {
  const ThunkProgram* program = nullptr;
  CellId context;  // holds a handle to the current Context
  CellId done;     // 0 until some run finishes, then 1
  std::vector<CellId> cells;  // params, then spill cells
  Handle tag;  // the initial context; names this instance in the history
};

/// Largest number of ticks one simulated read, write or cam costs a helper,
/// including its share of the capsule boundary: lll, guard, context update,
/// context reload and lsc.
inline constexpr std::uint64_t kMaxTicksPerSimOp = 5;
/// Ticks a run spends outside capsules: the first context load, the final
/// context update and reload, and the done write.
inline constexpr std::uint64_t kRunOverheadTicks = 4;

/// Allocates the context, done and spill cells and publishes the initial
/// context. `Owner` is an Engine (setup time) or a Process; neither costs a
/// tick.
template <class Owner>
SharedThunk make_shared_thunk(Owner& owner, const ThunkProgram& program, std::vector<CellId> params,
                              std::vector<Word> init_regs = {}) {
  if (static_cast<int>(params.size()) != program.params())
    throw ConfigError("thunk expects " + std::to_string(program.params()) + " params, got " +
                      std::to_string(params.size()));
  if (static_cast<int>(init_regs.size()) > program.regs())
    throw ConfigError("more initial register values than registers");
  init_regs.resize(static_cast<std::size_t>(program.regs()), Word::integer(0));
  SharedThunk st;
  st.program = &program;
  st.cells = std::move(params);
  for (int i = 0; i < program.spill(); ++i) st.cells.push_back(owner.alloc_cell(Word::integer(0)));
  st.tag = owner.publish(std::make_unique<Context>(0, 0, std::move(init_regs)));
  st.context = owner.alloc_cell(Word::handle(st.tag));
  st.done = owner.alloc_cell(Word::integer(0));
  return st;
}

/// Helps run the thunk until some run has finished. Every step is tagged
/// with the thunk instance. Safe to call from any number of processes.
Task<void> run_thunk(Process& self, const SharedThunk& thunk);

/// Publishes the helper's registers as the context for capsule `next_pc`
/// and tries to install it with a multiword cam against `previous`. The
/// outcome is not observable; callers reload the shared context afterwards.
Task<void> context_update(Process& self, const SharedThunk& thunk, Handle previous,
                          std::uint32_t next_pc, std::vector<Word> regs);

/// Register encoding of an lll label.
Word label_word(Label l);
Label word_label(const Word& w);

/// Ticks one helper needs to run the thunk alone from its initial context.
std::uint64_t solo_run_ticks(const ThunkProgram& program);

/// Tracks simulated writes and cams in flight per cell, so a race between
/// the two (outside the supported model) shows up as a warning event.
class RaceMonitor {
 public:
  void begin(Process& self, CellId c, bool is_cam);
  void end(CellId c, bool is_cam);
  std::uint64_t warnings() const { return warnings_; }

 private:
  std::map<std::uint32_t, std::pair<int, int>> inflight_;  // writes, cams
  std::uint64_t warnings_ = 0;
};

/// Standalone simulated register operations built from lll/lsc.
Task<Word> sim_read(Process& self, CellId c);
Task<void> sim_write(Process& self, CellId c, Word v, RaceMonitor* monitor = nullptr);
Task<void> sim_cam(Process& self, CellId c, Word old_v, Word new_v, RaceMonitor* monitor = nullptr);

}  // namespace wfl
