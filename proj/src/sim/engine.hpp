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

#include <coroutine>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "sim/history.hpp"
#include "sim/memory.hpp"
#include "sim/task.hpp"
#include "sim/word.hpp"

namespace wfl {

class Engine;
class Process;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v);

/// What a suspended process wants to do on its next tick.
struct PendingStep {
  EventKind kind = EventKind::MemOp;
  MemRequest mem;
  std::uint8_t code = 0;  // local opcode for Local/ThunkStep
  std::uint64_t target = 0;  // delay target
};

template <class R>
class StepAwaiter {
 public:
  StepAwaiter(Process& p, PendingStep s) : proc_(&p), step_(s) {}
  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<> h) noexcept;
  R await_resume() const;

 private:
  Process* proc_;
  PendingStep step_;
};

/// One logical process. Algorithm code is written against this interface
/// only: every shared access is a co_await on one of the step awaiters and
/// costs exactly one tick of this process.
class Process {
 public:
  Process(Engine& e, ProcId id, std::uint64_t seed);

  ProcId id() const { return id_; }
  std::uint64_t steps() const { return steps_; }
  Engine& engine() { return *engine_; }
  SharedMemory& memory();
  Heap& heap();

  StepAwaiter<Word> read(CellId c);
  StepAwaiter<void> write(CellId c, Word v);
  StepAwaiter<bool> cas(CellId c, Word expected, Word desired);
  /// Compare-and-modify: the outcome is deliberately not observable.
  StepAwaiter<void> cam(CellId c, Word expected, Word desired);
  StepAwaiter<LabeledValue> lll(CellId c);
  StepAwaiter<void> lsc(CellId c, Label old, Word desired);
  /// Multiword compare-and-modify through a handle word.
  StepAwaiter<void> mcam(CellId c, Handle expected, Handle desired);
  /// One tick of purely local work. Recorded as a thunk step while a thunk
  /// tag is set.
  StepAwaiter<void> local(std::uint8_t code, Word a = {}, Word b = {});

  /// Consumes delay ticks until the step counter equals `target`. Throws
  /// InvariantViolation when the counter is already past it.
  Task<void> delay_until(std::uint64_t target);

  /// Allocation and publication are local and take no tick.
  CellId alloc_cell(Word init);
  Handle publish(std::unique_ptr<const HeapObject> obj);

  /// Appends a zero-width marker event stamped with this process's clock.
  void emit(Event e);

  std::mt19937_64& rng() { return rng_; }

  std::int64_t thunk_tag() const { return thunk_tag_; }
  void set_thunk_tag(std::int64_t t) { thunk_tag_ = t; }

  bool busy() const { return static_cast<bool>(resume_); }
  std::uint64_t observation_hash() const { return obs_hash_; }

 private:
  friend class Engine;
  template <class R>
  friend class StepAwaiter;

  std::uint64_t next_key() { return (static_cast<std::uint64_t>(id_) + 1) << 40 | alloc_count_++; }

  Engine* engine_;
  ProcId id_;
  std::uint64_t steps_ = 0;
  std::uint64_t alloc_count_ = 0;
  std::uint64_t obs_hash_ = 0;
  std::int64_t thunk_tag_ = -1;
  std::mt19937_64 rng_;

  PendingStep pending_;
  MemResult last_;
  std::coroutine_handle<> resume_;
  Task<void> root_;
};

struct EngineOptions {
  std::uint32_t procs = 1;
  std::uint64_t seed = 0;
};

/// 128-bit digest of everything that determines an engine's future: memory,
/// per-process observations and the observable marker sequence.
struct Fingerprint {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

struct FingerprintHash {
  std::size_t operator()(const Fingerprint& f) const { return f.lo ^ (f.hi * 0x9e3779b97f4a7c15ULL); }
};

/// Single-threaded step engine. Owns the shared memory, the heap, the
/// history and the logical processes; grants ticks one at a time.
class Engine {
 public:
  explicit Engine(EngineOptions opts);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  SharedMemory& memory() { return memory_; }
  const SharedMemory& memory() const { return memory_; }
  Heap& heap() { return heap_; }
  const Heap& heap() const { return heap_; }
  History& history() { return history_; }
  const History& history() const { return history_; }

  std::uint32_t procs() const { return static_cast<std::uint32_t>(procs_.size()); }
  Process& proc(ProcId p) { return *procs_.at(p); }
  const Process& proc(ProcId p) const { return *procs_.at(p); }
  Tick now() const { return now_; }
  std::uint64_t seed() const { return opts_.seed; }

  /// Installs a program on an idle process and runs it up to its first step.
  void spawn(ProcId p, Task<void> program);
  bool busy(ProcId p) const { return procs_.at(p)->busy(); }
  bool any_busy() const;

  /// Grants one tick to a busy process: applies its pending step, records it
  /// and resumes the process until its next step (or completion).
  void step(ProcId p);
  /// Grants one tick to an idle process (player think time).
  void idle_tick(ProcId p, std::uint8_t code = 0);

  /// Setup-time allocation (outside any process).
  CellId alloc_cell(Word init) { return memory_.allocate(init, setup_keys_++); }
  Handle publish(std::unique_ptr<const HeapObject> obj) { return heap_.publish(std::move(obj), setup_keys_++); }

  /// Canonical (allocation-order independent) encoding of a word.
  std::uint64_t canonical(const Word& w) const;
  Fingerprint fingerprint() const;

 private:
  friend class Process;

  void record_marker(Event e);
  Tick advance(Process& p);

  EngineOptions opts_;
  SharedMemory memory_;
  Heap heap_;
  History history_;
  std::vector<std::unique_ptr<Process>> procs_;
  Tick now_ = 0;
  bool started_ = false;
  std::uint64_t setup_keys_ = 0;
  std::uint64_t marker_hash_ = 0;
};

template <class R>
void StepAwaiter<R>::await_suspend(std::coroutine_handle<> h) noexcept {
  proc_->pending_ = step_;
  proc_->resume_ = h;
}

template <class R>
R StepAwaiter<R>::await_resume() const {
  const MemResult& r = proc_->last_;
  if constexpr (std::is_same_v<R, void>) {
    return;
  } else if constexpr (std::is_same_v<R, bool>) {
    return r.ok;
  } else if constexpr (std::is_same_v<R, Word>) {
    return r.value;
  } else if constexpr (std::is_same_v<R, LabeledValue>) {
    return LabeledValue{r.value, Label{step_.mem.cell, r.version}};
  }
}

}  // namespace wfl
