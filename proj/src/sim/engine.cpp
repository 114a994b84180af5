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

#include "sim/engine.hpp"

#include <stdexcept>
#include <string>

namespace wfl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return splitmix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

Process::Process(Engine& e, ProcId id, std::uint64_t seed)
    : engine_(&e), id_(id), rng_(splitmix64(seed ^ splitmix64(0x5eed0000ULL + id))) {}

SharedMemory& Process::memory() { return engine_->memory(); }
Heap& Process::heap() { return engine_->heap(); }

namespace {
PendingStep mem_step(MemOpKind op, CellId c, Word a = {}, Word b = {}, Label l = {}) {
  PendingStep s;
  s.kind = EventKind::MemOp;
  s.mem = MemRequest{op, c, a, b, l};
  return s;
}
}  // namespace

StepAwaiter<Word> Process::read(CellId c) { return {*this, mem_step(MemOpKind::Read, c)}; }
StepAwaiter<void> Process::write(CellId c, Word v) { return {*this, mem_step(MemOpKind::Write, c, v)}; }
StepAwaiter<bool> Process::cas(CellId c, Word expected, Word desired) {
  return {*this, mem_step(MemOpKind::Cas, c, expected, desired)};
}
StepAwaiter<void> Process::cam(CellId c, Word expected, Word desired) {
  return {*this, mem_step(MemOpKind::Cam, c, expected, desired)};
}
StepAwaiter<LabeledValue> Process::lll(CellId c) { return {*this, mem_step(MemOpKind::Lll, c)}; }
StepAwaiter<void> Process::lsc(CellId c, Label old, Word desired) {
  return {*this, mem_step(MemOpKind::Lsc, c, Word::integer(static_cast<std::int64_t>(old.version)),
                          desired, old)};
}
StepAwaiter<void> Process::mcam(CellId c, Handle expected, Handle desired) {
  return {*this, mem_step(MemOpKind::MCam, c, Word::handle(expected), Word::handle(desired))};
}

StepAwaiter<void> Process::local(std::uint8_t code, Word a, Word b) {
  PendingStep s;
  s.kind = thunk_tag_ >= 0 ? EventKind::ThunkStep : EventKind::Local;
  s.code = code;
  s.mem.a = a;
  s.mem.b = b;
  return {*this, s};
}

Task<void> Process::delay_until(std::uint64_t target) {
  if (target < steps_)
    throw InvariantViolation("delay target " + std::to_string(target) + " already passed (process " +
                             std::to_string(id_) + " is at step " + std::to_string(steps_) + ")");
  while (steps_ < target) {
    PendingStep s;
    s.kind = EventKind::Delay;
    s.target = target;
    co_await StepAwaiter<void>{*this, s};
  }
}

CellId Process::alloc_cell(Word init) { return engine_->memory_.allocate(init, next_key()); }

Handle Process::publish(std::unique_ptr<const HeapObject> obj) {
  return engine_->heap_.publish(std::move(obj), next_key());
}

void Process::emit(Event e) {
  e.proc = id_;
  e.step = steps_;
  e.thunk = thunk_tag_;
  engine_->record_marker(std::move(e));
}

Engine::Engine(EngineOptions opts) : opts_(opts) {
  if (opts_.procs == 0) throw ConfigError("engine needs at least one process");
  procs_.reserve(opts_.procs);
  for (ProcId p = 0; p < opts_.procs; ++p)
    procs_.push_back(std::make_unique<Process>(*this, p, opts_.seed));
}

Engine::~Engine() {
  // Coroutine frames reference processes; drop them first.
  for (auto& p : procs_) p->root_ = Task<void>{};
}

bool Engine::any_busy() const {
  for (const auto& p : procs_)
    if (p->busy()) return true;
  return false;
}

void Engine::spawn(ProcId id, Task<void> program) {
  Process& p = *procs_.at(id);
  if (p.busy() || !p.root_.done())
    throw std::logic_error("spawn on busy process " + std::to_string(id));
  p.root_ = std::move(program);
  p.root_.handle().resume();
  if (p.root_.done()) {
    auto finished = std::move(p.root_);
    finished.rethrow_if_failed();
  }
}

Tick Engine::advance(Process& p) {
  now_ = started_ ? now_ + 1 : 0;
  started_ = true;
  ++p.steps_;
  return now_;
}

void Engine::step(ProcId id) {
  Process& p = *procs_.at(id);
  if (!p.resume_) throw std::logic_error("step on idle process " + std::to_string(id));
  const PendingStep& s = p.pending_;

  Event e;
  e.tick = advance(p);
  e.proc = id;
  e.step = p.steps_;
  e.kind = s.kind;
  e.thunk = p.thunk_tag_;

  MemResult res;
  res.ok = true;
  switch (s.kind) {
    case EventKind::MemOp:
      res = memory_.apply(s.mem);
      e.op = static_cast<std::uint8_t>(s.mem.op);
      e.obj = s.mem.cell.index;
      e.a = s.mem.a;
      e.b = s.mem.b;
      e.c = res.value;
      e.label = res.version;
      e.ok = res.ok;
      break;
    case EventKind::Local:
    case EventKind::ThunkStep:
      e.op = s.code;
      e.a = s.mem.a;
      e.b = s.mem.b;
      e.ok = true;
      break;
    case EventKind::Delay:
      e.a = Word::integer(static_cast<std::int64_t>(s.target));
      e.ok = true;
      break;
    default:
      throw std::logic_error("pending step has a marker kind");
  }
  p.last_ = res;
  p.obs_hash_ = hash_combine(hash_combine(hash_combine(p.obs_hash_, canonical(res.value)), res.ok),
                             res.version);
  history_.append(std::move(e));

  auto h = std::exchange(p.resume_, {});
  h.resume();
  if (!p.resume_ && p.root_.handle()) {
    auto finished = std::move(p.root_);
    finished.rethrow_if_failed();
  }
}

void Engine::idle_tick(ProcId id, std::uint8_t code) {
  Process& p = *procs_.at(id);
  if (p.busy()) throw std::logic_error("idle tick on busy process " + std::to_string(id));
  Event e;
  e.tick = advance(p);
  e.proc = id;
  e.step = p.steps_;
  e.kind = EventKind::Local;
  e.op = code;
  e.ok = true;
  history_.append(std::move(e));
}

void Engine::record_marker(Event e) {
  e.tick = now_;
  std::uint64_t h = hash_combine(marker_hash_, static_cast<std::uint64_t>(e.kind));
  h = hash_combine(h, e.op);
  h = hash_combine(h, e.proc);
  bool obj_is_handle = e.kind == EventKind::AttemptStart || e.kind == EventKind::Reveal ||
                       e.kind == EventKind::PriorityReveal || e.kind == EventKind::StatusChange ||
                       e.kind == EventKind::AttemptEnd ||
                       ((e.kind == EventKind::OpInvoke || e.kind == EventKind::OpResponse) &&
                        e.op == static_cast<std::uint8_t>(ObjOp::ThunkRun));
  if (obj_is_handle && e.obj >= 0)
    h = hash_combine(h, canonical(Word::handle(Handle{static_cast<std::uint32_t>(e.obj)})));
  else
    h = hash_combine(h, static_cast<std::uint64_t>(e.obj));
  h = hash_combine(h, canonical(e.a));
  h = hash_combine(h, canonical(e.b));
  h = hash_combine(h, e.ok);
  for (const auto& w : e.list) h = hash_combine(h, canonical(w));
  marker_hash_ = h;
  history_.append(std::move(e));
}

std::uint64_t Engine::canonical(const Word& w) const {
  auto tag = static_cast<std::uint64_t>(w.tag());
  if (w.is_handle()) return hash_combine(tag, heap_.key(w.as_handle()));
  return hash_combine(tag, static_cast<std::uint64_t>(w.bits()));
}

Fingerprint Engine::fingerprint() const {
  std::uint64_t a = 0x243f6a8885a308d3ULL;
  std::uint64_t b = 0x13198a2e03707344ULL;
  auto mix = [&](std::uint64_t v) {
    a = hash_combine(a, v);
    b = hash_combine(b ^ 0xa4093822299f31d0ULL, v * 0x9e3779b97f4a7c15ULL + 1);
  };
  for (std::uint32_t i = 0; i < memory_.size(); ++i) {
    CellId c{i};
    mix(memory_.key(c));
    mix(canonical(memory_.peek(c)));
    mix(memory_.version(c));
  }
  for (const auto& p : procs_) {
    mix(p->obs_hash_);
    mix(p->steps_);
    mix(p->busy() ? 1 : 0);
  }
  mix(marker_hash_);
  return Fingerprint{a, b};
}

}  // namespace wfl
