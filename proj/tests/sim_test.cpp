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
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "sim/engine.hpp"
#include "sim/explore.hpp"
#include "sim/run.hpp"

using namespace wfl;

namespace {

std::vector<ProcId> first_ticks(const Schedule& s, std::size_t n) {
  std::vector<ProcId> out;
  for (Tick t = 0; t < n; ++t) out.push_back(s.at(t));
  return out;
}

/// Each attempt reads a shared counter, bumps it with cas, and does a few
/// local steps; good enough to exercise the kernel without the lock.
class CounterWorkload : public Workload {
 public:
  void setup(Engine& e) override { counter_ = e.alloc_cell(Word::integer(0)); }
  Task<void> attempt(Process& self, AttemptRequest) override {
    Event start;
    start.kind = EventKind::AttemptStart;
    self.emit(start);
    for (;;) {
      Word v = co_await self.read(counter_);
      co_await self.local(7);
      if (co_await self.cas(counter_, v, Word::integer(v.as_int() + 1))) break;
    }
    Event end;
    end.kind = EventKind::AttemptEnd;
    end.ok = true;
    self.emit(end);
  }
  CellId counter_;
};

}  // namespace

TEST(Schedule, RoundRobinAssignsInOrder) {
  auto s = make_schedule(ScheduleKind::RoundRobin, 0, 3, 6);
  EXPECT_EQ(first_ticks(s, 6), (std::vector<ProcId>{0, 1, 2, 0, 1, 2}));
}

TEST(Schedule, UniformRandomIsReplayable) {
  auto a = make_schedule(ScheduleKind::UniformRandom, 42, 2, 10);
  auto b = make_schedule(ScheduleKind::UniformRandom, 42, 2, 10);
  EXPECT_EQ(first_ticks(a, 10), first_ticks(b, 10));
  auto c = make_schedule(ScheduleKind::UniformRandom, 43, 2, 64);
  auto d = make_schedule(ScheduleKind::UniformRandom, 42, 2, 64);
  EXPECT_NE(first_ticks(c, 64), first_ticks(d, 64));
}

TEST(Schedule, UniformRandomCoversAllProcesses) {
  auto s = make_schedule(ScheduleKind::UniformRandom, 7, 5, 50000);
  std::map<ProcId, int> counts;
  for (Tick t = 0; t < 50000; ++t) counts[s.at(t)]++;
  ASSERT_EQ(counts.size(), 5u);
  for (auto& [p, n] : counts) EXPECT_NEAR(n, 10000, 500) << p;
}

TEST(Schedule, ScriptedReplaysScriptThenEnds) {
  auto s = make_schedule(ScheduleKind::Scripted, 0, 2, 0, {0, 0, 1});
  EXPECT_EQ(s.horizon(), 3u);
  EXPECT_EQ(first_ticks(s, 3), (std::vector<ProcId>{0, 0, 1}));
}

TEST(Schedule, ConfigurationErrors) {
  EXPECT_THROW(make_schedule(ScheduleKind::Scripted, 0, 2, 5, {}), ConfigError);
  EXPECT_THROW(make_schedule(ScheduleKind::Scripted, 0, 2, 5, {0, 2}), ConfigError);
  EXPECT_THROW(make_schedule(ScheduleKind::RoundRobin, 0, 0, 5), ConfigError);
  EXPECT_THROW(make_schedule(ScheduleKind::RoundRobin, 0, 1, 0), ConfigError);
}

namespace {
Task<void> delay_program(Process& self, std::uint64_t warmup, std::uint64_t target) {
  for (std::uint64_t i = 0; i < warmup; ++i) co_await self.local(0);
  co_await self.delay_until(target);
}

std::uint64_t count_delay_ticks(const History& h) {
  std::uint64_t n = 0;
  for (const auto& e : h.events()) n += e.kind == EventKind::Delay;
  return n;
}

void drain(Engine& e, ProcId p) {
  while (e.busy(p)) e.step(p);
}
}  // namespace

TEST(DelayUntil, AlreadyAtTargetConsumesNothing) {
  Engine e({1, 0});
  e.spawn(0, delay_program(e.proc(0), 5, 5));
  drain(e, 0);
  EXPECT_EQ(e.proc(0).steps(), 5u);
  EXPECT_EQ(count_delay_ticks(e.history()), 0u);
}

TEST(DelayUntil, ConsumesExactDifference) {
  Engine e({1, 0});
  e.spawn(0, delay_program(e.proc(0), 3, 10));
  drain(e, 0);
  EXPECT_EQ(e.proc(0).steps(), 10u);
  EXPECT_EQ(count_delay_ticks(e.history()), 7u);
}

TEST(DelayUntil, TargetBehindCounterIsInvariantViolation) {
  Engine e({1, 0});
  e.spawn(0, delay_program(e.proc(0), 6, 4));
  EXPECT_THROW(drain(e, 0), InvariantViolation);
}

TEST(RunSim, SoloAttemptCompletes) {
  CounterWorkload w;
  ImmediateRetryPolicy player([](ProcId) { return std::vector<std::uint32_t>{0}; });
  auto sched = make_schedule(ScheduleKind::RoundRobin, 0, 1, 1000);
  auto r = run_sim(sched, player, w, RunConfig{1, 9, 1});
  EXPECT_FALSE(r.truncated);
  EXPECT_EQ(r.attempts_started, 1u);
  EXPECT_EQ(r.attempts_completed, 1u);
  int starts = 0, ends = 0;
  for (auto& e : r.history.events()) {
    starts += e.kind == EventKind::AttemptStart;
    ends += e.kind == EventKind::AttemptEnd && e.ok;
  }
  EXPECT_EQ(starts, 1);
  EXPECT_EQ(ends, 1);
}

TEST(RunSim, DeterministicAndByteIdentical) {
  auto go = [] {
    CounterWorkload w;
    RandomThinkPolicy player([](ProcId) { return std::vector<std::uint32_t>{0}; }, 0, 5);
    auto sched = make_schedule(ScheduleKind::UniformRandom, 1234, 3, 5000);
    auto r = run_sim(sched, player, w, RunConfig{3, 77, 40});
    std::ostringstream text, bin;
    r.history.write_text(text);
    r.history.write_binary(bin);
    return std::make_pair(text.str(), bin.str());
  };
  auto a = go();
  auto b = go();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(RunSim, StepAccountingMatchesCounters) {
  CounterWorkload w;
  RandomThinkPolicy player([](ProcId) { return std::vector<std::uint32_t>{0}; }, 0, 3);
  auto sched = make_schedule(ScheduleKind::UniformRandom, 5, 4, 20000);
  auto r = run_sim(sched, player, w, RunConfig{4, 5, 100});
  std::vector<std::uint64_t> counted(4, 0);
  for (auto& e : r.history.events())
    if (is_step(e.kind)) counted[e.proc]++;
  EXPECT_EQ(counted, r.final_steps);
  EXPECT_EQ(check_well_formed(r.history), "");
  EXPECT_EQ(r.attempts_completed, 100u);
}

TEST(RunSim, HorizonExhaustionIsReportedAsTruncated) {
  CounterWorkload w;
  ImmediateRetryPolicy player([](ProcId) { return std::vector<std::uint32_t>{0}; });
  auto sched = make_schedule(ScheduleKind::RoundRobin, 0, 2, 3);
  auto r = run_sim(sched, player, w, RunConfig{2, 0, 10});
  EXPECT_TRUE(r.truncated);
  EXPECT_TRUE(r.history.truncated());
}

TEST(RunSim, PlayerOnlySeesStrictPrefix) {
  struct Spy : PlayerPolicy {
    std::optional<AttemptRequest> decide(ProcId, std::span<const Event> prefix,
                                         std::mt19937_64&) override {
      seen.push_back(prefix.empty() ? -1 : static_cast<std::int64_t>(prefix.back().tick));
      sizes.push_back(prefix.size());
      return AttemptRequest{{0}};
    }
    std::vector<std::int64_t> seen;
    std::vector<std::size_t> sizes;
  };
  CounterWorkload w;
  Spy spy;
  auto sched = make_schedule(ScheduleKind::RoundRobin, 0, 2, 400);
  auto r = run_sim(sched, spy, w, RunConfig{2, 0, 20});
  // The spy always starts an attempt, so each decision is followed by one
  // idle tick with op 1. Idle ticks after the budget runs out (op 0) are not
  // decisions. The tick must be later than anything the player was shown,
  // and the player must have been shown everything before it.
  std::size_t k = 0;
  const auto& ev = r.history.events();
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].kind != EventKind::Local || ev[i].op != 1) continue;
    ASSERT_LT(k, spy.seen.size());
    EXPECT_GT(static_cast<std::int64_t>(ev[i].tick), spy.seen[k]);
    EXPECT_EQ(spy.sizes[k], i);
    ++k;
  }
  EXPECT_EQ(k, spy.seen.size());
}

TEST(RunSim, ScriptedPlayerWaitsThenStarts) {
  CounterWorkload w;
  ScriptedPolicy player({{{2, {0}}}, {}});
  auto sched = make_schedule(ScheduleKind::RoundRobin, 0, 2, 100);
  auto r = run_sim(sched, player, w, RunConfig{2, 0, 0});
  EXPECT_EQ(r.attempts_started, 1u);
  // Process 0 idles twice (ticks 0 and 2), starts on tick 4.
  const Event* start = nullptr;
  for (auto& e : r.history.events())
    if (e.kind == EventKind::AttemptStart) start = &e;
  ASSERT_NE(start, nullptr);
  EXPECT_EQ(start->tick, 4u);
  EXPECT_EQ(start->step, 3u);
}

TEST(History, TextAndBinaryRoundTripRandomHistories) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    History h;
    h.meta()["seed"] = std::to_string(trial);
    h.meta()["note"] = "a b=c";
    h.set_truncated(trial % 2);
    std::uniform_int_distribution<int> kind(0, 11), tag(0, 4), len(0, 3);
    for (int i = 0; i < 50; ++i) {
      Event e;
      e.tick = static_cast<Tick>(i);
      e.proc = rng() % 4;
      e.step = rng() % 100;
      e.kind = static_cast<EventKind>(kind(rng));
      e.op = e.kind == EventKind::MemOp ? 1 + rng() % 7 : (e.kind == EventKind::OpInvoke || e.kind == EventKind::OpResponse) ? rng() % 11 : rng() % 5;
      e.thunk = static_cast<std::int64_t>(rng() % 5) - 1;
      e.obj = static_cast<std::int64_t>(rng() % 9) - 1;
      auto w = [&] { return Word::raw(static_cast<Word::Tag>(tag(rng)), static_cast<std::int64_t>(rng() % 1000) - 500); };
      e.a = w();
      e.b = w();
      e.c = w();
      e.label = rng() % 10;
      e.ok = rng() % 2;
      for (int k = len(rng); k > 0; --k) e.list.push_back(w());
      // Canonical forms for tags without payload.
      auto canon = [](Word& x) {
        if (x.is_null()) x = Word::null();
        if (x.is_tbd()) x = Word::tbd();
      };
      for (Word* x : {&e.a, &e.b, &e.c}) canon(*x);
      for (auto& x : e.list) canon(x);
      h.append(e);
    }
    std::stringstream text, bin;
    h.write_text(text);
    h.write_binary(bin);
    EXPECT_EQ(History::read_any(text), h);
    EXPECT_EQ(History::read_any(bin), h);
  }
}

TEST(History, RejectsWrongSchema) {
  std::istringstream bad("wflock-history/9\nevents 0\n");
  EXPECT_THROW(History::read_any(bad), HistoryFormatError);
  std::istringstream short_count("wflock-history/1\nevents 2\n0 0 1 local 0 -1 -1 n n n 0 1 0\n");
  EXPECT_THROW(History::read_any(short_count), HistoryFormatError);
}

TEST(Explore, CountsAllInterleavingsOfIndependentCounters) {
  // Two processes, each doing two local steps on private state: the state
  // graph is a 3x3 grid, so 9 distinct states and one terminal.
  ExploreSetup setup;
  setup.procs = 2;
  setup.build = [](Engine& e) {
    for (ProcId p = 0; p < 2; ++p)
      e.spawn(p, [](Process& self) -> Task<void> {
        co_await self.local(0);
        co_await self.local(0);
      }(e.proc(p)));
  };
  auto stats = explore_all(setup, {});
  EXPECT_EQ(stats.states, 9u);
  EXPECT_EQ(stats.terminals, 1u);
  EXPECT_TRUE(stats.first_failure.empty());
}
