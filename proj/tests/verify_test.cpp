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

#include <sstream>

#include <gtest/gtest.h>

#include "aset/active_set.hpp"
#include "lock/calibrate.hpp"
#include "verify/checks.hpp"
#include "verify/scenarios.hpp"

using namespace wfl;

namespace {

/// Hand-written histories for negative fixtures.
class Forge {
 public:
  Forge& invoke(ProcId p, ObjOp op, std::int64_t obj, Word a = {}, Word b = {}, std::vector<Word> list = {}) {
    return push(p, EventKind::OpInvoke, static_cast<std::uint8_t>(op), obj, a, b, std::move(list));
  }
  Forge& respond(ProcId p, ObjOp op, std::int64_t obj, Word a = {}, Word b = {}, std::vector<Word> list = {},
                 bool ok = true) {
    return push(p, EventKind::OpResponse, static_cast<std::uint8_t>(op), obj, a, b, std::move(list), ok);
  }
  Forge& marker(ProcId p, EventKind k, std::int64_t obj, Word a = {}, Word b = {}, std::vector<Word> list = {},
                bool ok = true) {
    return push(p, k, 0, obj, a, b, std::move(list), ok);
  }
  /// A process step; `thunk` tags it, `steps` advances the step counter.
  Forge& step(ProcId p, std::int64_t thunk = -1, std::uint64_t steps = 1) {
    for (std::uint64_t i = 0; i < steps; ++i) {
      ++steps_[p];
      push(p, thunk >= 0 ? EventKind::ThunkStep : EventKind::Local, 0, -1, {}, {}, {});
      history_.events().back().thunk = thunk;
      ++tick_;
    }
    return *this;
  }
  Forge& lsc_ok(ProcId p, std::int64_t cell, std::int64_t thunk) {
    ++steps_[p];
    push(p, EventKind::MemOp, static_cast<std::uint8_t>(MemOpKind::Lsc), cell, {}, {}, {}, true);
    history_.events().back().thunk = thunk;
    ++tick_;
    return *this;
  }
  History done() { return history_; }

 private:
  Forge& push(ProcId p, EventKind k, std::uint8_t op, std::int64_t obj, Word a, Word b, std::vector<Word> list,
              bool ok = true) {
    Event e;
    e.tick = tick_;
    e.proc = p;
    e.step = steps_[p];
    e.kind = k;
    e.op = op;
    e.obj = obj;
    e.a = a;
    e.b = b;
    e.list = std::move(list);
    e.ok = ok;
    history_.append(std::move(e));
    return *this;
  }

  History history_;
  Tick tick_ = 0;
  std::map<ProcId, std::uint64_t> steps_;
};

Word I(std::int64_t v) { return Word::integer(v); }
Word H(std::uint32_t v) { return Word::handle(Handle{v}); }
Word S(Status s) { return Word::status(s); }

bool has_rule(const Verdict& v, const std::string& rule) {
  for (const auto& x : v.violations)
    if (x.rule == rule) return true;
  return false;
}

void drain(Engine& e, ProcId p) {
  while (e.busy(p)) e.step(p);
}

struct PhilosopherRun {
  LockConfig config;
  std::vector<History> histories;
};

PhilosopherRun philosophers_runs(Variant v, std::uint64_t seeds, std::uint64_t attempts) {
  Calibration cal = calibrate(2, 2, v);
  LockConfig cfg;
  cfg.procs = 5;
  cfg.kappa = 2;
  cfg.max_locks = 2;
  cfg.c = cal.c;
  cfg.c_prime = cal.c_prime;
  LockWorkload w(philosophers(5), cfg, v);
  PhilosopherRun out{w.config(), {}};
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    RandomThinkPolicy player(w.chooser(), 0, 16);
    RunConfig rc;
    rc.procs = 5;
    rc.seed = seed;
    rc.max_attempts = attempts;
    RunResult r = run_sim(make_schedule(ScheduleKind::UniformRandom, seed, 5, 1ULL << 32), player, w, rc);
    out.histories.push_back(std::move(r.history));
  }
  return out;
}

}  // namespace

// ---- linearizability ----

TEST(Linearizable, SequentialInsertThenGetSet) {
  Engine e({1, 0});
  ActiveSet s(e, 2, 0);
  e.spawn(0, [](Process& self, const ActiveSet& s) -> Task<void> {
    co_await s.insert(self, Word::integer(1));
    co_await s.get_set(self);
  }(e.proc(0), s));
  drain(e, 0);
  EXPECT_TRUE(check_linearizable_active_set(e.history()).ok());
}

TEST(Linearizable, GetSetSeeingItemBeforeInsertIsRejected) {
  History h = Forge()
                  .invoke(0, ObjOp::AsGetSet, 0)
                  .respond(0, ObjOp::AsGetSet, 0, {}, {}, {I(7)})
                  .invoke(1, ObjOp::AsInsert, 0, I(7))
                  .respond(1, ObjOp::AsInsert, 0, I(0), I(7))
                  .done();
  Verdict v = check_linearizable_active_set(h);
  EXPECT_FALSE(v.ok());
  EXPECT_TRUE(has_rule(v, "linearizable/no-order"));
}

TEST(Linearizable, OverlappingOpsMayOrderEitherWay) {
  History h = Forge()
                  .invoke(1, ObjOp::AsInsert, 0, I(7))
                  .invoke(0, ObjOp::AsGetSet, 0)
                  .respond(0, ObjOp::AsGetSet, 0, {}, {}, {I(7)})
                  .invoke(2, ObjOp::AsGetSet, 0)
                  .respond(2, ObjOp::AsGetSet, 0, {}, {}, {})
                  .done();
  // The second getSet misses an item the first already saw.
  EXPECT_FALSE(check_linearizable_active_set(h).ok());
  History ok = Forge()
                   .invoke(1, ObjOp::AsInsert, 0, I(7))
                   .invoke(0, ObjOp::AsGetSet, 0)
                   .respond(0, ObjOp::AsGetSet, 0, {}, {}, {})
                   .invoke(2, ObjOp::AsGetSet, 0)
                   .respond(2, ObjOp::AsGetSet, 0, {}, {}, {I(7)})
                   .done();
  EXPECT_TRUE(check_linearizable_active_set(ok).ok());
}

TEST(Linearizable, OversizedHistoryIsBoundedOutNotPassed) {
  Forge f;
  for (int k = 0; k < 40; ++k) {
    f.invoke(0, ObjOp::AsInsert, 0, I(k)).respond(0, ObjOp::AsInsert, 0, I(0), I(k));
    f.invoke(0, ObjOp::AsRemove, 0, I(k), I(0)).respond(0, ObjOp::AsRemove, 0, {}, I(0));
  }
  Verdict v = check_linearizable_active_set(f.done());
  EXPECT_FALSE(v.ok());
  EXPECT_TRUE(has_rule(v, kBoundedOut));
}

TEST(Linearizable, ExhaustiveTwoProcessSweep) {
  for (const auto& progs : sweep_workloads(2)) {
    SweepResult r = sweep_active_set(progs, 2);
    EXPECT_TRUE(r.verdict.ok()) << r.verdict.summary();
    EXPECT_GT(r.histories, 1u);
  }
}

// ---- set regularity ----

TEST(Regularity, GetSetBeforeInsertContainingItemIsRejected) {
  History h = Forge()
                  .invoke(2, ObjOp::MasGetSet, 0)
                  .respond(2, ObjOp::MasGetSet, 0, {}, {}, {H(5)})
                  .invoke(0, ObjOp::MasInsert, -1, H(5), {}, {I(0)})
                  .respond(0, ObjOp::MasInsert, -1, H(5), {}, {I(0)})
                  .done();
  EXPECT_TRUE(has_rule(check_set_regularity(h), "regularity/extra"));
}

TEST(Regularity, GetSetAfterInsertMissingItemIsRejected) {
  History h = Forge()
                  .invoke(0, ObjOp::MasInsert, -1, H(5), {}, {I(0), I(1)})
                  .respond(0, ObjOp::MasInsert, -1, H(5), {}, {I(0), I(1)})
                  .invoke(2, ObjOp::MasGetSet, 1)
                  .respond(2, ObjOp::MasGetSet, 1, {}, {}, {})
                  .done();
  EXPECT_TRUE(has_rule(check_set_regularity(h), "regularity/missing"));
}

TEST(Regularity, GetSetAfterRemoveContainingItemIsRejected) {
  History h = Forge()
                  .invoke(0, ObjOp::MasInsert, -1, H(5), {}, {I(0)})
                  .respond(0, ObjOp::MasInsert, -1, H(5), {}, {I(0)})
                  .invoke(0, ObjOp::MasRemove, -1, H(5), {}, {I(0)})
                  .respond(0, ObjOp::MasRemove, -1, H(5), {}, {I(0)})
                  .invoke(2, ObjOp::MasGetSet, 0)
                  .respond(2, ObjOp::MasGetSet, 0, {}, {}, {H(5)})
                  .done();
  EXPECT_TRUE(has_rule(check_set_regularity(h), "regularity/extra"));
}

TEST(Regularity, OverlappingGetSetsMayDisagree) {
  Scenario sc = disjoint_get_sets_scenario();
  EXPECT_TRUE(sc.reached) << sc.detail;
  Verdict v = check_set_regularity(sc.history);
  EXPECT_TRUE(v.ok()) << v.summary();
}

// ---- mutual exclusion with idempotence ----

namespace {

/// Two attempts on lock 0 that both win; `overlap` interleaves their thunks.
History two_winners(bool overlap) {
  Forge f;
  f.marker(0, EventKind::AttemptStart, 10, I(100), H(20), {I(0)});
  f.marker(1, EventKind::AttemptStart, 11, I(101), H(21), {I(0)});
  f.marker(0, EventKind::StatusChange, 10, S(Status::Won));
  f.step(0, 20).lsc_ok(0, 100, 20);
  if (!overlap) f.respond(0, ObjOp::ThunkRun, 20);
  f.marker(1, EventKind::StatusChange, 11, S(Status::Won));
  f.step(1, 21).lsc_ok(1, 101, 21).respond(1, ObjOp::ThunkRun, 21);
  if (overlap) f.respond(0, ObjOp::ThunkRun, 20);
  f.marker(0, EventKind::AttemptEnd, 10, I(0), {}, {}, true);
  f.marker(1, EventKind::AttemptEnd, 11, I(0), {}, {}, true);
  return f.done();
}

}  // namespace

TEST(Mutex, SequentialWinnersPass) {
  Verdict v = check_mutex_idempotence(two_winners(false));
  EXPECT_TRUE(v.ok()) << v.summary();
}

TEST(Mutex, OverlappingConflictingWinnersAreRejected) {
  EXPECT_TRUE(has_rule(check_mutex_idempotence(two_winners(true)), "mutex/overlap"));
}

TEST(Mutex, LoserWithThunkStepIsRejected) {
  History h = Forge()
                  .marker(0, EventKind::AttemptStart, 10, I(100), H(20), {I(0)})
                  .marker(1, EventKind::StatusChange, 10, S(Status::Lost))
                  .step(1, 20)
                  .marker(0, EventKind::AttemptEnd, 10, I(0), {}, {}, false)
                  .done();
  EXPECT_TRUE(has_rule(check_mutex_idempotence(h), "mutex/loser-ran"));
}

TEST(Mutex, DoubleEffectAndWrongReturnAreRejected) {
  History h = Forge()
                  .marker(0, EventKind::AttemptStart, 10, I(100), H(20), {I(0)})
                  .marker(0, EventKind::StatusChange, 10, S(Status::Won))
                  .lsc_ok(0, 100, 20)
                  .lsc_ok(1, 100, 20)
                  .respond(0, ObjOp::ThunkRun, 20)
                  .marker(0, EventKind::AttemptEnd, 10, I(0), {}, {}, false)
                  .done();
  Verdict v = check_mutex_idempotence(h);
  EXPECT_TRUE(has_rule(v, "mutex/effect-count"));
  EXPECT_TRUE(has_rule(v, "mutex/return-value"));
}

TEST(Mutex, PhilosophersRunsPassEverySafetyCheck) {
  for (Variant var : {Variant::Known, Variant::Adaptive}) {
    PhilosopherRun run = philosophers_runs(var, 6, 60);
    for (const History& h : run.histories) {
      for (const Verdict& v : {check_mutex_idempotence(h), check_set_regularity(h), check_slot_bound(h)})
        EXPECT_TRUE(v.ok()) << to_string(var) << ": " << v.summary();
      Verdict steps = var == Variant::Known
                          ? check_fixed_steps(h, run.config.t0(), run.config.t1())
                          : check_adaptive_steps(h, run.config.c_prime * run.config.thunk_ticks);
      EXPECT_TRUE(steps.ok()) << to_string(var) << ": " << steps.summary();
    }
  }
}

// ---- fixed steps ----

TEST(FixedSteps, OneStepDriftIsPinpointed) {
  Forge f;
  f.marker(0, EventKind::AttemptStart, 10, I(100), H(20), {I(0)});
  f.step(0, -1, 8).marker(0, EventKind::Reveal, 10, I(3));
  f.step(0, -1, 6).marker(0, EventKind::AttemptEnd, 10, I(0), {}, {}, false);
  f.marker(1, EventKind::AttemptStart, 11, I(101), H(21), {I(0)});
  f.step(1, -1, 9).marker(1, EventKind::Reveal, 11, I(4));
  f.step(1, -1, 6).marker(1, EventKind::AttemptEnd, 11, I(0), {}, {}, false);
  f.marker(2, EventKind::AttemptStart, 12, I(102), H(22), {I(0)});
  History h = f.done();
  Verdict v = check_fixed_steps(h, 8, 6);
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0].rule, "fixed-steps/pre");
  EXPECT_NE(v.violations[0].explanation.find("d11"), std::string::npos);
  EXPECT_EQ(v.notes.size(), 1u);  // the unfinished attempt
  EXPECT_TRUE(check_fixed_steps(h, 9, 6).violations.size() == 1);
}

TEST(AdaptiveSteps, NonPowerOfTwoRevealIsRejected) {
  Forge f;
  f.marker(0, EventKind::AttemptStart, 10, I(100), H(20), {I(0)});
  f.step(0, -1, 6).marker(0, EventKind::Reveal, 10, Word::tbd());
  f.step(0, -1, 10).marker(0, EventKind::AttemptEnd, 10, I(2), {}, {}, false);
  Verdict v = check_adaptive_steps(f.done(), 5);
  EXPECT_TRUE(has_rule(v, "adaptive-steps/power-of-two"));
  EXPECT_FALSE(has_rule(v, "adaptive-steps/post"));
}

// ---- slot bound ----

TEST(SlotBound, SoloInsertHoldsWithOneMember) {
  Engine e({1, 0});
  ActiveSet s(e, 2, 0);
  e.spawn(0, [](Process& self, const ActiveSet& s) -> Task<void> { co_await s.insert(self, Word::integer(1)); }(
                  e.proc(0), s));
  drain(e, 0);
  EXPECT_TRUE(check_slot_bound(e.history()).ok());
}

TEST(SlotBound, CraftedRacesReachHighSlotsAndHold) {
  for (const Scenario& sc : slot_race_scenarios()) {
    EXPECT_TRUE(sc.reached) << sc.name << ": " << sc.detail;
    Verdict v = check_slot_bound(sc.history);
    EXPECT_TRUE(v.ok()) << sc.name << ": " << v.summary();
  }
}

TEST(SlotBound, TeleportedInsertIsRejected) {
  History h = Forge()
                  .invoke(0, ObjOp::AsInsert, 0, I(1))
                  .invoke(1, ObjOp::AsInsert, 0, I(2))
                  .respond(0, ObjOp::AsInsert, 0, I(0), I(1))
                  .respond(1, ObjOp::AsInsert, 0, I(5), I(2))
                  .done();
  EXPECT_TRUE(has_rule(check_slot_bound(h), "slot-bound/contention"));
}

// ---- idempotence ----

TEST(Idempotence, FixturesPassWithTwoHelpers) {
  for (const ThunkFixture& f : {increment_fixture(), swap_fixture(), conditional_cam_fixture()}) {
    ExploreStats st;
    Verdict v = check_idempotence(f.program, 2, {f.init}, &st);
    EXPECT_TRUE(v.ok()) << f.name << ": " << v.summary();
    EXPECT_GT(st.terminals, 1u) << f.name;
  }
}

TEST(Idempotence, OneHelperIsTriviallyFine) {
  ThunkFixture f = increment_fixture();
  EXPECT_TRUE(check_idempotence(f.program, 1, {f.init}).ok());
}

TEST(Idempotence, BrokenThunkIsCaught) {
  ThunkFixture f = broken_fixture();
  EXPECT_FALSE(validate(f.program).empty());
  Verdict v = check_idempotence(f.program, 2, {f.init});
  EXPECT_TRUE(has_rule(v, "idempotence/differs-from-solo")) << v.summary();
}

TEST(Idempotence, TightStepBoundIsBoundedOut) {
  ThunkFixture f = swap_fixture();
  IdempotenceOptions o{f.init};
  o.step_bound = 5;
  EXPECT_TRUE(has_rule(check_idempotence(f.program, 2, o), kBoundedOut));
}

// ---- offline use ----

TEST(Offline, VerdictsSurviveSerialization) {
  PhilosopherRun run = philosophers_runs(Variant::Known, 1, 30);
  const History& h = run.histories[0];
  for (bool binary : {false, true}) {
    std::stringstream ss;
    binary ? h.write_binary(ss) : h.write_text(ss);
    History back = History::read_any(ss);
    EXPECT_EQ(check_mutex_idempotence(back), check_mutex_idempotence(h));
    EXPECT_EQ(check_set_regularity(back), check_set_regularity(h));
    EXPECT_EQ(check_fixed_steps(back, run.config.t0(), run.config.t1()),
              check_fixed_steps(h, run.config.t0(), run.config.t1()));
  }
}

TEST(SimOps, EveryInterleavingStaysWithinTheTickBound) {
  for (std::uint32_t procs : {2u, 3u}) {
    SweepResult r = sweep_sim_ops(procs);
    EXPECT_TRUE(r.verdict.ok()) << r.verdict.summary();
    EXPECT_GT(r.histories, 1u);
  }
}

TEST(SimOps, SlowOperationIsFlagged) {
  Forge f;
  f.invoke(0, ObjOp::SimRead, 3).step(0, -1, kMaxTicksPerSimOp + 1).respond(0, ObjOp::SimRead, 3);
  Verdict v = check_sim_op_ticks(f.done());
  EXPECT_TRUE(has_rule(v, "sim-op-ticks/exceeded")) << v.summary();
}
