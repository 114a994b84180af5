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
#include <string>
#include <vector>

#include "sim/explore.hpp"
#include "sim/history.hpp"
#include "thunk/program.hpp"

namespace wfl {

struct Violation {
  std::string rule;
  std::vector<Tick> ticks;
  std::string explanation;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Result of one checker. A search that ran out of budget reports a
/// "bounded-out" violation, so it can never pass silently.
struct Verdict {
  std::string check;
  std::vector<Violation> violations;
  /// Informational remarks (skipped truncated attempts and the like).
  std::vector<std::string> notes;

  bool ok() const { return violations.empty(); }
  void add(std::string rule, std::vector<Tick> ticks, std::string explanation);
  /// One line: "<check>: ok" or "<check>: N violation(s), first: ...".
  std::string summary() const;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline constexpr const char* kBoundedOut = "bounded-out";

struct LinearizabilityLimits {
  /// Operations per active set; larger histories are bounded out.
  std::size_t max_ops = 64;
  /// Search nodes per active set.
  std::uint64_t max_nodes = 2'000'000;
};

/// Searches for a legal sequential order of every active set's insert,
/// remove and getSet operations (each set separately) that respects
/// real-time order. Pending inserts and removes may or may not take effect;
/// pending getSets are ignored.
Verdict check_linearizable_active_set(const History& h, const LinearizabilityLimits& limits = {});

/// Endpoint-based set regularity of get_set_filtered against multi_insert /
/// multi_remove: a getSet invoked after an insert's response and responding
/// before the matching remove's invocation must include the item; one
/// responding before the insert's invocation or invoked after the remove's
/// response must exclude it.
Verdict check_set_regularity(const History& h);

/// Lock safety over attempt markers and thunk-tagged events: winners with
/// intersecting lock sets run their thunks in disjoint intervals, each winner
/// updates its effect cell exactly once, losers take no thunk step, and every
/// attempt returns true exactly when its descriptor was decided won.
Verdict check_mutex_idempotence(const History& h);

/// Every completed attempt took exactly t0 initiator steps from start to
/// reveal and t1 from reveal to return.
Verdict check_fixed_steps(const History& h, std::uint64_t t0, std::uint64_t t1);

/// Adaptive attempts: the participation reveal lands on a power-of-two step
/// of the attempt, and the post delay equals contenders * unit.
Verdict check_adaptive_steps(const History& h, std::uint64_t unit);

/// For every active-set insert returning slot i, some tick inside the insert
/// saw at least i+1 members (insert invoked, remove not yet returned).
Verdict check_slot_bound(const History& h);

struct IdempotenceOptions {
  /// Initial param cell values; missing entries start at 0.
  std::vector<Word> init;
  /// Longest schedule explored.
  std::uint64_t step_bound = 400;
  std::uint64_t max_states = 5'000'000;
};

/// Explores every interleaving of `helpers` processes running the thunk and
/// compares each against one solo run: final memory, memory and done flag
/// at the end of the first finished run, successful lsc count per cell, and
/// the per-run tick bound, and the per-operation tick bound of simulated
/// read, write and cam.
Verdict check_idempotence(const ThunkProgram& program, std::uint32_t helpers, const IdempotenceOptions& opts = {},
                          ExploreStats* stats = nullptr);

/// Tick bound for one helper run of `program`: the run overhead plus
/// kMaxTicksPerSimOp per lll plus one per local instruction.
std::uint64_t run_tick_bound(const ThunkProgram& program);

/// Every completed simulated read, write and cam took at most
/// kMaxTicksPerSimOp of its caller's steps.
Verdict check_sim_op_ticks(const History& h);

/// Thunks used to exercise check_idempotence.
struct ThunkFixture {
  std::string name;
  ThunkProgram program;
  std::vector<Word> init;
};

ThunkFixture increment_fixture();
/// Swaps two cells: both loaded in one capsule, both stored in the next.
ThunkFixture swap_fixture();
/// Copies cell 0 into cell 1 when cell 1 still holds 0 (simulated cam).
ThunkFixture conditional_cam_fixture();
/// Loads and stores in the same capsule; not idempotent.
ThunkFixture broken_fixture();

}  // namespace wfl
