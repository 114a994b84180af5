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

#include <string>
#include <vector>

#include "verify/checks.hpp"

namespace wfl {

// Directed schedules and exhaustive sweeps over the active-set objects,
// shared by the tests, the acceptance runner and the command line.

/// Outcome of one directed schedule.
struct Scenario {
  std::string name;
  History history;
  /// Whether the schedule reached the situation it was written for.
  bool reached = false;
  std::string detail;
};

/// Two multi_inserts of a and b overlap two get_set_filtered calls; the
/// schedule makes one getSet return only a and the other only b.
Scenario disjoint_get_sets_scenario();

/// Active-set races that push inserts into high slots: three processes
/// racing to slot 2, four racing to slot 3, and churn with removes refilling
/// low slots while high ones stay owned.
std::vector<Scenario> slot_race_scenarios();

/// Per-process active-set programs over letters: i = insert a fresh item,
/// r = remove the item last inserted, g = getSet.
struct SweepResult {
  ExploreStats stats;
  std::uint64_t histories = 0;  // terminal histories checked
  Verdict verdict;
};

/// Explores every interleaving of the programs on one active set of the
/// given capacity and checks each terminal history for linearizability.
SweepResult sweep_active_set(const std::vector<std::string>& programs, std::uint32_t capacity,
                             const ExploreLimits& limits = {});

/// Up to three processes mixing standalone simulated write, cam and reads on
/// two cells; every terminal history goes through check_sim_op_ticks and the
/// write and cam must both land.
SweepResult sweep_sim_ops(std::uint32_t procs, const ExploreLimits& limits = {});

/// The fixed program mixes swept for 2 and 3 processes.
std::vector<std::vector<std::string>> sweep_workloads(std::uint32_t procs);

}  // namespace wfl
