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
#include <functional>
#include <string>
#include <vector>

#include "sim/engine.hpp"

namespace wfl {

// Exhaustive interleaving enumeration over a fixed set of process programs.
//
// Every schedule of the programs is explored by depth-first replay. States
// are deduplicated by Engine::fingerprint(), which covers memory, each
// process's observation sequence and the observable marker sequence, so two
// prefixes with the same fingerprint have identical sets of continuations
// and identical operation-level histories. Pruning is therefore complete:
// every reachable terminal operation history is visited at least once.

struct ExploreSetup {
  /// Builds shared objects and spawns the per-process programs.
  std::function<void(Engine&)> build;
  std::uint32_t procs = 1;
  std::uint64_t seed = 0;
};

struct ExploreLimits {
  /// Longest schedule allowed; deeper paths make the result bounded-out.
  std::uint64_t max_depth = 400;
  /// Distinct states allowed before giving up.
  std::uint64_t max_states = 5'000'000;
};

struct ExploreStats {
  std::uint64_t states = 0;      // distinct fingerprints visited
  std::uint64_t terminals = 0;   // distinct terminal states checked
  std::uint64_t replays = 0;
  std::uint64_t max_depth = 0;
  bool bounded_out = false;
  std::string first_failure;     // empty when every check passed
  std::vector<ProcId> failing_schedule;
};

/// Invoked after every step (for online properties) and at each terminal
/// state. Return a non-empty string to report a failure; exploration stops
/// at the first failure.
struct ExploreChecks {
  std::function<std::string(const Engine&)> after_step;
  std::function<std::string(const Engine&)> at_terminal;
};

ExploreStats explore_all(const ExploreSetup& setup, const ExploreChecks& checks,
                         const ExploreLimits& limits = {});

/// Replays one schedule prefix on a fresh engine and hands it to `inspect`.
void replay(const ExploreSetup& setup, const std::vector<ProcId>& schedule,
            const std::function<void(Engine&)>& inspect);

}  // namespace wfl
