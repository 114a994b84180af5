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
#include <vector>

#include "lock/workload.hpp"

namespace wfl {

/// Step counts of one completed attempt, read back from a history.
struct AttemptSteps {
  std::int64_t descriptor = -1;
  ProcId proc = 0;
  std::uint64_t start = 0;
  std::uint64_t reveal = 0;
  std::uint64_t end = 0;
  std::uint64_t contenders = 0;
  bool won = false;
};

/// Completed attempts of a history, in start order.
std::vector<AttemptSteps> attempt_steps(const History& h);

struct CalibrationOptions {
  std::uint32_t seeds = 24;              // uniform_random schedules
  std::uint64_t first_seed = 1;          // of the uniform schedules
  bool round_robin = true;               // one extra round-robin schedule
  std::uint64_t attempts_per_proc = 40;  // per schedule
  std::uint64_t margin = 2;              // measured maxima are multiplied by this
};

struct Calibration {
  std::uint32_t kappa = 0;
  std::uint32_t max_locks = 0;
  std::uint64_t thunk_ticks = 0;
  std::uint64_t c = 1;
  std::uint64_t c_prime = 1;
  std::uint64_t max_pre = 0;   // start to reveal
  std::uint64_t max_post = 0;  // reveal to end
  /// Largest post / contenders seen (adaptive sizing), rounded up.
  std::uint64_t max_post_per_contender = 0;
  std::uint64_t attempts = 0;
};

/// Smallest power of two p with p * unit >= need.
std::uint64_t smallest_power_of_two_covering(std::uint64_t need, std::uint64_t unit);

/// Measures undelayed attempts of `kappa` processes that all lock the same
/// `max_locks` locks with the longest counter thunk, under round-robin and
/// seeded uniform schedules, and sizes c and c' so that the delay targets
/// cover the measured maxima times the margin. Deterministic in its inputs.
Calibration calibrate(std::uint32_t kappa, std::uint32_t max_locks, Variant variant,
                      const CalibrationOptions& opts = {});

}  // namespace wfl
