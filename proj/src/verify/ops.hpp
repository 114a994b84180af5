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

#include <cstddef>
#include <limits>
#include <vector>

#include "sim/history.hpp"

namespace wfl::detail {

inline constexpr std::size_t kPending = std::numeric_limits<std::size_t>::max();

/// An operation's endpoints as event indices; `resp` is kPending when the
/// history ends first.
struct OpSpan {
  std::size_t inv = 0;
  std::size_t resp = kPending;
  ProcId proc = 0;
  std::int64_t obj = -1;

  bool complete() const { return resp != kPending; }
};

/// Pairs invocations and responses of `op`, each response with the same
/// process's latest open invocation. Ordered by invocation.
std::vector<OpSpan> op_spans(const History& h, ObjOp op);

/// Ticks of the given event indices, skipping kPending.
std::vector<Tick> ticks_of(const History& h, std::initializer_list<std::size_t> idx);

}  // namespace wfl::detail
