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

#include "verify/checks.hpp"
#include "verify/ops.hpp"

namespace wfl {

void Verdict::add(std::string rule, std::vector<Tick> ticks, std::string explanation) {
  violations.push_back({std::move(rule), std::move(ticks), std::move(explanation)});
}

std::string Verdict::summary() const {
  if (ok()) return check + ": ok";
  const Violation& v = violations.front();
  std::string s = check + ": " + std::to_string(violations.size()) + " violation(s), first [" + v.rule + "]";
  if (!v.ticks.empty()) s += " at tick " + std::to_string(v.ticks.front());
  return s + ": " + v.explanation;
}

namespace detail {

std::vector<OpSpan> op_spans(const History& h, ObjOp op) {
  const auto code = static_cast<std::uint8_t>(op);
  std::vector<OpSpan> out;
  std::map<ProcId, std::vector<std::size_t>> open;  // per process, indices into out
  const auto& ev = h.events();
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const Event& e = ev[i];
    if (e.op != code) continue;
    if (e.kind == EventKind::OpInvoke) {
      open[e.proc].push_back(out.size());
      out.push_back({i, kPending, e.proc, e.obj});
    } else if (e.kind == EventKind::OpResponse) {
      auto& st = open[e.proc];
      if (st.empty()) continue;  // response without invocation: ignored
      out[st.back()].resp = i;
      st.pop_back();
    }
  }
  return out;
}

std::vector<Tick> ticks_of(const History& h, std::initializer_list<std::size_t> idx) {
  std::vector<Tick> t;
  for (std::size_t i : idx)
    if (i != kPending && i < h.size()) t.push_back(h.events()[i].tick);
  return t;
}

}  // namespace detail
}  // namespace wfl
