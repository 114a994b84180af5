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

#include "lock/calibrate.hpp"

#include <algorithm>
#include <map>

namespace wfl {

std::vector<AttemptSteps> attempt_steps(const History& h) {
  std::map<std::int64_t, AttemptSteps> open;
  std::map<std::int64_t, bool> revealed;
  std::vector<AttemptSteps> done;
  for (const Event& e : h.events()) {
    switch (e.kind) {
      case EventKind::AttemptStart: {
        AttemptSteps a;
        a.descriptor = e.obj;
        a.proc = e.proc;
        a.start = e.step;
        open[e.obj] = a;
        break;
      }
      case EventKind::Reveal:
        if (auto it = open.find(e.obj); it != open.end() && !revealed[e.obj]) {
          it->second.reveal = e.step;
          revealed[e.obj] = true;
        }
        break;
      case EventKind::AttemptEnd:
        if (auto it = open.find(e.obj); it != open.end()) {
          it->second.end = e.step;
          it->second.won = e.ok;
          it->second.contenders = e.a.is_int() ? static_cast<std::uint64_t>(e.a.as_int()) : 0;
          done.push_back(it->second);
          open.erase(it);
        }
        break;
      default:
        break;
    }
  }
  std::stable_sort(done.begin(), done.end(), [](const AttemptSteps& a, const AttemptSteps& b) {
    return a.descriptor < b.descriptor;
  });
  return done;
}

std::uint64_t smallest_power_of_two_covering(std::uint64_t need, std::uint64_t unit) {
  if (unit == 0) throw ConfigError("calibration unit must be positive");
  std::uint64_t p = 1;
  while (p * unit < need) p *= 2;
  return p;
}

Calibration calibrate(std::uint32_t kappa, std::uint32_t max_locks, Variant variant,
                      const CalibrationOptions& opts) {
  if (kappa == 0 || max_locks == 0) throw ConfigError("calibration needs kappa and L >= 1");
  if (opts.first_seed == 0) throw ConfigError("uniform calibration seeds start at 1");
  LockTopology topo = clique(kappa, max_locks);
  LockConfig cfg;
  cfg.procs = kappa;
  cfg.kappa = kappa;
  cfg.max_locks = max_locks;
  LockWorkload w(topo, cfg, variant);
  w.set_measure_only(true);

  Calibration cal;
  cal.kappa = kappa;
  cal.max_locks = max_locks;
  cal.thunk_ticks = w.config().thunk_ticks;

  const std::uint64_t attempts = opts.attempts_per_proc * kappa;
  std::vector<std::uint64_t> seeds;
  if (opts.round_robin) seeds.push_back(0);
  for (std::uint32_t k = 0; k < opts.seeds; ++k) seeds.push_back(opts.first_seed + k);
  for (std::uint64_t s : seeds) {
    ScheduleKind kind = s == 0 ? ScheduleKind::RoundRobin : ScheduleKind::UniformRandom;
    Schedule sched = make_schedule(kind, s, kappa, 1ULL << 40);
    ImmediateRetryPolicy player(w.chooser());
    RunConfig rc;
    rc.procs = kappa;
    rc.seed = 0xca11b000ULL + s;
    rc.max_attempts = attempts;
    RunResult r = run_sim(sched, player, w, rc);
    for (const AttemptSteps& a : attempt_steps(r.history)) {
      ++cal.attempts;
      cal.max_pre = std::max(cal.max_pre, a.reveal - a.start);
      std::uint64_t post = a.end - a.reveal;
      cal.max_post = std::max(cal.max_post, post);
      if (a.contenders > 0)
        cal.max_post_per_contender = std::max(cal.max_post_per_contender, (post + a.contenders - 1) / a.contenders);
    }
  }

  const std::uint64_t T = cal.thunk_ticks, K = kappa, L = max_locks;
  cal.c = smallest_power_of_two_covering(opts.margin * cal.max_pre, K * K * L * L * T);
  if (variant == Variant::Known)
    cal.c_prime = smallest_power_of_two_covering(opts.margin * cal.max_post, K * L * T);
  else
    cal.c_prime = smallest_power_of_two_covering(opts.margin * cal.max_post_per_contender, T);
  return cal;
}

}  // namespace wfl
