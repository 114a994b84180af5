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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bench/report.hpp"
#include "json.hpp"
#include "verify/scenarios.hpp"

using namespace wfl;
using namespace wfl::bench;
using nlohmann::json;

namespace {

// ---- pinned thresholds ----
constexpr std::uint32_t kPhilosophers = 8;
constexpr std::uint64_t kAttempts = 10'000;
constexpr std::uint32_t kSeeds = 20;
constexpr std::uint64_t kFirstSeed = 1;
constexpr double kMinRate = 0.25;
constexpr double kRateSlack = 0.02;  // lower confidence bound may sit this far below kMinRate
constexpr std::uint64_t kMaxSweepStates = 50'000'000;
constexpr std::uint64_t kMaxSweepDepth = 400;
constexpr double kMaxSweepSeconds = 300.0;
constexpr std::uint64_t kMinSweepHistories = 1000;
constexpr std::uint32_t kAdaptiveFloorFactor = 4;

struct Line {
  int id;
  std::string title;
  bool pass = false;
  std::string detail;
};

/// A report and the function that regenerates it from its own inputs.
struct Replayable {
  std::string name;
  std::string report;
  std::function<std::string(const std::string&)> replay;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(double x, int digits = 4) {
  char b[64];
  std::snprintf(b, sizeof b, "%.*f", digits, x);
  return b;
}

const Verdict& verdict_of(const StatsReport& r, const std::string& check) {
  for (const Verdict& v : r.verdicts)
    if (v.check == check) return v;
  throw std::runtime_error("report has no " + check + " verdict");
}

std::string brief(const Verdict& v) { return v.ok() ? v.check + " ok" : v.summary(); }

json verdict_json(const Verdict& v) { return json::parse(verdicts_json({v}))["checks"][0]; }

BenchConfig philosophers_config(Variant variant) {
  BenchConfig c;
  c.kind = WorkloadKind::Philosophers;
  c.n = kPhilosophers;
  c.attempts = kAttempts;
  c.seed = kFirstSeed;
  c.seeds = kSeeds;
  c.schedule = ScheduleKind::UniformRandom;
  c.variant = variant;
  return c;
}

std::string bench_replay(const std::string& report) { return report_json(run_bench(config_from_json(report))); }

// ---- criterion 4 ----

struct SweepSet {
  bool ok = true;
  std::uint64_t histories = 0;
  double seconds = 0;
  std::string detail;
  std::string report;
};

SweepSet run_sweeps() {
  SweepSet s;
  json j;
  j["workloads"] = json::array();
  auto t = std::chrono::steady_clock::now();
  ExploreLimits limits;
  limits.max_depth = kMaxSweepDepth;
  limits.max_states = kMaxSweepStates;
  for (std::uint32_t procs : {2u, 3u}) {
    for (const auto& programs : sweep_workloads(procs)) {
      SweepResult r = sweep_active_set(programs, procs, limits);
      s.histories += r.histories;
      std::string name;
      for (const auto& p : programs) name += (name.empty() ? "" : "|") + p;
      j["workloads"].push_back({{"programs", programs},
                                {"capacity", procs},
                                {"histories", r.histories},
                                {"states", r.stats.states},
                                {"bounded_out", r.stats.bounded_out},
                                {"verdict", verdict_json(r.verdict)}});
      if (!r.verdict.ok()) {
        s.ok = false;
        s.detail += " [" + name + ": " + r.verdict.summary() + "]";
      }
    }
  }
  s.seconds = seconds_since(t);
  j["histories"] = s.histories;
  s.report = j.dump(2) + "\n";
  return s;
}

// ---- criterion 5b, 7b ----

json scenario_json(const Scenario& sc, const Verdict& v) {
  std::ostringstream h;
  sc.history.write_text(h);
  return {{"name", sc.name}, {"reached", sc.reached}, {"detail", sc.detail}, {"verdict", verdict_json(v)},
          {"history", h.str()}};
}

std::string disjoint_report() {
  Scenario sc = disjoint_get_sets_scenario();
  return json(scenario_json(sc, check_set_regularity(sc.history))).dump(2) + "\n";
}

std::string slot_race_report() {
  json j = json::array();
  for (const Scenario& sc : slot_race_scenarios()) j.push_back(scenario_json(sc, check_slot_bound(sc.history)));
  return j.dump(2) + "\n";
}

// ---- criterion 6 ----

std::string idempotence_report() {
  json j;
  j["fixtures"] = json::array();
  for (const ThunkFixture& f : {increment_fixture(), swap_fixture(), conditional_cam_fixture()})
    for (std::uint32_t helpers : {2u, 3u}) {
      ExploreStats st;
      IdempotenceOptions o;
      o.init = f.init;
      Verdict v = check_idempotence(f.program, helpers, o, &st);
      j["fixtures"].push_back({{"name", f.name},
                               {"helpers", helpers},
                               {"terminals", st.terminals},
                               {"states", st.states},
                               {"run_tick_bound", run_tick_bound(f.program)},
                               {"verdict", verdict_json(v)}});
    }
  SweepResult ops = sweep_sim_ops(3);
  j["sim_ops"] = {{"processes", 3},
                  {"histories", ops.histories},
                  {"max_ticks_per_op", kMaxTicksPerSimOp},
                  {"verdict", verdict_json(ops.verdict)}};
  return j.dump(2) + "\n";
}

}  // namespace

int main() {
  auto started = std::chrono::steady_clock::now();
  std::vector<Line> lines;
  std::vector<Replayable> reports;
  auto emit = [&](const Line& l) {
    std::cout << (l.pass ? "PASS" : "FAIL") << "  " << l.id << ". " << l.title << ": " << l.detail << std::endl;
    lines.push_back(l);
  };

  // Shared philosophers run for criteria 1, 2, 3, 5a and 7a.
  auto t1 = std::chrono::steady_clock::now();
  StatsReport known = run_bench(philosophers_config(Variant::Known));
  double known_secs = seconds_since(t1);
  reports.push_back({"philosophers/known", report_json(known), bench_replay});

  {
    Line l{1, "fairness, philosophers n=8"};
    double rate = known.rate(), lcb = known.lower_bound();
    bool shape = known.lock.kappa == 2 && known.lock.max_locks == 2 && known.attempts == kAttempts &&
                 known.per_seed.size() >= 20;
    l.pass = shape && rate >= kMinRate && lcb >= kMinRate - kRateSlack;
    l.detail = "rate " + fmt(rate) + " (>= " + fmt(kMinRate, 2) + "), lcb99 " + fmt(lcb) + " (>= " +
               fmt(kMinRate - kRateSlack, 2) + "), " + std::to_string(known.attempts) + " attempts over " +
               std::to_string(known.per_seed.size()) + " seeds, kappa=" + std::to_string(known.lock.kappa) +
               " L=" + std::to_string(known.lock.max_locks) + ", " + fmt(known_secs, 1) + "s";
    emit(l);
  }
  {
    Line l{2, "step bound exactness"};
    const Verdict& v = verdict_of(known, "steps");
    std::uint64_t t0 = known.lock.t0(), t1v = known.lock.t1();
    bool exact = known.pre_steps.min == t0 && known.pre_steps.max == t0 && known.post_steps.min == t1v &&
                 known.post_steps.max == t1v;
    l.pass = v.ok() && exact;
    l.detail = "T0=" + std::to_string(t0) + " T1=" + std::to_string(t1v) + ", pre " +
               std::to_string(known.pre_steps.min) + ".." + std::to_string(known.pre_steps.max) + ", post " +
               std::to_string(known.post_steps.min) + ".." + std::to_string(known.post_steps.max) + "; " + brief(v);
    emit(l);
  }
  {
    Line l{3, "mutual exclusion with idempotence"};
    const Verdict& v = verdict_of(known, "mutex");
    l.pass = v.ok();
    l.detail = brief(v) + " over " + std::to_string(known.attempts) + " attempts";
    emit(l);
  }
  {
    Line l{4, "active set linearizability, exhaustive"};
    SweepSet s = run_sweeps();
    reports.push_back({"active-set sweeps", s.report, [](const std::string&) { return run_sweeps().report; }});
    l.pass = s.ok && s.histories >= kMinSweepHistories && s.seconds <= kMaxSweepSeconds;
    l.detail = std::to_string(s.histories) + " histories, 2x4 and 3x5 operations, " + fmt(s.seconds, 1) + "s (<= " +
               fmt(kMaxSweepSeconds, 0) + "s)" + (s.ok ? ", all linearizable" : s.detail);
    emit(l);
  }
  {
    Line l{5, "set regularity"};
    const Verdict& v = verdict_of(known, "regularity");
    Scenario sc = disjoint_get_sets_scenario();
    Verdict sv = check_set_regularity(sc.history);
    reports.push_back({"disjoint getSets", disjoint_report(), [](const std::string&) { return disjoint_report(); }});
    l.pass = v.ok() && sc.reached && sv.ok();
    l.detail = "runs: " + brief(v) + "; {a}/{b} scenario " + (sc.reached ? "reached" : "NOT reached") + " (" +
               sc.detail + "), " + brief(sv);
    emit(l);
  }
  {
    Line l{6, "idempotent thunks"};
    std::string rep = idempotence_report();
    reports.push_back({"idempotence", rep, [](const std::string&) { return idempotence_report(); }});
    json j = json::parse(rep);
    bool ok = j["sim_ops"]["verdict"]["ok"].get<bool>();
    std::string detail;
    for (const auto& f : j["fixtures"]) {
      bool fok = f["verdict"]["ok"].get<bool>();
      ok = ok && fok;
      detail += f["name"].get<std::string>() + "/" + std::to_string(f["helpers"].get<int>()) + " " +
                (fok ? "ok" : "FAILED") + " (" + std::to_string(f["terminals"].get<std::uint64_t>()) + " runs), ";
    }
    l.pass = ok;
    l.detail = detail + "simulated ops <= " + std::to_string(kMaxTicksPerSimOp) + " ticks over " +
               std::to_string(j["sim_ops"]["histories"].get<std::uint64_t>()) + " interleavings " +
               (j["sim_ops"]["verdict"]["ok"].get<bool>() ? "ok" : "FAILED");
    emit(l);
  }
  {
    Line l{7, "contention adaptivity (slot bound)"};
    const Verdict& v = verdict_of(known, "slot-bound");
    bool ok = v.ok();
    std::string detail = "runs: " + brief(v);
    auto scs = slot_race_scenarios();
    for (const Scenario& sc : scs) {
      Verdict sv = check_slot_bound(sc.history);
      ok = ok && sc.reached && sv.ok();
      detail += "; " + sc.name + (sc.reached ? "" : " NOT reached") + " (" + sc.detail + ") " + brief(sv);
    }
    reports.push_back({"slot races", slot_race_report(), [](const std::string&) { return slot_race_report(); }});
    l.pass = ok && scs.size() == 3;
    l.detail = detail;
    emit(l);
  }
  {
    Line l{8, "adaptive variant"};
    StatsReport ad = run_bench(philosophers_config(Variant::Adaptive));
    reports.push_back({"philosophers/adaptive", report_json(ad), bench_replay});
    double klt = static_cast<double>(ad.lock.kappa) * ad.lock.max_locks * static_cast<double>(ad.lock.thunk_ticks);
    double floor = 1.0 / (kAdaptiveFloorFactor * std::log2(klt));
    bool safe = verdict_of(ad, "mutex").ok() && verdict_of(ad, "regularity").ok() && verdict_of(ad, "slot-bound").ok();
    const Verdict& steps = verdict_of(ad, "steps");
    l.pass = ad.attempts == kAttempts && ad.rate() >= floor && safe && steps.ok();
    l.detail = "rate " + fmt(ad.rate()) + " (>= 1/(4 log2 " + fmt(klt, 0) + ") = " + fmt(floor) + "), safety " +
               (safe ? "ok" : "FAILED") + ", power-of-two reveals: " + brief(steps);
    emit(l);
  }
  {
    Line l{9, "determinism"};
    std::string mismatched;
    for (const Replayable& r : reports)
      if (r.replay(r.report) != r.report) mismatched += " " + r.name;
    l.pass = mismatched.empty();
    l.detail = std::to_string(reports.size()) + " reports replayed" +
               (mismatched.empty() ? ", all byte-identical" : ", differing:" + mismatched);
    emit(l);
  }

  int failed = 0;
  for (const Line& l : lines) failed += !l.pass;
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << lines.size() - failed << "/" << lines.size() << " in "
            << fmt(seconds_since(started), 1) << "s" << std::endl;
  return failed ? 1 : 0;
}
