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

#include "sim/explore.hpp"

#include <memory>
#include <unordered_set>

namespace wfl {

namespace {

std::unique_ptr<Engine> fresh(const ExploreSetup& setup) {
  auto e = std::make_unique<Engine>(EngineOptions{setup.procs, setup.seed});
  setup.build(*e);
  return e;
}

class Explorer {
 public:
  Explorer(const ExploreSetup& s, const ExploreChecks& c, const ExploreLimits& l)
      : setup_(s), checks_(c), limits_(l) {}

  ExploreStats run() {
    auto root = fresh(setup_);
    ++stats_.replays;
    dfs(std::move(root));
    return stats_;
  }

 private:
  bool stopped() const { return stats_.bounded_out || !stats_.first_failure.empty(); }

  void fail(std::string why) {
    if (stats_.first_failure.empty()) {
      stats_.first_failure = std::move(why);
      stats_.failing_schedule = path_;
    }
  }

  std::unique_ptr<Engine> rebuild() {
    auto e = fresh(setup_);
    ++stats_.replays;
    for (ProcId p : path_) e->step(p);
    return e;
  }

  void dfs(std::unique_ptr<Engine> eng) {
    if (stopped()) return;
    if (!visited_.insert(eng->fingerprint()).second) return;
    if (++stats_.states > limits_.max_states) {
      stats_.bounded_out = true;
      return;
    }
    stats_.max_depth = std::max<std::uint64_t>(stats_.max_depth, path_.size());

    std::vector<ProcId> runnable;
    for (ProcId p = 0; p < eng->procs(); ++p)
      if (eng->busy(p)) runnable.push_back(p);

    if (runnable.empty()) {
      ++stats_.terminals;
      if (checks_.at_terminal) {
        auto why = checks_.at_terminal(*eng);
        if (!why.empty()) fail(std::move(why));
      }
      return;
    }
    if (path_.size() >= limits_.max_depth) {
      stats_.bounded_out = true;
      return;
    }

    for (std::size_t i = 0; i < runnable.size() && !stopped(); ++i) {
      bool last = i + 1 == runnable.size();
      std::unique_ptr<Engine> child = last ? std::move(eng) : rebuild();
      ProcId p = runnable[i];
      path_.push_back(p);
      try {
        child->step(p);
        if (checks_.after_step) {
          auto why = checks_.after_step(*child);
          if (!why.empty()) fail(std::move(why));
        }
      } catch (const std::exception& ex) {
        fail(std::string("fault: ") + ex.what());
      }
      if (!stopped()) dfs(std::move(child));
      path_.pop_back();
    }
  }

  const ExploreSetup& setup_;
  const ExploreChecks& checks_;
  const ExploreLimits& limits_;
  ExploreStats stats_;
  std::vector<ProcId> path_;
  std::unordered_set<Fingerprint, FingerprintHash> visited_;
};

}  // namespace

ExploreStats explore_all(const ExploreSetup& setup, const ExploreChecks& checks,
                         const ExploreLimits& limits) {
  return Explorer(setup, checks, limits).run();
}

void replay(const ExploreSetup& setup, const std::vector<ProcId>& schedule,
            const std::function<void(Engine&)>& inspect) {
  auto e = fresh(setup);
  for (ProcId p : schedule) e->step(p);
  inspect(*e);
}

}  // namespace wfl
