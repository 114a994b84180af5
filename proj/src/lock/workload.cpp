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

#include "lock/workload.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace wfl {

ThunkProgram counter_program(int locks) {
  if (locks < 1) throw ConfigError("counter thunk needs at least one lock");
  int cells = locks + 1;
  std::ostringstream s;
  s << "thunk regs=" << 2 * cells << " params=" << cells << " spill=0\ncapsule\n";
  for (int i = 0; i < cells; ++i) {
    s << "  lll r" << 2 * i << " r" << 2 * i + 1 << " @" << i << "\n";
    s << "  add r" << 2 * i << " r" << 2 * i << " 1\n";
  }
  s << "capsule\n";
  for (int i = 0; i < cells; ++i) s << "  lsc @" << i << " r" << 2 * i + 1 << " r" << 2 * i << "\n";
  return ThunkProgram::parse(s.str());
}

std::uint32_t LockTopology::max_locks() const {
  std::size_t m = 0;
  for (const auto& ls : per_proc) m = std::max(m, ls.size());
  return static_cast<std::uint32_t>(m);
}

std::vector<std::uint32_t> LockTopology::contention() const {
  std::vector<std::uint32_t> k(locks, 0);
  for (const auto& ls : per_proc)
    for (LockId l : ls) ++k.at(l);
  return k;
}

std::uint32_t LockTopology::max_contention() const {
  auto k = contention();
  return k.empty() ? 0 : *std::max_element(k.begin(), k.end());
}

LockTopology philosophers(std::uint32_t n) {
  if (n < 3) throw ConfigError("philosophers needs n >= 3");
  LockTopology t;
  t.locks = n;
  for (std::uint32_t i = 0; i < n; ++i) t.per_proc.push_back({i, (i + 1) % n});
  return t;
}

LockTopology graph_topology(std::uint32_t nodes, const std::vector<Edge>& edges) {
  if (nodes == 0) throw ConfigError("graph needs at least one node");
  std::vector<std::set<LockId>> adj(nodes);
  for (auto [a, b] : edges) {
    if (a >= nodes || b >= nodes || a == b) throw ConfigError("bad graph edge");
    adj[a].insert(b);
    adj[b].insert(a);
  }
  LockTopology t;
  t.locks = nodes;
  for (std::uint32_t v = 0; v < nodes; ++v) {
    std::vector<LockId> ls{v};
    ls.insert(ls.end(), adj[v].begin(), adj[v].end());
    t.per_proc.push_back(std::move(ls));
  }
  return t;
}

std::vector<Edge> random_edges(std::uint32_t nodes, std::uint32_t max_degree, std::uint64_t seed) {
  std::vector<Edge> pairs, edges;
  for (std::uint32_t a = 0; a < nodes; ++a)
    for (std::uint32_t b = a + 1; b < nodes; ++b) pairs.emplace_back(a, b);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with our own index draw keeps the order independent of the
  // standard library's shuffle.
  for (std::size_t i = pairs.size(); i > 1; --i) std::swap(pairs[i - 1], pairs[rng() % i]);
  std::vector<std::uint32_t> deg(nodes, 0);
  for (auto [a, b] : pairs)
    if (deg[a] < max_degree && deg[b] < max_degree) {
      edges.emplace_back(a, b);
      ++deg[a];
      ++deg[b];
    }
  return edges;
}

std::vector<Edge> ring_edges(std::uint32_t nodes) {
  if (nodes < 3) throw ConfigError("ring needs at least 3 nodes");
  std::vector<Edge> edges;
  for (std::uint32_t v = 0; v < nodes; ++v) edges.emplace_back(v, (v + 1) % nodes);
  return edges;
}

std::vector<Edge> star_edges(std::uint32_t nodes) {
  std::vector<Edge> edges;
  for (std::uint32_t v = 1; v < nodes; ++v) edges.emplace_back(0, v);
  return edges;
}

LockTopology random_graph(std::uint32_t nodes, std::uint32_t max_degree, std::uint64_t seed) {
  return graph_topology(nodes, random_edges(nodes, max_degree, seed));
}

LockTopology ring_graph(std::uint32_t nodes) { return graph_topology(nodes, ring_edges(nodes)); }

LockTopology star_graph(std::uint32_t nodes) { return graph_topology(nodes, star_edges(nodes)); }

LockTopology edge_topology(std::uint32_t nodes, const std::vector<Edge>& edges) {
  if (edges.empty()) throw ConfigError("edge locking needs at least one edge");
  LockTopology t;
  t.locks = nodes;
  for (auto [a, b] : edges) {
    if (a >= nodes || b >= nodes || a == b) throw ConfigError("bad graph edge");
    t.per_proc.push_back({a, b});
  }
  return t;
}

LockTopology clique(std::uint32_t procs, std::uint32_t locks) {
  if (procs == 0 || locks == 0) throw ConfigError("clique needs processes and locks");
  LockTopology t;
  t.locks = locks;
  std::vector<LockId> all;
  for (LockId l = 0; l < locks; ++l) all.push_back(l);
  t.per_proc.assign(procs, all);
  return t;
}

std::uint64_t thunk_ticks_for(const LockTopology& topo) {
  std::uint64_t t = 1;
  std::set<std::size_t> sizes;
  for (const auto& ls : topo.per_proc) sizes.insert(ls.size());
  for (std::size_t k : sizes) t = std::max(t, solo_run_ticks(counter_program(static_cast<int>(k))));
  return t;
}

LockWorkload::LockWorkload(LockTopology topology, LockConfig config, Variant variant)
    : topo_(std::move(topology)), config_(config), variant_(variant) {
  if (topo_.per_proc.empty()) throw ConfigError("workload without processes");
  for (const auto& ls : topo_.per_proc)
    if (!programs_.count(ls.size())) programs_.emplace(ls.size(), counter_program(static_cast<int>(ls.size())));
  config_.thunk_ticks = thunk_ticks_for(topo_);
  config_.validate();
  if (config_.procs != topo_.procs()) throw ConfigError("config P differs from the topology's process count");
  if (variant_ == Variant::Known &&
      (config_.kappa < topo_.max_contention() || config_.max_locks < topo_.max_locks()))
    throw ConfigError("kappa or L below what the topology needs");
}

std::uint32_t LockWorkload::capacity() const {
  return variant_ == Variant::Known ? config_.kappa : config_.procs;
}

const ThunkProgram& LockWorkload::program_for(std::size_t locks) const {
  auto it = programs_.find(locks);
  if (it == programs_.end()) throw ConfigError("no thunk for a lock set of that size");
  return it->second;
}

void LockWorkload::setup(Engine& engine) {
  lock_.reset();
  registry_ = std::make_unique<LockRegistry>(engine, topo_.locks, capacity());
  counters_.clear();
  for (LockId l = 0; l < topo_.locks; ++l) counters_.push_back(engine.alloc_cell(Word::integer(0)));
  lock_ = std::make_unique<TryLock>(*registry_, config_, variant_);
  if (draw_) lock_->set_priority_draw(draw_);
  lock_->set_measure_only(measure_only_);
}

Task<void> LockWorkload::attempt(Process& self, AttemptRequest request) {
  std::vector<CellId> params;
  for (LockId l : request.locks) params.push_back(counters_.at(l));
  CellId effect = self.alloc_cell(Word::integer(0));
  params.push_back(effect);
  SharedThunk thunk = make_shared_thunk(self, program_for(request.locks.size()), params);
  co_await lock_->try_locks(self, request.locks, std::move(thunk),
                            Word::integer(static_cast<std::int64_t>(effect.index)));
}

LockChooser LockWorkload::chooser() const {
  auto per = topo_.per_proc;
  return [per](ProcId p) { return per.at(p); };
}

}  // namespace wfl
