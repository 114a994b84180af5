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

#include "lock/trylock.hpp"

#include <bit>
#include <limits>
#include <random>
#include <set>

namespace wfl {

namespace {

const Word kNoPriority = Word::integer(-1);
const Word kActive = Word::status(Status::Active);

void marker(Process& self, EventKind kind, Handle d, Word a = {}, Word b = {}, std::vector<Word> list = {},
            bool ok = true) {
  Event e;
  e.kind = kind;
  e.obj = d.index;
  e.a = a;
  e.b = b;
  e.list = std::move(list);
  e.ok = ok;
  self.emit(std::move(e));
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw ConfigError("delay constant overflows");
  return a * b;
}

}  // namespace

const char* to_string(Variant v) { return v == Variant::Known ? "known" : "adaptive"; }

Variant parse_variant(const std::string& s) {
  if (s == "known") return Variant::Known;
  if (s == "adaptive") return Variant::Adaptive;
  throw ConfigError("unknown variant '" + s + "' (expected known or adaptive)");
}

std::uint64_t LockConfig::t0() const {
  std::uint64_t kl = checked_mul(kappa, max_locks);
  return checked_mul(checked_mul(c, checked_mul(kl, kl)), thunk_ticks);
}

std::uint64_t LockConfig::t1() const {
  return checked_mul(checked_mul(c_prime, checked_mul(kappa, max_locks)), thunk_ticks);
}

std::int64_t LockConfig::m() const {
  if (priority_range > 0) return priority_range;
  auto p = static_cast<std::int64_t>(procs);
  return std::max<std::int64_t>(p * p * p, 1);
}

void LockConfig::validate() const {
  if (procs == 0 || kappa == 0 || max_locks == 0 || thunk_ticks == 0)
    throw ConfigError("P, kappa, L and T must all be positive");
  if (c == 0 || c_prime == 0) throw ConfigError("delay constants must be positive");
  if (priority_range < 0) throw ConfigError("priority range must be positive");
  if (procs > 2'000'000) throw ConfigError("too many processes for the priority range");
  (void)t0();
  (void)t1();
}

const ActiveSet& LockRegistry::at(LockId l) const {
  if (l >= sets_.size()) throw ConfigError("lock " + std::to_string(l) + " is not registered");
  return *sets_[l];
}

std::uint64_t next_power_of_two(std::uint64_t k) {
  if (k <= 1) return 1;
  return std::bit_ceil(k);
}

std::uint64_t adaptive_post_delay_target(std::uint64_t prev, std::uint64_t contenders, std::uint64_t unit) {
  return prev + contenders * unit;
}

TryLock::TryLock(const LockRegistry& registry, LockConfig config, Variant variant)
    : registry_(&registry), config_(config), variant_(variant) {
  config_.validate();
}

const Descriptor& TryLock::desc(Process& self, Word d) const {
  return self.heap().get<Descriptor>(d.as_handle());
}

std::int64_t TryLock::draw_priority(Process& self, Handle d) const {
  std::int64_t m = config_.m();
  if (draw_) {
    std::int64_t v = draw_(self, d, m);
    if (v < 1 || v > m) throw ConfigError("priority override out of [1, M]");
    return v;
  }
  std::uniform_int_distribution<std::int64_t> dist(1, m);
  return dist(self.rng());
}

Collection TryLock::collection(const std::vector<LockId>& locks) const {
  Collection c;
  for (LockId l : locks) c.push_back(&registry_->at(l));
  return c;
}

// ---- flags ----

Task<void> TryLock::PriorityFlag::set_flag(Process& self, Word item) {
  const Descriptor& d = lock_->desc(self, item);
  Word v = lock_->variant_ == Variant::Known ? Word::integer(lock_->draw_priority(self, item.as_handle()))
                                             : Word::tbd();
  co_await self.write(d.priority, v);
  marker(self, EventKind::Reveal, item.as_handle(), v);
}

Task<void> TryLock::PriorityFlag::clear_flag(Process& self, Word item) {
  co_await self.write(lock_->desc(self, item).priority, kNoPriority);
}

Task<bool> TryLock::PriorityFlag::get_flag(Process& self, Word item) {
  Word v = co_await self.read(lock_->desc(self, item).priority);
  if (v.is_tbd()) co_return lock_->variant_ == Variant::Adaptive;
  co_return v.is_int() && v.as_int() > 0;
}

/// The initiator's setFlag: delays so that the reveal lands on a fixed step
/// of the attempt, then reveals.
class TryLock::RevealFlag final : public TryLock::PriorityFlag {
 public:
  RevealFlag(const TryLock& lock, std::uint64_t start) : PriorityFlag(lock), start_(start) {}

  Task<void> set_flag(Process& self, Word item) override {
    const TryLock& L = *lock_;
    if (L.variant_ == Variant::Known) {
      if (!L.measure_only_) co_await self.delay_until(start_ + L.config_.t0() - 1);
    } else {
      std::uint64_t k = self.steps() - start_ + 1;
      co_await self.delay_until(start_ + next_power_of_two(k) - 1);
    }
    co_await PriorityFlag::set_flag(self, item);
    reveal_step = self.steps();
  }

  std::uint64_t reveal_step = 0;

 private:
  std::uint64_t start_;
};

// ---- status transitions ----

Task<void> TryLock::decide(Process& self, Word d) const {
  if (co_await self.cas(desc(self, d).status, kActive, Word::status(Status::Won)))
    marker(self, EventKind::StatusChange, d.as_handle(), Word::status(Status::Won));
}

Task<void> TryLock::eliminate(Process& self, Word d) const {
  if (co_await self.cas(desc(self, d).status, kActive, Word::status(Status::Lost)))
    marker(self, EventKind::StatusChange, d.as_handle(), Word::status(Status::Lost));
}

Task<Status> TryLock::celebrate_if_won(Process& self, Word d) const {
  const Descriptor& D = desc(self, d);
  Word s = co_await self.read(D.status);
  if (s.as_status() == Status::Won) co_await run_thunk(self, D.thunk);
  co_return s.as_status();
}

// ---- run ----

Task<void> TryLock::compete(Process& self, Word d, const std::vector<Word>& set) const {
  const Descriptor& D = desc(self, d);
  for (const Word& other : set) {
    Word their_status = co_await self.read(desc(self, other).status);
    if (their_status == kActive && other != d) {
      Word mine = co_await self.read(D.priority);
      Word theirs = co_await self.read(desc(self, other).priority);
      // A contender still at TBD has no order yet; its own run covers it.
      if (!mine.is_tbd() && !theirs.is_tbd()) {
        if (mine.as_int() > theirs.as_int())
          co_await eliminate(self, other);
        else
          co_await eliminate(self, d);
      }
    }
    co_await celebrate_if_won(self, other);
  }
}

Task<Status> TryLock::run(Process& self, Word d) const {
  const Descriptor& D = desc(self, d);
  PriorityFlag flags(*this);
  for (LockId l : D.locks) {
    std::vector<Word> set = co_await get_set_filtered(self, registry_->at(l), flags);
    if (co_await self.read(D.status) == kActive) co_await compete(self, d, set);
  }
  co_await decide(self, d);
  co_return co_await celebrate_if_won(self, d);
}

Task<TryLock::AdaptiveOutcome> TryLock::run_adaptive(Process& self, Word d) const {
  const Descriptor& D = desc(self, d);
  PriorityFlag flags(*this);
  std::vector<std::vector<Word>> sets;
  std::uint64_t contenders = 0;
  for (LockId l : D.locks) {
    sets.push_back(co_await get_set_filtered(self, registry_->at(l), flags));
    contenders += sets.back().size();
  }
  std::int64_t draw = draw_priority(self, d.as_handle());
  if (co_await self.cas(D.priority, Word::tbd(), Word::integer(draw)))
    marker(self, EventKind::PriorityReveal, d.as_handle(), Word::integer(draw));
  for (const auto& set : sets)
    if (co_await self.read(D.status) == kActive) co_await compete(self, d, set);
  co_await decide(self, d);
  Status s = co_await celebrate_if_won(self, d);
  co_return AdaptiveOutcome{s, contenders};
}

// ---- attempt ----

Task<AttemptResult> TryLock::try_locks(Process& self, std::vector<LockId> locks, SharedThunk thunk,
                                       Word effect) const {
  if (locks.empty()) throw ConfigError("an attempt needs at least one lock");
  if (variant_ == Variant::Known && locks.size() > config_.max_locks)
    throw ConfigError("attempt names " + std::to_string(locks.size()) + " locks, more than L=" +
                      std::to_string(config_.max_locks));
  if (std::set<LockId>(locks.begin(), locks.end()).size() != locks.size())
    throw ConfigError("attempt names a lock twice");
  Collection coll = collection(locks);

  AttemptResult res;
  res.start_step = self.steps();
  CellId priority = self.alloc_cell(kNoPriority);
  CellId status = self.alloc_cell(kActive);
  std::vector<Word> ids;
  for (LockId l : locks) ids.push_back(Word::integer(l));
  Handle tag = thunk.tag;
  res.descriptor = self.publish(std::make_unique<Descriptor>(locks, std::move(thunk), priority, status));
  Word d = Word::handle(res.descriptor);
  marker(self, EventKind::AttemptStart, res.descriptor, effect, Word::handle(tag), ids);

  // Help everything already revealed on our locks out of the way.
  {
    PriorityFlag flags(*this);
    for (LockId l : locks) {
      std::vector<Word> set = co_await get_set_filtered(self, registry_->at(l), flags);
      for (const Word& other : set) {
        if (variant_ == Variant::Known)
          co_await run(self, other);
        else
          co_await run_adaptive(self, other);
      }
    }
  }

  RevealFlag reveal(*this, res.start_step);
  Membership m = co_await multi_insert(self, d, coll, reveal);
  res.reveal_step = reveal.reveal_step;

  Status final_status;
  if (variant_ == Variant::Known) {
    final_status = co_await run(self, d);
  } else {
    AdaptiveOutcome o = co_await run_adaptive(self, d);
    final_status = o.status;
    res.contenders = o.contenders;
  }
  co_await multi_remove(self, m, coll, reveal);

  if (!measure_only_) {
    std::uint64_t target = variant_ == Variant::Known
                               ? res.reveal_step + config_.t1()
                               : adaptive_post_delay_target(res.reveal_step, res.contenders,
                                                            checked_mul(config_.c_prime, config_.thunk_ticks));
    co_await self.delay_until(target);
  }
  res.end_step = self.steps();
  res.won = final_status == Status::Won;
  marker(self, EventKind::AttemptEnd, res.descriptor, Word::integer(static_cast<std::int64_t>(res.contenders)),
         {}, {}, res.won);
  co_return res;
}

}  // namespace wfl
