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
#include <stdexcept>
#include <string>

namespace wfl {

using ProcId = std::uint32_t;
using Tick = std::uint64_t;

/// Strong id for a simulated shared-memory cell.
struct CellId {
  std::uint32_t index = UINT32_MAX;

  constexpr bool valid() const { return index != UINT32_MAX; }
  friend constexpr bool operator==(CellId, CellId) = default;
  friend constexpr auto operator<=>(CellId, CellId) = default;
};

/// Strong id for an immutable heap record (cons node, context snapshot,
/// descriptor, item).
struct Handle {
  std::uint32_t index = UINT32_MAX;

  constexpr bool valid() const { return index != UINT32_MAX; }
  friend constexpr bool operator==(Handle, Handle) = default;
  friend constexpr auto operator<=>(Handle, Handle) = default;
};

enum class Status : std::int64_t { Active = 0, Won = 1, Lost = 2 };

const char* to_string(Status s);

/// Tagged shared-memory word. Equality is tagged equality, so a null owner,
/// a -1 priority and the TBD marker never compare equal to each other.
class Word {
 public:
  enum class Tag : std::uint8_t { Null = 0, Int = 1, Handle = 2, Status = 3, Tbd = 4 };

  constexpr Word() = default;

  static constexpr Word null() { return Word{}; }
  static constexpr Word integer(std::int64_t v) { return Word{Tag::Int, v}; }
  static constexpr Word handle(Handle h) { return Word{Tag::Handle, h.index}; }
  static constexpr Word status(Status s) { return Word{Tag::Status, static_cast<std::int64_t>(s)}; }
  static constexpr Word tbd() { return Word{Tag::Tbd, 0}; }
  static constexpr Word raw(Tag t, std::int64_t bits) { return Word{t, bits}; }

  constexpr Tag tag() const { return tag_; }
  constexpr std::int64_t bits() const { return bits_; }

  constexpr bool is_null() const { return tag_ == Tag::Null; }
  constexpr bool is_int() const { return tag_ == Tag::Int; }
  constexpr bool is_handle() const { return tag_ == Tag::Handle; }
  constexpr bool is_status() const { return tag_ == Tag::Status; }
  constexpr bool is_tbd() const { return tag_ == Tag::Tbd; }

  std::int64_t as_int() const {
    if (tag_ != Tag::Int) throw std::logic_error("word is not an integer: " + str());
    return bits_;
  }
  wfl::Handle as_handle() const {
    if (tag_ != Tag::Handle) throw std::logic_error("word is not a handle: " + str());
    return wfl::Handle{static_cast<std::uint32_t>(bits_)};
  }
  wfl::Status as_status() const {
    if (tag_ != Tag::Status) throw std::logic_error("word is not a status: " + str());
    return static_cast<wfl::Status>(bits_);
  }

  /// Compact token used by the text history format: n, i<v>, h<v>, s<v>, t.
  std::string str() const;
  static Word parse(const std::string& token);

  friend constexpr bool operator==(const Word&, const Word&) = default;

 private:
  constexpr Word(Tag t, std::int64_t b) : tag_(t), bits_(b) {}

  Tag tag_ = Tag::Null;
  std::int64_t bits_ = 0;
};

/// Version label returned by lll. Carries the cell it was read from so that
/// lsc can reject foreign labels.
struct Label {
  CellId cell;
  std::uint64_t version = 0;

  friend constexpr bool operator==(const Label&, const Label&) = default;
};

struct LabeledValue {
  Word value;
  Label label;
};

/// Raised when the simulated program misuses the memory model (foreign lsc
/// label, unallocated cell). Always a harness or algorithm bug.
class SimFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a computed delay target is already behind the process's step
/// counter, i.e. a delay constant was too small.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bad user-supplied configuration; detected before any shared step.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace wfl
