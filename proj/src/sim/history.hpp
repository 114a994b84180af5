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
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sim/word.hpp"

namespace wfl {

// Step events occupy one tick of their process. Everything else is a
// zero-width marker that carries the tick and step count at which it was
// emitted.
enum class EventKind : std::uint8_t {
  MemOp = 0,
  Local = 1,
  Delay = 2,
  ThunkStep = 3,
  OpInvoke = 4,
  OpResponse = 5,
  AttemptStart = 6,
  Reveal = 7,
  PriorityReveal = 8,
  StatusChange = 9,
  AttemptEnd = 10,
  Warning = 11,
};

constexpr bool is_step(EventKind k) {
  return k == EventKind::MemOp || k == EventKind::Local || k == EventKind::Delay ||
         k == EventKind::ThunkStep;
}

enum class MemOpKind : std::uint8_t { None = 0, Read, Write, Cas, Cam, Lll, Lsc, MCam };

/// Operation tags carried by OpInvoke / OpResponse markers.
enum class ObjOp : std::uint8_t {
  None = 0,
  AsInsert,
  AsRemove,
  AsGetSet,
  MasInsert,
  MasRemove,
  MasGetSet,
  ThunkRun,
  SimRead,
  SimWrite,
  SimCam,
};

enum class WarningCode : std::uint8_t { None = 0, WriteCamRace = 1, LateDelay = 2 };

const char* to_string(EventKind k);
const char* to_string(MemOpKind k);
const char* to_string(ObjOp k);

/// One history record. Field meaning depends on `kind`:
///   MemOp        op=MemOpKind, obj=cell, a/b=arguments, c=value after (or
///                value read), label=cell version after the op, ok=success
///   Local        op=local code, a/b operands
///   ThunkStep    a local instruction executed inside a thunk, op=opcode
///   Delay        a=target step
///   OpInvoke     op=ObjOp, obj=object id, a/b=arguments, list=collection
///   OpResponse   op=ObjOp, obj=object id, a=result, list=returned items,
///                ok=run finished (thunk runs)
///   AttemptStart obj=descriptor, a=effect cell, b=thunk tag, list=lock ids
///   Reveal       obj=descriptor, a=revealed flag value (priority or TBD)
///   PriorityReveal obj=descriptor, a=priority (adaptive lock only)
///   StatusChange obj=descriptor, a=new status
///   AttemptEnd   obj=descriptor, a=contenders (adaptive), ok=returned value
///   Warning      op=WarningCode, obj=cell
/// `thunk` is the tag of the thunk instance being run, or -1.
struct Event {
  Tick tick = 0;
  ProcId proc = 0;
  std::uint64_t step = 0;
  EventKind kind = EventKind::Local;
  std::uint8_t op = 0;
  std::int64_t thunk = -1;
  std::int64_t obj = -1;
  Word a, b, c;
  std::uint64_t label = 0;
  bool ok = false;
  std::vector<Word> list;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Ordered event log plus free-form metadata (config echo, seeds).
class History {
 public:
  static constexpr const char* kTextSchema = "wflock-history/1";
  static constexpr std::uint32_t kBinaryVersion = 1;

  std::vector<Event>& events() { return events_; }
  const std::vector<Event>& events() const { return events_; }
  std::map<std::string, std::string>& meta() { return meta_; }
  const std::map<std::string, std::string>& meta() const { return meta_; }

  bool truncated() const { return truncated_; }
  void set_truncated(bool t) { truncated_ = t; }

  void append(Event e) { events_.push_back(std::move(e)); }
  std::size_t size() const { return events_.size(); }

  void write_text(std::ostream& out) const;
  void write_binary(std::ostream& out) const;
  /// Both readers throw HistoryFormatError on malformed or mis-versioned input.
  static History read_text(std::istream& in);
  static History read_binary(std::istream& in);
  /// Sniffs the format (binary magic vs text schema line).
  static History read_any(std::istream& in);

  void save(const std::string& path, bool binary) const;
  static History load(const std::string& path);

  friend bool operator==(const History&, const History&) = default;

 private:
  std::vector<Event> events_;
  std::map<std::string, std::string> meta_;
  bool truncated_ = false;
};

class HistoryFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural checks every history must satisfy: step events have strictly
/// increasing ticks, per-process step counts never decrease and grow by
/// exactly one per step event, invocations and responses pair up.
/// Returns a description of the first problem, or empty.
std::string check_well_formed(const History& h);

}  // namespace wfl
