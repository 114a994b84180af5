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
#include <string>
#include <vector>

#include "sim/word.hpp"

namespace wfl {

// Thunk programs are short straight-line register programs split into
// capsules. Registers are the only private state and are saved in the shared
// context at every capsule boundary. Params name shared cells and are
// read-only, so they never need to be saved.

enum class ThunkOp : std::uint8_t {
  Lll = 1,
  Lsc,
  Mov,
  Add,
  Sub,
  Eq,
  Ne,
  And,
  Or,
  CamGuard,  // dst = (new != old && val == old)
};

const char* to_string(ThunkOp op);

struct Operand {
  enum class Kind : std::uint8_t { None, Reg, Imm };
  Kind kind = Kind::None;
  std::int64_t v = 0;

  static Operand reg(int r) { return {Kind::Reg, r}; }
  static Operand imm(std::int64_t x) { return {Kind::Imm, x}; }
  bool is_reg() const { return kind == Kind::Reg; }
  friend bool operator==(const Operand&, const Operand&) = default;
};

/// One instruction. Field use by opcode:
///   lll       dst=value reg, dst2=label reg (or -1), param
///   lsc       param, x=label reg, y=new value, guard=reg or -1
///   mov       dst, x
///   add..or   dst, x, y
///   camguard  dst, x=value, y=old, z=new
struct Instr {
  ThunkOp op = ThunkOp::Mov;
  int dst = -1;
  int dst2 = -1;
  int param = -1;
  int guard = -1;
  Operand x, y, z;

  friend bool operator==(const Instr&, const Instr&) = default;
};

using Capsule = std::vector<Instr>;

/// An idempotent-ready thunk body. Construct through `make` (validated) or
/// the builder; `make_unchecked` exists only for negative test fixtures.
class ThunkProgram {
 public:
  static constexpr int kDefaultRegs = 4;

  /// Throws ConfigError when the program breaks the capsule discipline.
  static ThunkProgram make(int regs, int params, int spill, std::vector<Capsule> capsules);
  static ThunkProgram make_unchecked(int regs, int params, int spill, std::vector<Capsule> capsules);

  int regs() const { return regs_; }
  int params() const { return params_; }
  int spill() const { return spill_; }
  /// Params plus spill cells.
  int cells() const { return params_ + spill_; }
  const std::vector<Capsule>& capsules() const { return capsules_; }
  std::size_t size() const { return capsules_.size(); }

  /// Number of lsc instructions (each is one simulated update site).
  std::size_t lsc_sites() const;

  /// Text form. `parse` throws ConfigError with a line number on bad input.
  std::string str() const;
  static ThunkProgram parse(const std::string& text);
  static ThunkProgram parse(std::istream& in);

  friend bool operator==(const ThunkProgram&, const ThunkProgram&) = default;

 private:
  ThunkProgram() = default;

  int regs_ = kDefaultRegs;
  int params_ = 0;
  int spill_ = 0;
  std::vector<Capsule> capsules_;
};

/// Returns an empty string when the program keeps the capsule discipline:
/// lsc only in the leading batch of a capsule other than the first, on
/// distinct cells, with a label register loaded by an lll in an earlier
/// capsule of the same cell; register and param indices in range.
std::string validate(const ThunkProgram& p);

/// Assembles programs from simulated read / write / cam operations. Each
/// write or cam contributes an lll to the current capsule and queues its lsc
/// for the start of the next one; queued lscs on distinct cells share one
/// boundary.
class ThunkBuilder {
 public:
  explicit ThunkBuilder(int regs = ThunkProgram::kDefaultRegs, int params = 0, int spill = 0);

  ThunkBuilder& sim_read(int dst, int param);
  ThunkBuilder& sim_write(int param, Operand value, int label_reg);
  ThunkBuilder& sim_cam(int param, Operand old_v, Operand new_v, int val_reg, int label_reg,
                        int guard_reg);
  /// Always rejected: a cas result would let helpers diverge.
  [[noreturn]] void sim_cas(int param, Operand old_v, Operand new_v, int dst);

  ThunkBuilder& mov(int dst, Operand x);
  ThunkBuilder& add(int dst, Operand x, Operand y);
  ThunkBuilder& sub(int dst, Operand x, Operand y);
  ThunkBuilder& eq(int dst, Operand x, Operand y);

  /// Forces a capsule boundary (flushes queued lscs into the new capsule).
  ThunkBuilder& boundary();

  ThunkProgram build();

 private:
  struct Pending {
    Instr lsc;
  };
  void local(Instr i);
  void touch(int param);
  void flush();

  int regs_, params_, spill_;
  std::vector<Capsule> capsules_;
  std::vector<Pending> pending_;
  std::vector<std::uint8_t> used_as_;  // per cell: 1 write, 2 cam
};

}  // namespace wfl
