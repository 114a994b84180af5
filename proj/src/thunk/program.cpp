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

#include "thunk/program.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace wfl {

namespace {

const std::map<std::string, ThunkOp>& op_names() {
  static const std::map<std::string, ThunkOp> m{
      {"lll", ThunkOp::Lll}, {"lsc", ThunkOp::Lsc}, {"mov", ThunkOp::Mov},
      {"add", ThunkOp::Add}, {"sub", ThunkOp::Sub}, {"eq", ThunkOp::Eq},
      {"ne", ThunkOp::Ne},   {"and", ThunkOp::And}, {"or", ThunkOp::Or},
      {"camguard", ThunkOp::CamGuard},
  };
  return m;
}

std::string reg_str(int r) { return r < 0 ? "_" : "r" + std::to_string(r); }

std::string operand_str(const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::Reg: return reg_str(static_cast<int>(o.v));
    case Operand::Kind::Imm: return std::to_string(o.v);
    case Operand::Kind::None: break;
  }
  return "?";
}

bool reg_ok(int r, int regs) { return r >= 0 && r < regs; }
bool operand_ok(const Operand& o, int regs) {
  return o.kind == Operand::Kind::Imm || (o.is_reg() && reg_ok(static_cast<int>(o.v), regs));
}

}  // namespace

const char* to_string(ThunkOp op) {
  for (const auto& [name, o] : op_names())
    if (o == op) return name.c_str();
  return "?";
}

ThunkProgram ThunkProgram::make_unchecked(int regs, int params, int spill,
                                          std::vector<Capsule> capsules) {
  ThunkProgram p;
  p.regs_ = regs;
  p.params_ = params;
  p.spill_ = spill;
  p.capsules_ = std::move(capsules);
  return p;
}

ThunkProgram ThunkProgram::make(int regs, int params, int spill, std::vector<Capsule> capsules) {
  auto p = make_unchecked(regs, params, spill, std::move(capsules));
  if (auto why = validate(p); !why.empty()) throw ConfigError("invalid thunk program: " + why);
  return p;
}

std::size_t ThunkProgram::lsc_sites() const {
  std::size_t n = 0;
  for (const auto& c : capsules_)
    for (const auto& i : c) n += i.op == ThunkOp::Lsc;
  return n;
}

std::string validate(const ThunkProgram& p) {
  if (p.regs() < 1) return "needs at least one register";
  if (p.params() < 0 || p.spill() < 0) return "negative param or spill count";
  if (p.capsules().empty()) return "no capsules";
  // label_of[r] = cell whose label register r holds, or -1.
  std::vector<int> label_of(p.regs(), -1);
  for (std::size_t ci = 0; ci < p.size(); ++ci) {
    const Capsule& cap = p.capsules()[ci];
    std::string where = "capsule " + std::to_string(ci) + ": ";
    bool in_batch = true;
    std::set<int> batch_cells;
    for (const Instr& in : cap) {
      auto set_reg = [&](int r) {
        if (r >= 0) label_of[r] = -1;
      };
      if (in.op != ThunkOp::Lsc) in_batch = false;
      switch (in.op) {
        case ThunkOp::Lll:
          if (in.param < 0 || in.param >= p.cells()) return where + "lll param out of range";
          if (in.dst >= 0 && !reg_ok(in.dst, p.regs())) return where + "lll value register out of range";
          if (in.dst2 >= 0 && !reg_ok(in.dst2, p.regs())) return where + "lll label register out of range";
          if (in.dst >= 0 && in.dst == in.dst2) return where + "lll value and label share a register";
          set_reg(in.dst);
          if (in.dst2 >= 0) label_of[in.dst2] = in.param;
          break;
        case ThunkOp::Lsc: {
          if (!in_batch) return where + "lsc after a non-lsc instruction";
          if (ci == 0) return where + "lsc in the first capsule has no saved label";
          if (in.param < 0 || in.param >= p.cells()) return where + "lsc param out of range";
          if (!batch_cells.insert(in.param).second) return where + "two lscs on one cell in a batch";
          if (!in.x.is_reg() || !reg_ok(static_cast<int>(in.x.v), p.regs()))
            return where + "lsc label must be a register";
          if (label_of[in.x.v] != in.param)
            return where + "lsc label register does not hold a label of @" + std::to_string(in.param);
          if (!operand_ok(in.y, p.regs())) return where + "lsc value operand invalid";
          if (in.guard >= 0 && !reg_ok(in.guard, p.regs())) return where + "lsc guard out of range";
          break;
        }
        case ThunkOp::Mov:
          if (!reg_ok(in.dst, p.regs()) || !operand_ok(in.x, p.regs())) return where + "bad mov";
          set_reg(in.dst);
          break;
        case ThunkOp::CamGuard:
          if (!reg_ok(in.dst, p.regs()) || !operand_ok(in.x, p.regs()) ||
              !operand_ok(in.y, p.regs()) || !operand_ok(in.z, p.regs()))
            return where + "bad camguard";
          set_reg(in.dst);
          break;
        default:
          if (!reg_ok(in.dst, p.regs()) || !operand_ok(in.x, p.regs()) || !operand_ok(in.y, p.regs()))
            return where + "bad " + to_string(in.op);
          set_reg(in.dst);
          break;
      }
    }
  }
  return "";
}

std::string ThunkProgram::str() const {
  std::ostringstream o;
  o << "thunk regs=" << regs_ << " params=" << params_ << " spill=" << spill_ << "\n";
  for (const auto& cap : capsules_) {
    o << "capsule\n";
    for (const auto& in : cap) {
      o << "  " << to_string(in.op);
      switch (in.op) {
        case ThunkOp::Lll:
          o << ' ' << reg_str(in.dst) << ' ' << reg_str(in.dst2) << " @" << in.param;
          break;
        case ThunkOp::Lsc:
          o << " @" << in.param << ' ' << operand_str(in.x) << ' ' << operand_str(in.y);
          if (in.guard >= 0) o << " if " << reg_str(in.guard);
          break;
        case ThunkOp::Mov:
          o << ' ' << reg_str(in.dst) << ' ' << operand_str(in.x);
          break;
        case ThunkOp::CamGuard:
          o << ' ' << reg_str(in.dst) << ' ' << operand_str(in.x) << ' ' << operand_str(in.y) << ' '
            << operand_str(in.z);
          break;
        default:
          o << ' ' << reg_str(in.dst) << ' ' << operand_str(in.x) << ' ' << operand_str(in.y);
          break;
      }
      o << "\n";
    }
  }
  return o.str();
}

ThunkProgram ThunkProgram::parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ThunkProgram ThunkProgram::parse(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) -> ConfigError {
    return ConfigError("thunk text line " + std::to_string(lineno) + ": " + why);
  };
  auto parse_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(s, &used);
      if (used != s.size()) throw fail("bad number '" + s + "'");
      return static_cast<std::int64_t>(v);
    } catch (const std::logic_error&) {
      throw fail("bad number '" + s + "'");
    }
  };
  auto parse_reg = [&](const std::string& s, bool allow_none) {
    if (allow_none && s == "_") return -1;
    if (s.size() < 2 || s[0] != 'r') throw fail("expected a register, got '" + s + "'");
    return static_cast<int>(parse_int(s.substr(1)));
  };
  auto parse_param = [&](const std::string& s) {
    if (s.size() < 2 || s[0] != '@') throw fail("expected a param, got '" + s + "'");
    return static_cast<int>(parse_int(s.substr(1)));
  };
  auto parse_operand = [&](const std::string& s) {
    if (!s.empty() && s[0] == 'r') return Operand::reg(parse_reg(s, false));
    return Operand::imm(parse_int(s));
  };

  bool header = false;
  int regs = 0, params = 0, spill = 0;
  std::vector<Capsule> caps;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (!header) {
      if (tok[0] != "thunk") throw fail("expected 'thunk regs=.. params=.. spill=..'");
      regs = ThunkProgram::kDefaultRegs;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        auto eq = tok[i].find('=');
        if (eq == std::string::npos) throw fail("bad header field '" + tok[i] + "'");
        auto key = tok[i].substr(0, eq);
        auto v = static_cast<int>(parse_int(tok[i].substr(eq + 1)));
        if (key == "regs") regs = v;
        else if (key == "params") params = v;
        else if (key == "spill") spill = v;
        else throw fail("unknown header field '" + key + "'");
      }
      header = true;
      continue;
    }
    if (tok[0] == "capsule") {
      if (tok.size() != 1) throw fail("'capsule' takes no operands");
      caps.emplace_back();
      continue;
    }
    if (tok[0] == "cas") throw fail("cas with a return value is not allowed in a thunk; use a cam");
    auto it = op_names().find(tok[0]);
    if (it == op_names().end()) throw fail("unknown opcode '" + tok[0] + "'");
    if (caps.empty()) throw fail("instruction before the first 'capsule'");
    Instr in;
    in.op = it->second;
    auto want = [&](std::size_t n) {
      if (tok.size() != n) throw fail(tok[0] + " expects " + std::to_string(n - 1) + " operands");
    };
    switch (in.op) {
      case ThunkOp::Lll:
        want(4);
        in.dst = parse_reg(tok[1], true);
        in.dst2 = parse_reg(tok[2], true);
        in.param = parse_param(tok[3]);
        break;
      case ThunkOp::Lsc:
        if (tok.size() == 6 && tok[4] == "if") {
          in.guard = parse_reg(tok[5], false);
        } else {
          want(4);
        }
        in.param = parse_param(tok[1]);
        in.x = Operand::reg(parse_reg(tok[2], false));
        in.y = parse_operand(tok[3]);
        break;
      case ThunkOp::Mov:
        want(3);
        in.dst = parse_reg(tok[1], false);
        in.x = parse_operand(tok[2]);
        break;
      case ThunkOp::CamGuard:
        want(5);
        in.dst = parse_reg(tok[1], false);
        in.x = parse_operand(tok[2]);
        in.y = parse_operand(tok[3]);
        in.z = parse_operand(tok[4]);
        break;
      default:
        want(4);
        in.dst = parse_reg(tok[1], false);
        in.x = parse_operand(tok[2]);
        in.y = parse_operand(tok[3]);
        break;
    }
    caps.back().push_back(in);
  }
  if (!header) throw ConfigError("thunk text: missing header");
  return ThunkProgram::make(regs, params, spill, std::move(caps));
}

ThunkBuilder::ThunkBuilder(int regs, int params, int spill)
    : regs_(regs), params_(params), spill_(spill), capsules_(1),
      used_as_(static_cast<std::size_t>(std::max(0, params + spill)), 0) {}

void ThunkBuilder::flush() {
  Capsule next;
  for (auto& p : pending_) next.push_back(p.lsc);
  pending_.clear();
  capsules_.push_back(std::move(next));
}

ThunkBuilder& ThunkBuilder::boundary() {
  flush();
  return *this;
}

void ThunkBuilder::touch(int param) {
  for (const auto& p : pending_)
    if (p.lsc.param == param) {
      flush();
      return;
    }
}

void ThunkBuilder::local(Instr i) {
  // Overwriting a register a queued lsc still reads would change what the
  // lsc writes; start the next capsule first.
  for (const auto& p : pending_) {
    const Instr& l = p.lsc;
    if ((l.x.is_reg() && l.x.v == i.dst) || (l.y.is_reg() && l.y.v == i.dst) ||
        (i.dst >= 0 && l.guard == i.dst) || (i.dst2 >= 0 && l.x.v == i.dst2) ||
        (i.dst2 >= 0 && l.y.is_reg() && l.y.v == i.dst2) || (i.dst2 >= 0 && l.guard == i.dst2)) {
      flush();
      break;
    }
  }
  capsules_.back().push_back(i);
}

ThunkBuilder& ThunkBuilder::sim_read(int dst, int param) {
  touch(param);
  Instr i;
  i.op = ThunkOp::Lll;
  i.dst = dst;
  i.param = param;
  local(i);
  return *this;
}

namespace {
void mark(std::vector<std::uint8_t>& used, int param, std::uint8_t kind) {
  if (param < 0 || static_cast<std::size_t>(param) >= used.size())
    throw ConfigError("thunk param @" + std::to_string(param) + " out of range");
  if (used[param] != 0 && used[param] != kind)
    throw ConfigError("thunk mixes writes and cams on @" + std::to_string(param));
  used[param] = kind;
}
}  // namespace

ThunkBuilder& ThunkBuilder::sim_write(int param, Operand value, int label_reg) {
  mark(used_as_, param, 1);
  touch(param);
  Instr l;
  l.op = ThunkOp::Lll;
  l.dst2 = label_reg;
  l.param = param;
  local(l);
  Instr s;
  s.op = ThunkOp::Lsc;
  s.param = param;
  s.x = Operand::reg(label_reg);
  s.y = value;
  pending_.push_back({s});
  return *this;
}

ThunkBuilder& ThunkBuilder::sim_cam(int param, Operand old_v, Operand new_v, int val_reg,
                                    int label_reg, int guard_reg) {
  mark(used_as_, param, 2);
  touch(param);
  Instr l;
  l.op = ThunkOp::Lll;
  l.dst = val_reg;
  l.dst2 = label_reg;
  l.param = param;
  local(l);
  Instr g;
  g.op = ThunkOp::CamGuard;
  g.dst = guard_reg;
  g.x = Operand::reg(val_reg);
  g.y = old_v;
  g.z = new_v;
  local(g);
  Instr s;
  s.op = ThunkOp::Lsc;
  s.param = param;
  s.x = Operand::reg(label_reg);
  s.y = new_v;
  s.guard = guard_reg;
  pending_.push_back({s});
  return *this;
}

void ThunkBuilder::sim_cas(int, Operand, Operand, int) {
  throw ConfigError("cas with a return value is not allowed in a thunk; use a cam");
}

namespace {
Instr binop(ThunkOp op, int dst, Operand x, Operand y) {
  Instr i;
  i.op = op;
  i.dst = dst;
  i.x = x;
  i.y = y;
  return i;
}
}  // namespace

ThunkBuilder& ThunkBuilder::mov(int dst, Operand x) {
  local(binop(ThunkOp::Mov, dst, x, {}));
  return *this;
}
ThunkBuilder& ThunkBuilder::add(int dst, Operand x, Operand y) {
  local(binop(ThunkOp::Add, dst, x, y));
  return *this;
}
ThunkBuilder& ThunkBuilder::sub(int dst, Operand x, Operand y) {
  local(binop(ThunkOp::Sub, dst, x, y));
  return *this;
}
ThunkBuilder& ThunkBuilder::eq(int dst, Operand x, Operand y) {
  local(binop(ThunkOp::Eq, dst, x, y));
  return *this;
}

ThunkProgram ThunkBuilder::build() {
  if (!pending_.empty()) flush();
  auto caps = capsules_;
  // A trailing empty capsule adds nothing.
  while (caps.size() > 1 && caps.back().empty()) caps.pop_back();
  return ThunkProgram::make(regs_, params_, spill_, std::move(caps));
}

}  // namespace wfl
