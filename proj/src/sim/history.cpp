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

#include "sim/history.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace wfl {

const char* to_string(Status s) {
  switch (s) {
    case Status::Active: return "active";
    case Status::Won: return "won";
    case Status::Lost: return "lost";
  }
  return "?";
}

std::string Word::str() const {
  switch (tag_) {
    case Tag::Null: return "n";
    case Tag::Int: return "i" + std::to_string(bits_);
    case Tag::Handle: return "h" + std::to_string(bits_);
    case Tag::Status: return "s" + std::to_string(bits_);
    case Tag::Tbd: return "t";
  }
  return "?";
}

Word Word::parse(const std::string& token) {
  if (token == "n") return Word::null();
  if (token == "t") return Word::tbd();
  if (token.size() < 2) throw std::invalid_argument("bad word token '" + token + "'");
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data() + 1, token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw std::invalid_argument("bad word token '" + token + "'");
  switch (token[0]) {
    case 'i': return Word::integer(v);
    case 'h': return Word::raw(Tag::Handle, v);
    case 's': return Word::raw(Tag::Status, v);
    default: throw std::invalid_argument("bad word token '" + token + "'");
  }
}

namespace {

constexpr std::array<const char*, 12> kKindNames = {
    "mem", "local", "delay", "thunk", "invoke", "respond",
    "start", "reveal", "prio", "status", "end", "warn"};
constexpr std::array<const char*, 8> kMemOpNames = {
    "-", "read", "write", "cas", "cam", "lll", "lsc", "mcam"};
constexpr std::array<const char*, 11> kObjOpNames = {
    "-", "as.insert", "as.remove", "as.getset", "mas.insert", "mas.remove",
    "mas.getset", "thunk.run", "sim.read", "sim.write", "sim.cam"};

template <std::size_t N>
int lookup(const std::array<const char*, N>& names, const std::string& s) {
  for (std::size_t i = 0; i < N; ++i)
    if (s == names[i]) return static_cast<int>(i);
  return -1;
}

bool op_is_named(EventKind k) {
  return k == EventKind::MemOp || k == EventKind::OpInvoke || k == EventKind::OpResponse;
}

std::string op_token(const Event& e) {
  if (e.kind == EventKind::MemOp && e.op < kMemOpNames.size()) return kMemOpNames[e.op];
  if ((e.kind == EventKind::OpInvoke || e.kind == EventKind::OpResponse) &&
      e.op < kObjOpNames.size())
    return kObjOpNames[e.op];
  return std::to_string(e.op);
}

constexpr char kMagic[8] = {'W', 'F', 'L', 'H', 'I', 'S', 'T', '\0'};

template <class T>
void put(std::ostream& out, T v) {
  std::array<char, sizeof(T)> buf;
  std::memcpy(buf.data(), &v, sizeof(T));
  out.write(buf.data(), buf.size());
}

template <class T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> buf;
  if (!in.read(buf.data(), buf.size())) throw HistoryFormatError("binary history truncated");
  T v;
  std::memcpy(&v, buf.data(), sizeof(T));
  return v;
}

void put_word(std::ostream& out, const Word& w) {
  put<std::uint8_t>(out, static_cast<std::uint8_t>(w.tag()));
  put<std::int64_t>(out, w.bits());
}

Word get_word(std::istream& in) {
  auto tag = get<std::uint8_t>(in);
  auto bits = get<std::int64_t>(in);
  if (tag > static_cast<std::uint8_t>(Word::Tag::Tbd)) throw HistoryFormatError("bad word tag");
  return Word::raw(static_cast<Word::Tag>(tag), bits);
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  auto n = get<std::uint32_t>(in);
  if (n > (1u << 24)) throw HistoryFormatError("binary history string too long");
  std::string s(n, '\0');
  if (n && !in.read(s.data(), n)) throw HistoryFormatError("binary history truncated");
  return s;
}

}  // namespace

const char* to_string(EventKind k) {
  auto i = static_cast<std::size_t>(k);
  return i < kKindNames.size() ? kKindNames[i] : "?";
}
const char* to_string(MemOpKind k) {
  auto i = static_cast<std::size_t>(k);
  return i < kMemOpNames.size() ? kMemOpNames[i] : "?";
}
const char* to_string(ObjOp k) {
  auto i = static_cast<std::size_t>(k);
  return i < kObjOpNames.size() ? kObjOpNames[i] : "?";
}

void History::write_text(std::ostream& out) const {
  out << kTextSchema << '\n';
  for (const auto& [k, v] : meta_) out << "meta " << k << '=' << v << '\n';
  out << "truncated " << (truncated_ ? 1 : 0) << '\n';
  out << "events " << events_.size() << '\n';
  for (const auto& e : events_) {
    out << e.tick << ' ' << e.proc << ' ' << e.step << ' ' << to_string(e.kind) << ' '
        << op_token(e) << ' ' << e.thunk << ' ' << e.obj << ' ' << e.a.str() << ' '
        << e.b.str() << ' ' << e.c.str() << ' ' << e.label << ' ' << (e.ok ? 1 : 0) << ' '
        << e.list.size();
    for (const auto& w : e.list) out << ' ' << w.str();
    out << '\n';
  }
}

History History::read_text(std::istream& in) {
  History h;
  std::string line;
  if (!std::getline(in, line)) throw HistoryFormatError("empty history file");
  if (line != kTextSchema)
    throw HistoryFormatError("unsupported history schema '" + line + "' (expected " +
                             kTextSchema + ")");
  std::size_t expected = 0;
  bool have_count = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!have_count) {
      if (line.rfind("meta ", 0) == 0) {
        auto eq = line.find('=');
        if (eq == std::string::npos) throw HistoryFormatError("bad meta line " + std::to_string(lineno));
        h.meta_[line.substr(5, eq - 5)] = line.substr(eq + 1);
        continue;
      }
      if (line.rfind("truncated ", 0) == 0) {
        h.truncated_ = line.substr(10) == "1";
        continue;
      }
      if (line.rfind("events ", 0) == 0) {
        expected = std::stoull(line.substr(7));
        have_count = true;
        h.events_.reserve(expected);
        continue;
      }
      throw HistoryFormatError("unexpected header line " + std::to_string(lineno));
    }
    std::istringstream ls(line);
    Event e;
    std::string kind, op, a, b, c;
    int ok = 0;
    std::size_t n = 0;
    if (!(ls >> e.tick >> e.proc >> e.step >> kind >> op >> e.thunk >> e.obj >> a >> b >> c >>
          e.label >> ok >> n))
      throw HistoryFormatError("malformed event on line " + std::to_string(lineno));
    int k = lookup(kKindNames, kind);
    if (k < 0) throw HistoryFormatError("unknown event kind '" + kind + "' on line " + std::to_string(lineno));
    e.kind = static_cast<EventKind>(k);
    if (op_is_named(e.kind)) {
      int o = e.kind == EventKind::MemOp ? lookup(kMemOpNames, op) : lookup(kObjOpNames, op);
      if (o < 0) throw HistoryFormatError("unknown op '" + op + "' on line " + std::to_string(lineno));
      e.op = static_cast<std::uint8_t>(o);
    } else {
      e.op = static_cast<std::uint8_t>(std::stoi(op));
    }
    try {
      e.a = Word::parse(a);
      e.b = Word::parse(b);
      e.c = Word::parse(c);
      e.ok = ok != 0;
      e.list.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::string w;
        if (!(ls >> w)) throw HistoryFormatError("short list");
        e.list.push_back(Word::parse(w));
      }
    } catch (const std::invalid_argument& ex) {
      throw HistoryFormatError(std::string(ex.what()) + " on line " + std::to_string(lineno));
    }
    h.events_.push_back(std::move(e));
  }
  if (!have_count) throw HistoryFormatError("missing events header");
  if (h.events_.size() != expected)
    throw HistoryFormatError("event count mismatch: header says " + std::to_string(expected) +
                             ", found " + std::to_string(h.events_.size()));
  return h;
}

void History::write_binary(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(meta_.size()));
  for (const auto& [k, v] : meta_) {
    put_string(out, k);
    put_string(out, v);
  }
  put<std::uint8_t>(out, truncated_ ? 1 : 0);
  put<std::uint64_t>(out, events_.size());
  for (const auto& e : events_) {
    put<std::uint64_t>(out, e.tick);
    put<std::uint32_t>(out, e.proc);
    put<std::uint64_t>(out, e.step);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(e.kind));
    put<std::uint8_t>(out, e.op);
    put<std::int64_t>(out, e.thunk);
    put<std::int64_t>(out, e.obj);
    put_word(out, e.a);
    put_word(out, e.b);
    put_word(out, e.c);
    put<std::uint64_t>(out, e.label);
    put<std::uint8_t>(out, e.ok ? 1 : 0);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.list.size()));
    for (const auto& w : e.list) put_word(out, w);
  }
}

History History::read_binary(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw HistoryFormatError("not a binary history (bad magic)");
  auto version = get<std::uint32_t>(in);
  if (version != kBinaryVersion)
    throw HistoryFormatError("unsupported binary history version " + std::to_string(version) +
                             " (expected " + std::to_string(kBinaryVersion) + ")");
  History h;
  auto nmeta = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < nmeta; ++i) {
    auto k = get_string(in);
    h.meta_[k] = get_string(in);
  }
  h.truncated_ = get<std::uint8_t>(in) != 0;
  auto n = get<std::uint64_t>(in);
  h.events_.reserve(std::min<std::uint64_t>(n, 1u << 20));
  for (std::uint64_t i = 0; i < n; ++i) {
    Event e;
    e.tick = get<std::uint64_t>(in);
    e.proc = get<std::uint32_t>(in);
    e.step = get<std::uint64_t>(in);
    auto kind = get<std::uint8_t>(in);
    if (kind >= kKindNames.size()) throw HistoryFormatError("bad event kind in binary history");
    e.kind = static_cast<EventKind>(kind);
    e.op = get<std::uint8_t>(in);
    e.thunk = get<std::int64_t>(in);
    e.obj = get<std::int64_t>(in);
    e.a = get_word(in);
    e.b = get_word(in);
    e.c = get_word(in);
    e.label = get<std::uint64_t>(in);
    e.ok = get<std::uint8_t>(in) != 0;
    auto len = get<std::uint32_t>(in);
    e.list.reserve(len);
    for (std::uint32_t j = 0; j < len; ++j) e.list.push_back(get_word(in));
    h.events_.push_back(std::move(e));
  }
  return h;
}

History History::read_any(std::istream& in) {
  char first = static_cast<char>(in.peek());
  if (first == kMagic[0]) return read_binary(in);
  return read_text(in);
}

void History::save(const std::string& path, bool binary) const {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (binary)
    write_binary(out);
  else
    write_text(out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

History History::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open history file '" + path + "'");
  return read_any(in);
}

std::string check_well_formed(const History& h) {
  std::unordered_map<ProcId, std::uint64_t> steps;
  std::unordered_map<ProcId, std::vector<std::pair<std::uint8_t, std::int64_t>>> open;
  Tick last_step_tick = 0;
  Tick last_tick = 0;
  bool any_step = false;
  for (std::size_t i = 0; i < h.events().size(); ++i) {
    const auto& e = h.events()[i];
    auto where = " (event " + std::to_string(i) + ")";
    if (e.tick < last_tick) return "ticks decrease" + where;
    last_tick = e.tick;
    auto& s = steps[e.proc];
    if (is_step(e.kind)) {
      if (any_step && e.tick <= last_step_tick) return "step ticks not strictly increasing" + where;
      any_step = true;
      last_step_tick = e.tick;
      if (e.step != s + 1) return "step count does not advance by one" + where;
      s = e.step;
    } else if (e.step != s) {
      return "marker step count disagrees with process counter" + where;
    }
    if (e.kind == EventKind::OpInvoke) {
      open[e.proc].emplace_back(e.op, e.obj);
    } else if (e.kind == EventKind::OpResponse) {
      auto& stack = open[e.proc];
      if (stack.empty() || stack.back() != std::make_pair(e.op, e.obj))
        return "response without matching invocation" + where;
      stack.pop_back();
    }
  }
  return {};
}

}  // namespace wfl
