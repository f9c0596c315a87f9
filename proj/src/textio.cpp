/*
 * Copyright 2026 The ccdfg Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ccdfg/textio.hpp"

#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace ccdfg::textio {

std::string_view kind_name(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Syntax:
      return "SyntaxError";
    case ParseError::Kind::Semantic:
      return "SemanticError";
    case ParseError::Kind::Range:
      return "RangeError";
  }
  return "?";
}

ParseError::ParseError(Kind kind, std::size_t line, std::size_t column,
                       std::string token, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + std::string(kind_name(kind)) + ": " + message +
                         (token.empty() ? "" : " near '" + token + "'")),
      kind_(kind),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

const std::string* CcdfgDocument::find_meta(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

constexpr std::size_t kMaxNesting = 64;

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

// Whitespace-separated words of a line.
std::vector<Token> words(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back({std::string(line.substr(start, i - start)), start + 1});
  }
  return out;
}

std::optional<Word> parse_number(std::string_view text, bool& overflow) {
  overflow = false;
  if (text.empty() || text[0] < '0' || text[0] > '9') return std::nullopt;
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  Word value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value, base);
  if (ec == std::errc::result_out_of_range) {
    overflow = true;
    return std::nullopt;
  }
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t column = 0;
};

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line_no, std::size_t offset,
             unsigned width)
      : text_(text), line_(line_no), offset_(offset), width_(width) {}

  std::vector<Statement> statements() {
    std::vector<Statement> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) break;
      SExpr e = read(0);
      out.push_back(to_statement(e));
    }
    if (out.empty()) fail(ParseError::Kind::Syntax, "", "empty microstep");
    return out;
  }

  [[noreturn]] void fail(ParseError::Kind kind, const std::string& token,
                         const std::string& message,
                         std::size_t column = 0) const {
    throw ParseError(kind, line_, column ? column : offset_ + pos_ + 1, token,
                     message);
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  SExpr read(std::size_t depth) {
    if (depth > kMaxNesting) fail(ParseError::Kind::Syntax, "(", "nesting too deep");
    skip_space();
    if (pos_ >= text_.size()) fail(ParseError::Kind::Syntax, "", "unexpected end of line");
    SExpr e;
    e.column = offset_ + pos_ + 1;
    char c = text_[pos_];
    if (c == ')') fail(ParseError::Kind::Syntax, ")", "unexpected ')'");
    if (c == '(') {
      e.is_list = true;
      ++pos_;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) {
          fail(ParseError::Kind::Syntax, "", "missing ')'");
        }
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.items.push_back(read(depth + 1));
      }
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

  static std::string show(const SExpr& e) {
    if (!e.is_list) return e.atom;
    std::string s = "(";
    for (std::size_t i = 0; i < e.items.size(); ++i) {
      if (i) s += ' ';
      s += show(e.items[i]);
    }
    return s + ")";
  }

  bool head_is(const SExpr& e, std::string_view name) const {
    return e.is_list && !e.items.empty() && !e.items[0].is_list &&
           e.items[0].atom == name;
  }

  std::string identifier(const SExpr& e, const char* what) const {
    if (e.is_list || !is_identifier(e.atom)) {
      fail(ParseError::Kind::Syntax, show(e), std::string("expected ") + what,
           e.column);
    }
    return e.atom;
  }

  Expression atom(const SExpr& e) const {
    bool overflow = false;
    if (auto n = parse_number(e.atom, overflow)) {
      if (*n > width_mask(width_)) {
        fail(ParseError::Kind::Range, e.atom,
             "constant does not fit in " + std::to_string(width_) + " bits",
             e.column);
      }
      return Expression::constant(*n);
    }
    if (overflow) {
      fail(ParseError::Kind::Range, e.atom, "constant out of range", e.column);
    }
    if (is_identifier(e.atom)) return Expression::var(e.atom);
    fail(ParseError::Kind::Syntax, e.atom, "expected a number or identifier",
         e.column);
  }

  Expression expression(const SExpr& e) const {
    if (!e.is_list) return atom(e);
    if (e.items.empty() || e.items[0].is_list) {
      fail(ParseError::Kind::Syntax, show(e), "expected an operator", e.column);
    }
    const std::string& head = e.items[0].atom;
    if (auto op = op_from_name(head)) {
      if (e.items.size() != 3) {
        fail(ParseError::Kind::Syntax, show(e),
             head + " takes exactly two operands", e.column);
      }
      if (e.items[1].is_list || e.items[2].is_list) {
        fail(ParseError::Kind::Syntax, show(e),
             head + " operands must be variables or constants", e.column);
      }
      return Expression::binary(*op, atom(e.items[1]), atom(e.items[2]));
    }
    if (head == "load") {
      if (e.items.size() != 2) {
        fail(ParseError::Kind::Syntax, show(e), "load takes one address",
             e.column);
      }
      return Expression::load(expression(e.items[1]));
    }
    if (head == "getelemptr") {
      if (e.items.size() != 3) {
        fail(ParseError::Kind::Syntax, show(e),
             "getelemptr takes a pointer and an offset", e.column);
      }
      return Expression::gep(identifier(e.items[1], "a pointer name"),
                             expression(e.items[2]));
    }
    fail(ParseError::Kind::Syntax, head, "unknown operator", e.items[0].column);
  }

  Statement to_statement(const SExpr& e) const {
    if (!e.is_list) {
      fail(ParseError::Kind::Syntax, e.atom, "expected a statement", e.column);
    }
    if (e.items.size() == 3 && head_is(e, "store")) {
      return Store{expression(e.items[1]), expression(e.items[2])};
    }
    if (e.items.size() != 2) {
      fail(ParseError::Kind::Syntax, show(e), "malformed statement", e.column);
    }
    std::string target = identifier(e.items[0], "an assignment target");
    const SExpr& rhs = e.items[1];
    if (head_is(rhs, "phi")) {
      if (rhs.items.size() != 2 || !rhs.items[1].is_list) {
        fail(ParseError::Kind::Syntax, show(rhs),
             "phi expects a list of choices", rhs.column);
      }
      const auto& choices = rhs.items[1].items;
      if (choices.size() != 2) {
        fail(ParseError::Kind::Semantic, show(rhs),
             "phi requires exactly two choices", rhs.column);
      }
      Phi phi;
      phi.target = target;
      for (std::size_t i = 0; i < 2; ++i) {
        const SExpr& ch = choices[i];
        if (!ch.is_list || ch.items.size() != 2) {
          fail(ParseError::Kind::Syntax, show(ch),
               "phi choice must be (expr label)", ch.column);
        }
        phi.choices[i] = {expression(ch.items[0]),
                          identifier(ch.items[1], "a block label")};
      }
      if (phi.choices[0].pred == phi.choices[1].pred) {
        fail(ParseError::Kind::Semantic, show(rhs),
             "phi choices must name distinct predecessors", rhs.column);
      }
      return phi;
    }
    return Assign{target, expression(rhs)};
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t offset_;
  unsigned width_;
  std::size_t pos_ = 0;
};

enum class RegionId { Pre, Loop, Post, Entry, Prologue, Fullstage, Epilogue, Exit };

struct RegionName {
  std::string_view name;
  RegionId id;
  bool pipelined;
};

constexpr RegionName kRegions[] = {
    {"pre:", RegionId::Pre, false},
    {"loop:", RegionId::Loop, false},
    {"post:", RegionId::Post, false},
    {"entry:", RegionId::Entry, true},
    {"prologue:", RegionId::Prologue, true},
    {"fullstage:", RegionId::Fullstage, true},
    {"epilogue:", RegionId::Epilogue, true},
    {"exit:", RegionId::Exit, true},
};

Region* region_of(CcdfgDocument& doc, RegionId id) {
  if (auto* c = std::get_if<Ccdfg>(&doc.design)) {
    switch (id) {
      case RegionId::Pre:
        return &c->pre;
      case RegionId::Loop:
        return &c->loop;
      case RegionId::Post:
        return &c->post;
      default:
        return nullptr;
    }
  }
  auto& p = std::get<PipelinedCcdfg>(doc.design);
  switch (id) {
    case RegionId::Entry:
      return &p.entry;
    case RegionId::Prologue:
      return &p.prologue;
    case RegionId::Fullstage:
      return &p.fullstage;
    case RegionId::Epilogue:
      return &p.epilogue;
    case RegionId::Exit:
      return &p.exit;
    default:
      return nullptr;
  }
}

std::vector<std::pair<std::size_t, std::string_view>> split_lines(
    std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t line_no = 1;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      out.emplace_back(line_no++, text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

}  // namespace

CcdfgDocument parse_ccdfg(std::string_view text, unsigned width) {
  CcdfgDocument doc;
  bool have_header = false;
  bool have_design = false;
  std::set<RegionId> seen_regions;
  Region* region = nullptr;
  SchedulingStep* step = nullptr;
  std::set<std::string> labels;

  for (auto [line_no, raw] : split_lines(text)) {
    std::string_view line = strip_comment(raw);
    auto toks = words(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0].text;
    auto fail = [&, line_no = line_no](ParseError::Kind kind, const Token& tok,
                                       const std::string& message) {
      throw ParseError(kind, line_no, tok.column, tok.text, message);
    };

    if (!have_header) {
      if (head != "ccdfg-format" || toks.size() != 2) {
        fail(ParseError::Kind::Syntax, toks[0],
             "expected header 'ccdfg-format " + std::string(kFormatVersion) + "'");
      }
      if (toks[1].text != kFormatVersion) {
        fail(ParseError::Kind::Semantic, toks[1], "unsupported format version");
      }
      doc.version = toks[1].text;
      have_header = true;
      continue;
    }
    if (!have_design) {
      if (head != "design" || toks.size() != 2) {
        fail(ParseError::Kind::Syntax, toks[0],
             "expected 'design sequential' or 'design pipelined'");
      }
      if (toks[1].text == "sequential") {
        doc.design = Ccdfg{};
      } else if (toks[1].text == "pipelined") {
        doc.design = PipelinedCcdfg{};
      } else {
        fail(ParseError::Kind::Syntax, toks[1], "unknown design kind");
      }
      have_design = true;
      continue;
    }

    if (head == "meta") {
      if (region) fail(ParseError::Kind::Syntax, toks[0], "meta after regions");
      if (toks.size() < 2 || !is_identifier(toks[1].text)) {
        fail(ParseError::Kind::Syntax, toks[0], "meta needs a key");
      }
      std::string value;
      if (toks.size() > 2) {
        std::string_view rest = line.substr(toks[2].column - 1);
        while (!rest.empty() && is_space(rest.back())) rest.remove_suffix(1);
        value = std::string(rest);
      }
      doc.meta.emplace_back(toks[1].text, value);
      continue;
    }

    if (head.ends_with(':')) {
      const RegionName* found = nullptr;
      for (const auto& r : kRegions) {
        if (r.name == head) found = &r;
      }
      if (!found || found->pipelined != doc.is_pipelined() || toks.size() != 1) {
        fail(ParseError::Kind::Syntax, toks[0], "unknown region header");
      }
      if (!seen_regions.insert(found->id).second) {
        fail(ParseError::Kind::Semantic, toks[0], "region declared twice");
      }
      region = region_of(doc, found->id);
      step = nullptr;
      continue;
    }

    if (head == "step") {
      if (!region) fail(ParseError::Kind::Syntax, toks[0], "step outside a region");
      if (toks.size() < 2 || !is_identifier(toks[1].text)) {
        fail(ParseError::Kind::Syntax, toks.size() < 2 ? toks[0] : toks[1],
             "step needs a label");
      }
      if (!labels.insert(toks[1].text).second) {
        fail(ParseError::Kind::Semantic, toks[1], "duplicate step label");
      }
      SchedulingStep s;
      s.label = toks[1].text;
      if (toks.size() > 2) {
        if (toks[2].text != "->" || toks.size() == 3) {
          fail(ParseError::Kind::Syntax, toks[2], "expected '-> successor...'");
        }
        for (std::size_t i = 3; i < toks.size(); ++i) {
          if (!is_identifier(toks[i].text)) {
            fail(ParseError::Kind::Syntax, toks[i], "bad successor label");
          }
          s.successors.push_back(toks[i].text);
        }
      }
      region->push_back(std::move(s));
      step = &region->back();
      continue;
    }

    if (head == "ms") {
      if (!step) fail(ParseError::Kind::Syntax, toks[0], "microstep outside a step");
      std::size_t offset = toks[0].column - 1 + 2;
      LineParser lp(line.substr(offset), line_no, offset, width);
      auto statements = lp.statements();
      try {
        step->microsteps.emplace_back(std::move(statements));
      } catch (const std::invalid_argument& e) {
        fail(ParseError::Kind::Semantic, toks[0], e.what());
      }
      continue;
    }

    fail(ParseError::Kind::Syntax, toks[0], "unexpected line");
  }

  if (!have_header) throw ParseError(ParseError::Kind::Syntax, 1, 1, "", "missing header");
  if (!have_design) {
    throw ParseError(ParseError::Kind::Syntax, 1, 1, "", "missing design line");
  }
  if (auto* p = std::get_if<PipelinedCcdfg>(&doc.design)) {
    if (p->fullstage.empty()) {
      throw ParseError(ParseError::Kind::Semantic, 1, 1, "",
                       "pipelined design has an empty full stage");
    }
  }
  return doc;
}

std::string serialize_expression(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::Const:
      return std::to_string(e.value());
    case Expression::Kind::Var:
      return e.name();
    case Expression::Kind::Binary:
      return "(" + std::string(op_name(e.op())) + " " +
             serialize_expression(e.lhs()) + " " +
             serialize_expression(e.rhs()) + ")";
    case Expression::Kind::Load:
      return "(load " + serialize_expression(e.operand()) + ")";
    case Expression::Kind::GetElemPtr:
      return "(getelemptr " + e.name() + " " +
             serialize_expression(e.operand()) + ")";
  }
  return "";
}

std::string serialize_statement(const Statement& st) {
  if (const auto* a = std::get_if<Assign>(&st)) {
    return "(" + a->target + " " + serialize_expression(a->rhs) + ")";
  }
  if (const auto* s = std::get_if<Store>(&st)) {
    return "(store " + serialize_expression(s->address) + " " +
           serialize_expression(s->value) + ")";
  }
  const auto& p = std::get<Phi>(st);
  return "(" + p.target + " (phi ((" + serialize_expression(p.choices[0].value) +
         " " + p.choices[0].pred + ") (" +
         serialize_expression(p.choices[1].value) + " " + p.choices[1].pred +
         "))))";
}

namespace {

void write_region(std::ostringstream& os, std::string_view header,
                  const Region& region) {
  os << header << '\n';
  for (const auto& step : region) {
    os << "step " << step.label;
    if (!step.successors.empty()) {
      os << " ->";
      for (const auto& s : step.successors) os << ' ' << s;
    }
    os << '\n';
    for (const auto& ms : step.microsteps) {
      os << "  ms";
      for (const auto& st : ms.statements()) os << ' ' << serialize_statement(st);
      os << '\n';
    }
  }
}

}  // namespace

std::string serialize_ccdfg(const CcdfgDocument& doc) {
  std::ostringstream os;
  os << "ccdfg-format " << doc.version << '\n';
  os << "design " << (doc.is_pipelined() ? "pipelined" : "sequential") << '\n';
  for (const auto& [k, v] : doc.meta) {
    os << "meta " << k;
    if (!v.empty()) os << ' ' << v;
    os << '\n';
  }
  if (const auto* c = std::get_if<Ccdfg>(&doc.design)) {
    write_region(os, "pre:", c->pre);
    write_region(os, "loop:", c->loop);
    write_region(os, "post:", c->post);
  } else {
    const auto& p = std::get<PipelinedCcdfg>(doc.design);
    write_region(os, "entry:", p.entry);
    write_region(os, "prologue:", p.prologue);
    write_region(os, "fullstage:", p.fullstage);
    write_region(os, "epilogue:", p.epilogue);
    write_region(os, "exit:", p.exit);
  }
  return os.str();
}

CcdfgState parse_state(std::string_view text, unsigned width) {
  enum class Section { None, Vars, Mem, Ptrs };
  CcdfgState s;
  s.width = width;
  const Word mask = width_mask(width);
  Section section = Section::None;

  for (auto [line_no, raw] : split_lines(text)) {
    std::string_view line = strip_comment(raw);
    std::string spaced(line);
    for (char& c : spaced) {
      if (c == ';') c = ' ';
    }
    for (const auto& tok : words(spaced)) {
      auto fail = [&, line_no = line_no](ParseError::Kind kind,
                                         const std::string& message) {
        throw ParseError(kind, line_no, tok.column, tok.text, message);
      };
      if (tok.text == "vars:") {
        section = Section::Vars;
        continue;
      }
      if (tok.text == "mem:") {
        section = Section::Mem;
        continue;
      }
      if (tok.text == "ptrs:") {
        section = Section::Ptrs;
        continue;
      }
      if (section == Section::None) {
        fail(ParseError::Kind::Syntax, "expected vars:, mem: or ptrs:");
      }
      auto eq = tok.text.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == tok.text.size()) {
        fail(ParseError::Kind::Syntax, "expected key=value");
      }
      std::string key = tok.text.substr(0, eq);
      std::string val = tok.text.substr(eq + 1);
      bool overflow = false;
      auto value = parse_number(val, overflow);
      if (!value) {
        fail(overflow ? ParseError::Kind::Range : ParseError::Kind::Syntax,
             overflow ? "value out of range" : "expected a number");
      }
      if (*value > mask) {
        fail(ParseError::Kind::Range,
             "value does not fit in " + std::to_string(width) + " bits");
      }
      switch (section) {
        case Section::Vars:
          if (!is_identifier(key)) fail(ParseError::Kind::Syntax, "bad variable name");
          if (s.find(key)) fail(ParseError::Kind::Semantic, "duplicate variable");
          s.bindings.emplace_back(key, *value);
          break;
        case Section::Mem: {
          auto addr = parse_number(key, overflow);
          if (!addr) {
            fail(overflow ? ParseError::Kind::Range : ParseError::Kind::Syntax,
                 "expected an address");
          }
          if (*addr > mask) fail(ParseError::Kind::Range, "address out of range");
          if (!s.memory.emplace(*addr, *value).second) {
            fail(ParseError::Kind::Semantic, "duplicate address");
          }
          break;
        }
        case Section::Ptrs:
          if (!is_identifier(key)) fail(ParseError::Kind::Syntax, "bad pointer name");
          if (!s.pointers.emplace(key, *value).second) {
            fail(ParseError::Kind::Semantic, "duplicate pointer");
          }
          break;
        case Section::None:
          break;
      }
    }
  }
  return s;
}

std::string serialize_state(const CcdfgState& s) {
  std::ostringstream os;
  os << "vars:";
  for (const auto& [k, v] : s.bindings) os << ' ' << k << '=' << v;
  os << "\nmem:";
  for (const auto& [k, v] : s.memory) os << ' ' << k << '=' << v;
  os << "\nptrs:";
  for (const auto& [k, v] : s.pointers) os << ' ' << k << '=' << v;
  os << '\n';
  return os.str();
}

}  // namespace ccdfg::textio
