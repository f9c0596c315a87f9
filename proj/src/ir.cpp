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

#include "ccdfg/ir.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace ccdfg {

Word width_mask(unsigned width) {
  if (width == 0 || width > kMaxWidth) {
    throw std::invalid_argument("value width must be in [1, 64]");
  }
  return width == 64 ? ~Word{0} : ((Word{1} << width) - 1);
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto c0 = static_cast<unsigned char>(text[0]);
  if (!(std::isalpha(c0) || c0 == '_')) return false;
  for (char ch : text.substr(1)) {
    auto c = static_cast<unsigned char>(ch);
    if (!(std::isalnum(c) || c == '_' || c == '.' || c == '\'')) return false;
  }
  return true;
}

bool is_shadow_name(std::string_view name) {
  return name.size() > kShadowSuffix.size() && name.ends_with(kShadowSuffix);
}

namespace {

constexpr std::array<std::pair<BinaryOp, std::string_view>, 10> kOpNames{{
    {BinaryOp::Add, "add"},
    {BinaryOp::Sub, "sub"},
    {BinaryOp::Mul, "mul"},
    {BinaryOp::Xor, "xor"},
    {BinaryOp::And, "and"},
    {BinaryOp::Or, "or"},
    {BinaryOp::Shl, "shl"},
    {BinaryOp::Lshr, "lshr"},
    {BinaryOp::Eq, "eq"},
    {BinaryOp::Lt, "lt"},
}};

}  // namespace

std::string_view op_name(BinaryOp op) {
  for (const auto& [o, n] : kOpNames) {
    if (o == op) return n;
  }
  return "?";
}

std::optional<BinaryOp> op_from_name(std::string_view name) {
  for (const auto& [o, n] : kOpNames) {
    if (n == name) return o;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Expression

Expression Expression::constant(Word value) {
  Expression e;
  e.kind_ = Kind::Const;
  e.value_ = value;
  return e;
}

Expression Expression::var(std::string name) {
  if (!is_identifier(name)) {
    throw std::invalid_argument("invalid variable name '" + name + "'");
  }
  Expression e;
  e.kind_ = Kind::Var;
  e.name_ = std::move(name);
  return e;
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs) {
  if (!lhs.is_atom() || !rhs.is_atom()) {
    throw std::invalid_argument(std::string(op_name(op)) +
                                " operands must be variables or constants");
  }
  Expression e;
  e.kind_ = Kind::Binary;
  e.op_ = op;
  e.first_ = std::make_shared<const Expression>(std::move(lhs));
  e.second_ = std::make_shared<const Expression>(std::move(rhs));
  return e;
}

Expression Expression::load(Expression address) {
  Expression e;
  e.kind_ = Kind::Load;
  e.first_ = std::make_shared<const Expression>(std::move(address));
  return e;
}

Expression Expression::gep(std::string base, Expression offset) {
  if (!is_identifier(base)) {
    throw std::invalid_argument("invalid pointer name '" + base + "'");
  }
  Expression e;
  e.kind_ = Kind::GetElemPtr;
  e.name_ = std::move(base);
  e.first_ = std::make_shared<const Expression>(std::move(offset));
  return e;
}

void Expression::collect_reads(std::set<std::string>& out) const {
  switch (kind_) {
    case Kind::Const:
      return;
    case Kind::Var:
      out.insert(name_);
      return;
    case Kind::Binary:
      first_->collect_reads(out);
      second_->collect_reads(out);
      return;
    case Kind::Load:
    case Kind::GetElemPtr:
      first_->collect_reads(out);
      return;
  }
}

bool Expression::reads_memory() const {
  switch (kind_) {
    case Kind::Const:
    case Kind::Var:
      return false;
    case Kind::Binary:
      return first_->reads_memory() || second_->reads_memory();
    case Kind::Load:
      return true;
    case Kind::GetElemPtr:
      return first_->reads_memory();
  }
  return false;
}

Expression Expression::rename(const std::string& from,
                              const std::string& to) const {
  switch (kind_) {
    case Kind::Const:
      return *this;
    case Kind::Var:
      return name_ == from ? var(to) : *this;
    case Kind::Binary:
      return binary(op_, first_->rename(from, to), second_->rename(from, to));
    case Kind::Load:
      return load(first_->rename(from, to));
    case Kind::GetElemPtr:
      return gep(name_, first_->rename(from, to));
  }
  return *this;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Expression::Kind::Const:
      return a.value_ == b.value_;
    case Expression::Kind::Var:
      return a.name_ == b.name_;
    case Expression::Kind::Binary:
      return a.op_ == b.op_ && *a.first_ == *b.first_ &&
             *a.second_ == *b.second_;
    case Expression::Kind::Load:
      return *a.first_ == *b.first_;
    case Expression::Kind::GetElemPtr:
      return a.name_ == b.name_ && *a.first_ == *b.first_;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Statements

std::optional<std::string> written_variable(const Statement& st) {
  if (const auto* a = std::get_if<Assign>(&st)) return a->target;
  if (const auto* p = std::get_if<Phi>(&st)) return p->target;
  return std::nullopt;
}

bool is_phi(const Statement& st) { return std::holds_alternative<Phi>(st); }

Statement rename_reads(const Statement& st, const std::string& from,
                       const std::string& to) {
  if (const auto* a = std::get_if<Assign>(&st)) {
    return Assign{a->target, a->rhs.rename(from, to)};
  }
  if (const auto* s = std::get_if<Store>(&st)) {
    return Store{s->address.rename(from, to), s->value.rename(from, to)};
  }
  const auto& p = std::get<Phi>(st);
  Phi out = p;
  for (auto& choice : out.choices) choice.value = choice.value.rename(from, to);
  return out;
}

Microstep::Microstep(std::vector<Statement> statements)
    : statements_(std::move(statements)) {
  if (statements_.empty()) {
    throw std::invalid_argument("a microstep needs at least one statement");
  }
  std::set<std::string> written;
  for (const auto& st : statements_) {
    if (const auto* p = std::get_if<Phi>(&st)) {
      if (p->choices[0].pred.empty() || p->choices[1].pred.empty()) {
        throw std::invalid_argument("phi predecessor labels must be nonempty");
      }
      if (p->choices[0].pred == p->choices[1].pred) {
        throw std::invalid_argument("phi for '" + p->target +
                                    "' names predecessor '" +
                                    p->choices[0].pred + "' twice");
      }
    }
    if (auto target = written_variable(st)) {
      if (!is_identifier(*target)) {
        throw std::invalid_argument("invalid variable name '" + *target + "'");
      }
      if (!written.insert(*target).second) {
        throw std::invalid_argument("'" + *target +
                                    "' is written twice in one microstep");
      }
    }
  }
}

Region PipelinedCcdfg::leading() const {
  Region out = entry;
  out.insert(out.end(), prologue.begin(), prologue.end());
  return out;
}

// ---------------------------------------------------------------------------
// Read/write analysis

void ReadWriteSets::merge(const ReadWriteSets& other) {
  reads.insert(other.reads.begin(), other.reads.end());
  writes.insert(other.writes.begin(), other.writes.end());
  mem_reads = mem_reads || other.mem_reads;
  mem_writes = mem_writes || other.mem_writes;
}

ReadWriteSets read_write_sets(const Statement& st) {
  ReadWriteSets sets;
  if (const auto* a = std::get_if<Assign>(&st)) {
    a->rhs.collect_reads(sets.reads);
    sets.writes.insert(a->target);
    sets.mem_reads = a->rhs.reads_memory();
  } else if (const auto* s = std::get_if<Store>(&st)) {
    s->address.collect_reads(sets.reads);
    s->value.collect_reads(sets.reads);
    sets.mem_reads = s->address.reads_memory() || s->value.reads_memory();
    sets.mem_writes = true;
  } else {
    const auto& p = std::get<Phi>(st);
    for (const auto& choice : p.choices) {
      choice.value.collect_reads(sets.reads);
      sets.mem_reads = sets.mem_reads || choice.value.reads_memory();
    }
    sets.writes.insert(p.target);
  }
  return sets;
}

ReadWriteSets read_write_sets(const SchedulingStep& step) {
  ReadWriteSets sets;
  for (const auto& ms : step.microsteps) {
    for (const auto& st : ms.statements()) sets.merge(read_write_sets(st));
  }
  return sets;
}

ReadWriteSets read_write_sets(const Region& region) {
  ReadWriteSets sets;
  for (const auto& step : region) sets.merge(read_write_sets(step));
  return sets;
}

std::set<std::string> variables(const Statement& st) {
  auto sets = read_write_sets(st);
  sets.reads.insert(sets.writes.begin(), sets.writes.end());
  return sets.reads;
}

bool independent(const Statement& a, const Statement& b) {
  auto sa = read_write_sets(a);
  auto sb = read_write_sets(b);
  auto touches = [](const std::set<std::string>& writes,
                    const ReadWriteSets& other) {
    return std::any_of(writes.begin(), writes.end(), [&](const auto& v) {
      return other.reads.count(v) || other.writes.count(v);
    });
  };
  if (touches(sa.writes, sb) || touches(sb.writes, sa)) return false;
  bool a_mem = sa.mem_reads || sa.mem_writes;
  bool b_mem = sb.mem_reads || sb.mem_writes;
  return !(a_mem && b_mem);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

enum class Where { Pre, Loop, Post };

struct Position {
  Where region;
  std::size_t index;
};

std::string_view region_name(Where w) {
  switch (w) {
    case Where::Pre:
      return "pre";
    case Where::Loop:
      return "loop";
    case Where::Post:
      return "post";
  }
  return "?";
}

void check_edge(const Ccdfg& c, const SchedulingStep& from, Position src,
                const std::string& to, Position dst,
                std::vector<Diagnostic>& out) {
  auto emit = [&](std::string_view r, std::string msg) {
    out.push_back({std::string(r), from.label, std::move(msg)});
  };
  const std::size_t loop_last = c.loop.size() - 1;
  auto same_region = [&] {
    if (dst.index == src.index + 1) return;
    if (dst.index <= src.index) {
      emit(rule::kNoNestedLoop,
           "edge to '" + to + "' forms a loop inside the " +
               std::string(region_name(src.region)) + " region");
    } else {
      emit(rule::kNoBranching, "branch from '" + from.label + "' to '" + to +
                                   "' skips scheduling steps");
    }
  };

  if (src.region == Where::Loop && dst.region == Where::Loop) {
    if (src.index == loop_last && dst.index == 0) return;  // backedge
    same_region();
    return;
  }
  if (src.region == dst.region) {
    same_region();
    return;
  }
  if (src.region == Where::Pre && dst.region == Where::Loop) {
    if (src.index + 1 == c.pre.size() && dst.index == 0) return;
    emit(rule::kSingleEntryExit,
         "loop entered at '" + to + "' instead of its first step");
    return;
  }
  if (src.region == Where::Loop && dst.region == Where::Post) {
    if (dst.index != 0) {
      emit(rule::kSingleEntryExit,
           "loop exits to '" + to + "' instead of the first exit step");
    } else if (src.index != loop_last) {
      emit(rule::kNoBranching, "conditional branch from loop step '" +
                                   from.label + "' to '" + to + "'");
    }
    return;
  }
  if (src.region == Where::Post && dst.region == Where::Loop) {
    emit(rule::kSingleEntryExit, "exit region re-enters the loop at '" + to + "'");
    return;
  }
  if (src.region == Where::Loop && dst.region == Where::Pre) {
    emit(rule::kNoNestedLoop, "loop branches back to entry step '" + to + "'");
    return;
  }
  if (src.region == Where::Pre && dst.region == Where::Post) {
    emit(rule::kSingleEntryExit, "entry region bypasses the loop to '" + to + "'");
    return;
  }
  // post -> pre
  emit(rule::kNoNestedLoop, "exit region branches back to '" + to + "'");
}

}  // namespace

std::vector<Diagnostic> validate_pipelinable(const Ccdfg& c) {
  std::vector<Diagnostic> out;
  if (c.loop.empty()) {
    out.push_back({std::string(rule::kStructural), "",
                   "the loop region has no scheduling steps"});
  }

  std::map<std::string, Position> where;
  auto index_region = [&](const Region& r, Where w) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i].label.empty()) {
        out.push_back({std::string(rule::kStructural), "",
                       "scheduling step without a label in the " +
                           std::string(region_name(w)) + " region"});
        continue;
      }
      if (!where.emplace(r[i].label, Position{w, i}).second) {
        out.push_back({std::string(rule::kStructural), r[i].label,
                       "duplicate scheduling step label"});
      }
    }
  };
  index_region(c.pre, Where::Pre);
  index_region(c.loop, Where::Loop);
  index_region(c.post, Where::Post);

  if (!c.loop.empty()) {
    auto check_region = [&](const Region& r, Where w) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        for (const auto& succ : r[i].successors) {
          auto it = where.find(succ);
          if (it == where.end()) {
            out.push_back({std::string(rule::kStructural), r[i].label,
                           "successor '" + succ + "' is not a step"});
            continue;
          }
          check_edge(c, r[i], Position{w, i}, succ, it->second, out);
        }
        // Only the last loop step may have two successors (backedge and
        // exit); anything else is a branch.
        bool last_loop = w == Where::Loop && i + 1 == r.size();
        if (r[i].successors.size() > (last_loop ? 2u : 1u)) {
          out.push_back({std::string(rule::kNoBranching), r[i].label,
                         "scheduling step has " +
                             std::to_string(r[i].successors.size()) +
                             " successors"});
        }
      }
    };
    check_region(c.pre, Where::Pre);
    check_region(c.loop, Where::Loop);
    check_region(c.post, Where::Post);

    const std::string& backedge = c.loop.back().label;
    std::optional<std::string> entry;
    if (!c.pre.empty()) entry = c.pre.back().label;

    auto scan_phis = [&](const Region& r, bool first_loop_region) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        for (const auto& ms : r[i].microsteps) {
          for (const auto& st : ms.statements()) {
            const auto* p = std::get_if<Phi>(&st);
            if (!p) continue;
            if (!first_loop_region || i != 0) {
              out.push_back({std::string(rule::kPhiPlacement), r[i].label,
                             "phi for '" + p->target +
                                 "' outside the first loop step"});
              continue;
            }
            const auto& a = p->choices[0].pred;
            const auto& b = p->choices[1].pred;
            bool has_back = a == backedge || b == backedge;
            const auto& other = a == backedge ? b : a;
            bool entry_ok = entry ? other == *entry : other != backedge;
            if (!has_back || !entry_ok) {
              out.push_back(
                  {std::string(rule::kPhiPlacement), r[i].label,
                   "phi for '" + p->target + "' must select between '" +
                       (entry ? *entry : std::string("<entry>")) + "' and '" +
                       backedge + "'"});
            }
          }
        }
      }
    };
    scan_phis(c.pre, false);
    scan_phis(c.loop, true);
    scan_phis(c.post, false);
  }

  for (const auto& v : all_variables(c)) {
    if (is_shadow_name(v)) {
      out.push_back({std::string(rule::kReservedName), "",
                     "variable '" + v + "' uses the reserved suffix '" +
                         std::string(kShadowSuffix) + "'"});
    }
  }
  return out;
}

NameCollision::NameCollision(std::string name)
    : std::runtime_error("shadow name '" + name + "' is already in use"),
      name_(std::move(name)) {}

std::string fresh_shadow_name(const std::string& base,
                              const std::set<std::string>& taken) {
  std::string name = base + std::string(kShadowSuffix);
  if (taken.count(name)) throw NameCollision(name);
  return name;
}

std::set<std::string> all_variables(const Region& region) {
  auto sets = read_write_sets(region);
  sets.reads.insert(sets.writes.begin(), sets.writes.end());
  return sets.reads;
}

std::set<std::string> all_variables(const Ccdfg& c) {
  auto out = all_variables(c.pre);
  for (const Region* r : {&c.loop, &c.post}) {
    auto vs = all_variables(*r);
    out.insert(vs.begin(), vs.end());
  }
  return out;
}

namespace {

void collect_bases(const Expression& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expression::Kind::Const:
    case Expression::Kind::Var:
      return;
    case Expression::Kind::Binary:
      collect_bases(e.lhs(), out);
      collect_bases(e.rhs(), out);
      return;
    case Expression::Kind::Load:
      collect_bases(e.operand(), out);
      return;
    case Expression::Kind::GetElemPtr:
      out.insert(e.name());
      collect_bases(e.operand(), out);
      return;
  }
}

}  // namespace

std::set<std::string> pointer_bases(const Region& region) {
  std::set<std::string> out;
  for (const auto& step : region) {
    for (const auto& ms : step.microsteps) {
      for (const auto& st : ms.statements()) {
        if (const auto* a = std::get_if<Assign>(&st)) {
          collect_bases(a->rhs, out);
        } else if (const auto* s = std::get_if<Store>(&st)) {
          collect_bases(s->address, out);
          collect_bases(s->value, out);
        } else {
          for (const auto& ch : std::get<Phi>(st).choices) {
            collect_bases(ch.value, out);
          }
        }
      }
    }
  }
  return out;
}

std::set<std::string> pointer_bases(const Ccdfg& c) {
  auto out = pointer_bases(c.pre);
  for (const Region* r : {&c.loop, &c.post}) {
    auto vs = pointer_bases(*r);
    out.insert(vs.begin(), vs.end());
  }
  return out;
}

std::set<std::string> live_in_variables(const Ccdfg& c) {
  std::set<std::string> defined;
  std::set<std::string> live;
  auto visit = [&](const Statement& st, int phi_choice) {
    std::set<std::string> reads;
    if (const auto* p = std::get_if<Phi>(&st)) {
      p->choices[static_cast<std::size_t>(phi_choice)].value.collect_reads(
          reads);
    } else {
      reads = read_write_sets(st).reads;
    }
    for (const auto& v : reads) {
      if (!defined.count(v)) live.insert(v);
    }
    if (auto w = written_variable(st)) defined.insert(*w);
  };
  auto walk = [&](const Region& r, int phi_choice) {
    for (const auto& step : r) {
      for (const auto& ms : step.microsteps) {
        for (const auto& st : ms.statements()) visit(st, phi_choice);
      }
    }
  };
  // Which phi choice is the entry one depends on the backedge label.
  auto walk_loop = [&](bool first_iteration) {
    const std::string backedge = c.loop.empty() ? "" : c.loop.back().label;
    for (const auto& step : c.loop) {
      for (const auto& ms : step.microsteps) {
        for (const auto& st : ms.statements()) {
          int choice = 0;
          if (const auto* p = std::get_if<Phi>(&st)) {
            bool first_is_back = p->choices[0].pred == backedge;
            choice = (first_iteration == first_is_back) ? 1 : 0;
          }
          visit(st, choice);
        }
      }
    }
  };
  walk(c.pre, 0);
  walk_loop(true);
  walk_loop(false);
  walk(c.post, 0);
  return live;
}

std::size_t count_statements(const Region& region) {
  std::size_t n = 0;
  for (const auto& step : region) {
    for (const auto& ms : step.microsteps) n += ms.statements().size();
  }
  return n;
}

std::size_t count_phis(const Ccdfg& c) {
  std::size_t n = 0;
  for (const Region* r : {&c.pre, &c.loop, &c.post}) {
    for (const auto& step : *r) {
      for (const auto& ms : step.microsteps) {
        for (const auto& st : ms.statements()) n += is_phi(st) ? 1 : 0;
      }
    }
  }
  return n;
}

}  // namespace ccdfg
