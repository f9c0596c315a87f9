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

// Clocked control/data flow graph (CCDFG) model.
//
// A sequential design is three regions of scheduling steps: the steps before
// the loop (pre), the loop body in schedule order (loop) and the steps after
// the loop (post). Each scheduling step is one clock cycle and holds an
// ordered list of microsteps; each microstep holds statements. The only
// control flow is the loop backedge from the last loop step to the first, so
// the number of iterations is an execution parameter rather than part of the
// graph.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ccdfg {

using Word = std::uint64_t;

inline constexpr unsigned kDefaultWidth = 32;
inline constexpr unsigned kMaxWidth = 64;

// All ones in the low `width` bits. Width must be in [1, 64].
Word width_mask(unsigned width);

// [A-Za-z_][A-Za-z0-9_.']*
bool is_identifier(std::string_view text);

// Suffix reserved for shadow variables introduced by the pipeliner.
inline constexpr std::string_view kShadowSuffix = "_reg";
bool is_shadow_name(std::string_view name);

enum class BinaryOp { Add, Sub, Mul, Xor, And, Or, Shl, Lshr, Eq, Lt };

std::string_view op_name(BinaryOp op);
std::optional<BinaryOp> op_from_name(std::string_view name);

class Expression {
 public:
  enum class Kind { Const, Var, Binary, Load, GetElemPtr };

  Expression() = default;

  static Expression constant(Word value);
  static Expression var(std::string name);
  // Operands must be atoms (constants or variables).
  static Expression binary(BinaryOp op, Expression lhs, Expression rhs);
  static Expression load(Expression address);
  static Expression gep(std::string base, Expression offset);

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::Const || kind_ == Kind::Var; }

  Word value() const { return value_; }
  // Variable name for Var, pointer name for GetElemPtr.
  const std::string& name() const { return name_; }
  BinaryOp op() const { return op_; }
  const Expression& lhs() const { return *first_; }
  const Expression& rhs() const { return *second_; }
  // Address of a Load, offset of a GetElemPtr.
  const Expression& operand() const { return *first_; }

  // Binding variables this expression reads. GetElemPtr bases live in the
  // pointer table and are not included.
  void collect_reads(std::set<std::string>& out) const;
  bool reads_memory() const;
  Expression rename(const std::string& from, const std::string& to) const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  Kind kind_ = Kind::Const;
  Word value_ = 0;
  std::string name_;
  BinaryOp op_ = BinaryOp::Add;
  std::shared_ptr<const Expression> first_;
  std::shared_ptr<const Expression> second_;
};

struct Assign {
  std::string target;
  Expression rhs;
  bool operator==(const Assign&) const = default;
};

struct Store {
  Expression address;
  Expression value;
  bool operator==(const Store&) const = default;
};

struct PhiChoice {
  Expression value;
  std::string pred;
  bool operator==(const PhiChoice&) const = default;
};

// v := phi [sigma, bb1] [tau, bb2]
struct Phi {
  std::string target;
  std::array<PhiChoice, 2> choices;
  bool operator==(const Phi&) const = default;
};

using Statement = std::variant<Assign, Store, Phi>;

std::optional<std::string> written_variable(const Statement& st);
bool is_phi(const Statement& st);
Statement rename_reads(const Statement& st, const std::string& from,
                       const std::string& to);

// Statements that may execute in the same step. Nonempty, and no variable is
// written twice.
class Microstep {
 public:
  explicit Microstep(std::vector<Statement> statements);

  const std::vector<Statement>& statements() const { return statements_; }
  bool operator==(const Microstep&) const = default;

 private:
  std::vector<Statement> statements_;
};

struct SchedulingStep {
  std::string label;
  std::vector<Microstep> microsteps;
  // Explicit control edges. Empty means fall through to the next step in the
  // region (or take the backedge/exit for the last loop step).
  std::vector<std::string> successors;

  bool operator==(const SchedulingStep&) const = default;
};

using Region = std::vector<SchedulingStep>;

struct Ccdfg {
  Region pre;
  Region loop;
  Region post;
  bool operator==(const Ccdfg&) const = default;
};

// Output of the pipeliner. `entry` replays the sequential pre region, the
// prologue fills the pipeline, the full stage carries the backedge and the
// epilogue drains it. `exit` replays the sequential post region.
struct PipelinedCcdfg {
  Region entry;
  Region prologue;
  Region fullstage;
  Region epilogue;
  Region exit;

  // Everything executed before the first full-stage traversal.
  Region leading() const;
  bool operator==(const PipelinedCcdfg&) const = default;
};

struct ReadWriteSets {
  std::set<std::string> reads;
  std::set<std::string> writes;
  bool mem_reads = false;
  bool mem_writes = false;

  void merge(const ReadWriteSets& other);
  bool operator==(const ReadWriteSets&) const = default;
};

ReadWriteSets read_write_sets(const Statement& st);
ReadWriteSets read_write_sets(const SchedulingStep& step);
ReadWriteSets read_write_sets(const Region& region);

// Reads and writes of the statement, as one set.
std::set<std::string> variables(const Statement& st);

// True when running `a` then `b` is observably the same as `b` then `a`:
// neither writes what the other reads or writes, and they do not both touch
// memory.
bool independent(const Statement& a, const Statement& b);

struct Diagnostic {
  std::string rule;
  std::string step;
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

namespace rule {
inline constexpr std::string_view kStructural = "structural";
inline constexpr std::string_view kNoNestedLoop = "no-nested-loop";
inline constexpr std::string_view kSingleEntryExit = "single-entry-exit";
inline constexpr std::string_view kNoBranching = "no-branching";
inline constexpr std::string_view kPhiPlacement = "phi-placement";
inline constexpr std::string_view kReservedName = "reserved-name";
}  // namespace rule

std::vector<Diagnostic> validate_pipelinable(const Ccdfg& c);

class NameCollision : public std::runtime_error {
 public:
  explicit NameCollision(std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// base + "_reg", or NameCollision when that name is already taken.
std::string fresh_shadow_name(const std::string& base,
                              const std::set<std::string>& taken);

std::set<std::string> all_variables(const Ccdfg& c);
std::set<std::string> all_variables(const Region& region);

// Pointer-table names used as GetElemPtr bases.
std::set<std::string> pointer_bases(const Ccdfg& c);
std::set<std::string> pointer_bases(const Region& region);

// Variables read before any write along pre, the first loop iteration (phi
// takes its entry choice), a second iteration (phi takes the backedge
// choice) and post.
std::set<std::string> live_in_variables(const Ccdfg& c);

std::size_t count_statements(const Region& region);
std::size_t count_phis(const Ccdfg& c);

}  // namespace ccdfg
