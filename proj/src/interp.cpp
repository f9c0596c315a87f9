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

#include "ccdfg/interp.hpp"

#include <algorithm>

namespace ccdfg::interp {

namespace {

std::string describe(ExecError::Kind kind, const std::string& subject) {
  switch (kind) {
    case ExecError::Kind::UnboundVariable:
      return "UnboundVariable: '" + subject + "' has no binding";
    case ExecError::Kind::UnmappedAddress:
      return "UnmappedAddress: no memory cell at " + subject;
    case ExecError::Kind::PhiUndefined:
      return "PhiUndefined: phi reached from " + subject;
    case ExecError::Kind::EmptyRegion:
      return "EmptyRegion: " + subject;
  }
  return subject;
}

}  // namespace

ExecError::ExecError(Kind kind, std::string subject)
    : std::runtime_error(describe(kind, subject)),
      kind_(kind),
      subject_(std::move(subject)) {}

std::string_view kind_name(ExecError::Kind kind) {
  switch (kind) {
    case ExecError::Kind::UnboundVariable:
      return "UnboundVariable";
    case ExecError::Kind::UnmappedAddress:
      return "UnmappedAddress";
    case ExecError::Kind::PhiUndefined:
      return "PhiUndefined";
    case ExecError::Kind::EmptyRegion:
      return "EmptyRegion";
  }
  return "?";
}

std::size_t Trace::loop_cycles() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(),
                    [](const auto& e) { return e.phase == Phase::Loop; }));
}

void Trace::record(const std::string& label, Phase phase,
                   const CcdfgState& s) {
  entries.push_back({entries.size() + 1, label, phase, s});
}

namespace {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Entry:
      return "entry";
    case Phase::Loop:
      return "loop";
    case Phase::Exit:
      return "exit";
  }
  return "?";
}

}  // namespace

void write_trace(std::ostream& os, const Trace& trace) {
  const CcdfgState* before = &trace.initial;
  for (const auto& e : trace.entries) {
    os << "cycle=" << e.cycle << " phase=" << phase_name(e.phase)
       << " step=" << e.label << " changed:";
    for (const auto& [name, value] : e.post_state.bindings) {
      const Word* old = before->find(name);
      if (!old || *old != value) os << ' ' << name << '=' << value;
    }
    for (const auto& [addr, value] : e.post_state.memory) {
      auto it = before->memory.find(addr);
      if (it == before->memory.end() || it->second != value) {
        os << " mem[" << addr << "]=" << value;
      }
    }
    os << '\n';
    before = &e.post_state;
  }
}

Word evaluate_expr(const Expression& e, const CcdfgState& s) {
  const Word mask = width_mask(s.width);
  switch (e.kind()) {
    case Expression::Kind::Const:
      return e.value() & mask;
    case Expression::Kind::Var: {
      const Word* v = s.find(e.name());
      if (!v) throw ExecError(ExecError::Kind::UnboundVariable, e.name());
      return *v;
    }
    case Expression::Kind::Binary: {
      Word a = evaluate_expr(e.lhs(), s);
      Word b = evaluate_expr(e.rhs(), s);
      switch (e.op()) {
        case BinaryOp::Add:
          return (a + b) & mask;
        case BinaryOp::Sub:
          return (a - b) & mask;
        case BinaryOp::Mul:
          return (a * b) & mask;
        case BinaryOp::Xor:
          return a ^ b;
        case BinaryOp::And:
          return a & b;
        case BinaryOp::Or:
          return a | b;
        // Shifting by the width or more yields 0.
        case BinaryOp::Shl:
          return b >= s.width ? 0 : (a << b) & mask;
        case BinaryOp::Lshr:
          return b >= s.width ? 0 : a >> b;
        case BinaryOp::Eq:
          return a == b ? 1 : 0;
        case BinaryOp::Lt:
          return a < b ? 1 : 0;
      }
      return 0;
    }
    case Expression::Kind::Load: {
      Word addr = evaluate_expr(e.operand(), s);
      auto it = s.memory.find(addr);
      if (it == s.memory.end()) {
        throw ExecError(ExecError::Kind::UnmappedAddress, std::to_string(addr));
      }
      return it->second;
    }
    case Expression::Kind::GetElemPtr: {
      auto it = s.pointers.find(e.name());
      if (it == s.pointers.end()) {
        throw ExecError(ExecError::Kind::UnboundVariable, e.name());
      }
      return (it->second + evaluate_expr(e.operand(), s)) & mask;
    }
  }
  return 0;
}

namespace {

// The first choice is checked first, so it wins if both labels match.
const Expression& choose(const Phi& phi, const PrevLabel& prev) {
  if (prev) {
    for (const auto& choice : phi.choices) {
      if (choice.pred == *prev) return choice.value;
    }
  }
  throw ExecError(ExecError::Kind::PhiUndefined,
                  "'" + (prev ? *prev : std::string("<none>")) +
                      "' while assigning '" + phi.target + "'");
}

void apply(const Statement& st, CcdfgState& s, const ExecContext& ctx) {
  if (const auto* a = std::get_if<Assign>(&st)) {
    s.bind(a->target, evaluate_expr(a->rhs, s));
  } else if (const auto* store = std::get_if<Store>(&st)) {
    Word addr = evaluate_expr(store->address, s);
    Word value = evaluate_expr(store->value, s);
    s.memory[addr] = value;
  } else {
    const auto& phi = std::get<Phi>(st);
    s.bind(phi.target, evaluate_expr(choose(phi, ctx.prev_bb), s));
  }
}

void apply(const SchedulingStep& step, CcdfgState& s, const ExecContext& ctx) {
  for (const auto& ms : step.microsteps) {
    for (const auto& st : ms.statements()) apply(st, s, ctx);
  }
}

// Runs `blocks` in order, updating prev after each block.
void apply_blocks(const Region& blocks, CcdfgState& s, PrevLabel& prev,
                  Trace* trace, Phase phase) {
  for (const auto& step : blocks) {
    apply(step, s, ExecContext{prev});
    prev = step.label;
    if (trace) trace->record(step.label, phase, s);
  }
}

void start_trace(Trace* trace, const CcdfgState& s) {
  if (trace && trace->entries.empty()) trace->initial = s;
}

}  // namespace

CcdfgState execute_statement(const Statement& st, CcdfgState s,
                             const ExecContext& ctx) {
  apply(st, s, ctx);
  return s;
}

CcdfgState run_block(const SchedulingStep& step, CcdfgState s,
                     const ExecContext& ctx) {
  apply(step, s, ctx);
  return s;
}

CcdfgState run_block_set(const Region& blocks, CcdfgState s,
                         const PrevLabel& prev, Trace* trace, Phase phase) {
  start_trace(trace, s);
  PrevLabel p = prev;
  apply_blocks(blocks, s, p, trace, phase);
  return s;
}

CcdfgState run_blocks_iters(const Region& loop, CcdfgState s,
                            std::size_t iterations, const PrevLabel& prev,
                            Trace* trace) {
  start_trace(trace, s);
  PrevLabel p = prev;
  for (std::size_t n = 0; n < iterations; ++n) {
    apply_blocks(loop, s, p, trace, Phase::Loop);
  }
  return s;
}

const std::string& prefix(const Region& blocks) {
  if (blocks.empty()) {
    throw ExecError(ExecError::Kind::EmptyRegion,
                    "prefix of a region with no steps");
  }
  return blocks.back().label;
}

CcdfgState run_ccdfg(const Region& pre, const Region& loop, const Region& post,
                     std::size_t iterations, CcdfgState init,
                     const PrevLabel& prev, Trace* trace) {
  start_trace(trace, init);
  PrevLabel p = prev;
  apply_blocks(pre, init, p, trace, Phase::Entry);
  for (std::size_t n = 0; n < iterations; ++n) {
    apply_blocks(loop, init, p, trace, Phase::Loop);
  }
  apply_blocks(post, init, p, trace, Phase::Exit);
  return init;
}

CcdfgState run_ccdfg_k(const Region& prologue, const Region& fullstage,
                       std::size_t k, CcdfgState init, const PrevLabel& prev,
                       Trace* trace) {
  start_trace(trace, init);
  PrevLabel p = prev;
  apply_blocks(prologue, init, p, trace, Phase::Loop);
  for (std::size_t n = 0; n < k; ++n) {
    apply_blocks(fullstage, init, p, trace, Phase::Loop);
  }
  return init;
}

CcdfgState run(const Ccdfg& c, std::size_t iterations, CcdfgState init,
               const PrevLabel& prev, Trace* trace) {
  return run_ccdfg(c.pre, c.loop, c.post, iterations, std::move(init), prev,
                   trace);
}

CcdfgState run(const PipelinedCcdfg& p, std::size_t k, CcdfgState init,
               const PrevLabel& prev, Trace* trace) {
  start_trace(trace, init);
  PrevLabel last = prev;
  apply_blocks(p.entry, init, last, trace, Phase::Entry);
  apply_blocks(p.prologue, init, last, trace, Phase::Loop);
  for (std::size_t n = 0; n < k; ++n) {
    apply_blocks(p.fullstage, init, last, trace, Phase::Loop);
  }
  apply_blocks(p.epilogue, init, last, trace, Phase::Loop);
  apply_blocks(p.exit, init, last, trace, Phase::Exit);
  return init;
}

}  // namespace ccdfg::interp
