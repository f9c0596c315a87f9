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

// Concrete execution of CCDFGs.
//
// A phi resolves against the label of the scheduling step executed
// immediately before the step that contains it, so every runner threads a
// "previous block" label alongside the state. All runners are pure functions
// of their inputs.

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccdfg/ir.hpp"
#include "ccdfg/state.hpp"

namespace ccdfg::interp {

// Label of the previously executed step; nullopt before any step has run.
using PrevLabel = std::optional<std::string>;

struct ExecContext {
  PrevLabel prev_bb;
};

class ExecError : public std::runtime_error {
 public:
  enum class Kind { UnboundVariable, UnmappedAddress, PhiUndefined, EmptyRegion };

  ExecError(Kind kind, std::string subject);

  Kind kind() const { return kind_; }
  const std::string& subject() const { return subject_; }

 private:
  Kind kind_;
  std::string subject_;
};

std::string_view kind_name(ExecError::Kind kind);

enum class Phase { Entry, Loop, Exit };

struct TraceEntry {
  std::size_t cycle = 0;
  std::string label;
  Phase phase = Phase::Loop;
  CcdfgState post_state;
};

// One entry per executed scheduling step; cycles count from 1.
struct Trace {
  CcdfgState initial;
  std::vector<TraceEntry> entries;

  std::size_t cycles() const { return entries.size(); }
  std::size_t loop_cycles() const;
  void record(const std::string& label, Phase phase, const CcdfgState& s);
};

// Line-delimited trace records: cycle, phase, label and the bindings,
// memory cells and pointers that changed in that cycle.
void write_trace(std::ostream& os, const Trace& trace);

Word evaluate_expr(const Expression& e, const CcdfgState& s);

CcdfgState execute_statement(const Statement& st, CcdfgState s,
                             const ExecContext& ctx);

// Microsteps in order, statements within a microstep in order. The context
// is fixed for the whole step.
CcdfgState run_block(const SchedulingStep& step, CcdfgState s,
                     const ExecContext& ctx);

CcdfgState run_block_set(const Region& blocks, CcdfgState s,
                         const PrevLabel& prev, Trace* trace = nullptr,
                         Phase phase = Phase::Loop);

// Runs the whole loop body `iterations` times. The first iteration sees
// `prev`; later ones see the label of the last loop step.
CcdfgState run_blocks_iters(const Region& loop, CcdfgState s,
                            std::size_t iterations, const PrevLabel& prev,
                            Trace* trace = nullptr);

// Label of the last step in the region. Throws EmptyRegion on [].
const std::string& prefix(const Region& blocks);

// pre once, the loop `iterations` times, then post. The loop's first
// iteration sees the label of the last pre step (or `prev` when pre is
// empty); post sees the last step that actually ran.
CcdfgState run_ccdfg(const Region& pre, const Region& loop, const Region& post,
                     std::size_t iterations, CcdfgState init,
                     const PrevLabel& prev, Trace* trace = nullptr);

// Prologue once then `k` traversals of the full stage; no epilogue.
CcdfgState run_ccdfg_k(const Region& prologue, const Region& fullstage,
                       std::size_t k, CcdfgState init, const PrevLabel& prev,
                       Trace* trace = nullptr);

CcdfgState run(const Ccdfg& c, std::size_t iterations, CcdfgState init,
               const PrevLabel& prev, Trace* trace = nullptr);

// entry + prologue, k full-stage traversals, then epilogue + exit.
CcdfgState run(const PipelinedCcdfg& p, std::size_t k, CcdfgState init,
               const PrevLabel& prev, Trace* trace = nullptr);

}  // namespace ccdfg::interp
