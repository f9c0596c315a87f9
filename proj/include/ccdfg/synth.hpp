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

// Reference loop pipeliner.
//
// Given a sequential CCDFG and a pipeline interval, build the pipelined
// CCDFG in four passes:
//
//  1. phi elimination: peel the first loop iteration into the pre region so
//     every phi becomes a plain assignment (entry choice in the peeled copy,
//     backedge choice in the loop body).
//  2. shadow insertion: a value written in one step and read more than
//     `interval` steps later would be overwritten by the next iteration
//     before the read, so it is copied into a fresh x_reg while still live.
//  3. layout: iteration j starts at cycle (j-1)*interval. The first m cycles
//     form the prologue, the next `interval` cycles the full stage and the
//     remaining cycles of the last started iterations the epilogue.
//  4. superstep construction: steps sharing a cycle are merged, older
//     iteration first, which forwards values written earlier in the cycle.
//     Any pair of steps whose relative order is inverted by the layout must
//     be independent; otherwise the pipeliner fails with HazardConflict.
//
// The peeled iteration is iteration 1 of the layout, so a pipelined run of
// k full-stage traversals completes k + ceil(m/interval) source iterations.

#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccdfg/ir.hpp"

namespace ccdfg::synth {

struct PipelineParams {
  unsigned interval = 1;
  // Cycles of the first iteration executed in the prologue.
  unsigned m = 1;
  // Iterations in flight in the full stage, ceil(|loop| / interval).
  unsigned depth = 1;
  bool operator==(const PipelineParams&) const = default;
};

struct HazardConflict {
  std::string writer_step;
  std::string reader_step;
  std::string var;
};

struct NameClash {
  std::string var;
};

struct InvalidParams {
  std::string reason;
};

struct NotPipelinable {
  std::vector<Diagnostic> diagnostics;
};

struct SynthesisError {
  std::variant<HazardConflict, NameClash, InvalidParams, NotPipelinable> kind;

  std::string_view kind_name() const;
  std::string describe() const;
};

template <class T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(SynthesisError error) : v_(std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<0>(v_); }
  T& value() & { return std::get<0>(v_); }
  T&& value() && { return std::get<0>(std::move(v_)); }
  const SynthesisError& error() const { return std::get<1>(v_); }

 private:
  std::variant<T, SynthesisError> v_;
};

// Suffix appended to the label of each peeled step.
inline constexpr std::string_view kPeelSuffix = ".peel";

// Requires a valid pipelinable design. Returns pre ++ peeled first iteration
// as the new pre region; the loop body keeps its labels.
Result<Ccdfg> phi_elimination(const Ccdfg& c);

// Shadow insertion over one iteration of a phi-free loop body. `taken` holds
// every variable name already used by the design.
Result<Region> shadow_insertion(const Region& loop, unsigned interval,
                                const std::set<std::string>& taken);

// m = loop_len - interval; InvalidParams unless interval < loop_len.
Result<unsigned> compute_m(unsigned loop_len, unsigned interval);

// One slot of a superstep: `stage` is a loop step index. In the prologue,
// `iteration` is absolute (1 is the peeled iteration). In the full stage it
// counts back from the youngest iteration active in that cycle, in the
// epilogue from the last iteration started (0 is the youngest).
struct Slot {
  std::size_t iteration = 0;
  std::size_t stage = 0;
  bool operator==(const Slot&) const = default;
};

struct Layout {
  std::vector<std::vector<Slot>> prologue;
  std::vector<std::vector<Slot>> fullstage;
  std::vector<std::vector<Slot>> epilogue;
  // ceil(m / interval)
  std::size_t started_in_prologue = 0;
};

// Slot placement for a loop of `loop_len` steps. Within a superstep slots
// are ordered oldest iteration first. Requires
// max(1, loop_len - interval) <= m <= loop_len and interval <= loop_len.
Layout layout(std::size_t loop_len, unsigned interval, unsigned m);

// The first pair of loop steps whose order the layout inverts and that are
// not independent, if any.
std::optional<HazardConflict> find_hazard(const Region& loop, unsigned interval);

// `pre` must end with the peeled iteration (|loop| steps) produced by
// phi_elimination and shadow insertion; its steps after the first must match
// the loop body. The returned design has an empty exit region.
Result<PipelinedCcdfg> superstep_construction(const Region& pre,
                                              const Region& loop,
                                              unsigned interval, unsigned m);

struct PipelineResult {
  PipelinedCcdfg design;
  PipelineParams params;
  // Phi-eliminated sequential design without shadows; the reference side of
  // the equivalence checks.
  Ccdfg sequential;
  std::vector<std::string> shadows;
};

// validate -> phi elimination -> shadow insertion -> m -> supersteps.
// interval == |loop| is the non-overlapping pipeline with m = |loop|.
Result<PipelineResult> pipeline(const Ccdfg& c, unsigned interval);

}  // namespace ccdfg::synth
