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

// Translation validation by co-execution.
//
// Both checkers run the pipelined design and the phi-eliminated sequential
// design from the same initial state and compare the normalized final
// states. check_correctness compares complete runs (prologue, k full-stage
// traversals, epilogue) against k - 1 + ceil(m/interval) sequential
// iterations after the peeled one. check_invariant stops the pipelined run at
// the backedge and compares it with the sequential run extended by the
// partial iterations still in flight.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "ccdfg/interp.hpp"
#include "ccdfg/ir.hpp"
#include "ccdfg/state.hpp"

namespace ccdfg::equiv {

// Drops shadow bindings; memory and pointers are kept.
CcdfgState get_real(const CcdfgState& s);

// Bindings sorted by name.
CcdfgState in_order(const CcdfgState& s);

// First m blocks of loop, then first m - interval, and so on while positive.
// Throws std::invalid_argument when m exceeds |loop|.
Region get_m_blocks_seq(long m, const Region& loop, long interval);

struct Divergence {
  // A variable name, "mem[<addr>]", "ptr <name>" or "error".
  std::string location;
  std::optional<Word> lhs;
  std::optional<Word> rhs;
  bool operator==(const Divergence&) const = default;
};

struct CheckReport {
  std::size_t k = 0;
  bool passed = false;
  CcdfgState lhs_state;
  CcdfgState rhs_state;
  std::optional<Divergence> first_divergence;
  // Set when either side failed to execute.
  std::string diagnostic;
  bool operator==(const CheckReport&) const = default;
};

struct CheckOptions {
  // Apply get_real to the pipelined side. Disabling it is only useful to
  // show the check depends on it.
  bool strip_auxiliary = true;
};

// First difference between two normalized states, if any.
std::optional<Divergence> first_divergence(const CcdfgState& lhs,
                                           const CcdfgState& rhs);

CheckReport check_invariant(const PipelinedCcdfg& p, const Region& seq_pre,
                            const Region& seq_loop, unsigned interval,
                            unsigned m, std::size_t k, const CcdfgState& init,
                            const interp::PrevLabel& prev,
                            const CheckOptions& opts = {});

CheckReport check_correctness(const PipelinedCcdfg& p, const Region& seq_pre,
                              const Region& seq_loop, unsigned interval,
                              unsigned m, std::size_t k, const CcdfgState& init,
                              const interp::PrevLabel& prev,
                              const CheckOptions& opts = {});

class PreconditionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Runs a;b and b;a from `samples` random states over the variables of both
// statements. Throws PreconditionViolation unless independent(a, b).
bool check_commutability(const Statement& a, const Statement& b,
                         std::size_t samples, std::uint64_t seed,
                         unsigned width = kDefaultWidth);

struct SampleOptions {
  unsigned width = kDefaultWidth;
  // Memory words per pointer.
  Word mem_size = 16;
};

// Live-in variables get random values, pointer j (by name) gets base
// j * mem_size and memory [0, max(1, #pointers) * mem_size) is random.
CcdfgState sample_state(const std::set<std::string>& live_ins,
                        const std::set<std::string>& pointers,
                        std::uint64_t seed, const SampleOptions& opts = {});
CcdfgState sample_state(const Ccdfg& c, std::uint64_t seed,
                        const SampleOptions& opts = {});

// Same layout with every value 0.
CcdfgState zero_state(const std::set<std::string>& live_ins,
                      const std::set<std::string>& pointers,
                      const SampleOptions& opts = {});
CcdfgState zero_state(const Ccdfg& c, const SampleOptions& opts = {});

// Seed for sample `index` of a sweep started from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// One line: "k=3 pass" or "k=3 FAIL at a': lhs=5 rhs=7".
void write_report_line(std::ostream& os, const CheckReport& r);
// JSON object with k, passed, divergence and diagnostic.
std::string report_json(const CheckReport& r);

}  // namespace ccdfg::equiv
