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

// (k, sample) sweeps of the equivalence checkers.
//
// sweep_serial is the reference; sweep_parallel distributes the same cells
// over OpenMP threads and must return an identical vector.

#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ccdfg/equiv.hpp"
#include "ccdfg/ir.hpp"

namespace ccdfg::sweep {

enum class CheckKind { Correctness, Invariant };

struct SweepJob {
  CheckKind kind = CheckKind::Correctness;
  PipelinedCcdfg design;
  Region seq_pre;
  Region seq_loop;
  unsigned interval = 1;
  unsigned m = 1;
  std::size_t k_min = 1;
  std::size_t k_max = 8;
  std::size_t samples = 20;
  std::uint64_t seed = 0;
  // Inputs of equiv::sample_state.
  std::set<std::string> live_ins;
  std::set<std::string> pointers;
  equiv::SampleOptions sample;
  equiv::CheckOptions check;
};

struct SweepCell {
  std::size_t k = 0;
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  equiv::CheckReport report;
  bool operator==(const SweepCell&) const = default;
};

// Job for `design` against the phi-eliminated sequential design it came from.
SweepJob make_job(CheckKind kind, const PipelinedCcdfg& design,
                  const Ccdfg& sequential, unsigned interval, unsigned m);

// Ordered by (k, sample). Sample n uses seed derive_seed(job.seed, n) for
// every k.
std::vector<SweepCell> sweep_serial(const SweepJob& job);
std::vector<SweepCell> sweep_parallel(const SweepJob& job);

std::size_t count_failures(const std::vector<SweepCell>& cells);

}  // namespace ccdfg::sweep
