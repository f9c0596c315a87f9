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

#include "ccdfg/sweep.hpp"

#include <algorithm>

namespace ccdfg::sweep {

namespace {

std::size_t cell_count(const SweepJob& job) {
  if (job.k_max < job.k_min) return 0;
  return (job.k_max - job.k_min + 1) * job.samples;
}

SweepCell run_cell(const SweepJob& job, std::size_t index) {
  SweepCell cell;
  cell.k = job.k_min + index / job.samples;
  cell.sample = index % job.samples;
  cell.seed = equiv::derive_seed(job.seed, cell.sample);
  CcdfgState init =
      equiv::sample_state(job.live_ins, job.pointers, cell.seed, job.sample);
  if (job.kind == CheckKind::Correctness) {
    cell.report = equiv::check_correctness(job.design, job.seq_pre,
                                           job.seq_loop, job.interval, job.m,
                                           cell.k, init, std::nullopt, job.check);
  } else {
    cell.report = equiv::check_invariant(job.design, job.seq_pre, job.seq_loop,
                                         job.interval, job.m, cell.k, init,
                                         std::nullopt, job.check);
  }
  return cell;
}

}  // namespace

SweepJob make_job(CheckKind kind, const PipelinedCcdfg& design,
                  const Ccdfg& sequential, unsigned interval, unsigned m) {
  SweepJob job;
  job.kind = kind;
  job.design = design;
  job.seq_pre = sequential.pre;
  job.seq_loop = sequential.loop;
  job.interval = interval;
  job.m = m;
  job.live_ins = live_in_variables(sequential);
  job.pointers = pointer_bases(sequential);
  return job;
}

std::vector<SweepCell> sweep_serial(const SweepJob& job) {
  const std::size_t n = cell_count(job);
  std::vector<SweepCell> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(run_cell(job, i));
  return out;
}

std::vector<SweepCell> sweep_parallel(const SweepJob& job) {
  const long n = static_cast<long>(cell_count(job));
  std::vector<SweepCell> out(static_cast<std::size_t>(n));
  // Cells are independent and written to their own slot, so the result does
  // not depend on scheduling.
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = run_cell(job, static_cast<std::size_t>(i));
  }
  return out;
}

std::size_t count_failures(const std::vector<SweepCell>& cells) {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [](const SweepCell& c) { return !c.report.passed; }));
}

}  // namespace ccdfg::sweep
