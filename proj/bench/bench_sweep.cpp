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

// Serial vs OpenMP timing of the (k, sample) check sweep on the corpus.
//
//   bench_sweep [kmax=32] [samples=200] [reps=3]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "ccdfg/sweep.hpp"
#include "ccdfg/synth.hpp"
#include "ccdfg/textio.hpp"

namespace {

struct Design {
  const char* file;
  unsigned interval;
};

constexpr Design kDesigns[] = {
    {"fig1.ccdfg", 1}, {"xorchain.ccdfg", 1}, {"scale.ccdfg", 2},
    {"carried.ccdfg", 3}, {"counter.ccdfg", 2},
};

template <class F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t kmax = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 32;
  const std::size_t samples = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 200;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 3;

  std::printf("threads=%d kmax=%zu samples=%zu reps=%d\n", omp_get_max_threads(),
              kmax, samples, reps);
  std::printf("%-16s %-12s %10s %10s %8s %s\n", "design", "check", "serial_ms",
              "omp_ms", "speedup", "equal");
  int status = 0;
  for (const auto& d : kDesigns) {
    std::ifstream in(std::string(CCDFG_CORPUS_DIR) + "/" + d.file);
    std::stringstream ss;
    ss << in.rdbuf();
    auto doc = ccdfg::textio::parse_ccdfg(ss.str());
    auto r = ccdfg::synth::pipeline(std::get<ccdfg::Ccdfg>(doc.design), d.interval);
    if (!r) {
      std::printf("%-16s pipeline failed: %s\n", d.file, r.error().describe().c_str());
      status = 1;
      continue;
    }
    for (auto kind : {ccdfg::sweep::CheckKind::Correctness,
                      ccdfg::sweep::CheckKind::Invariant}) {
      auto job = ccdfg::sweep::make_job(kind, r.value().design, r.value().sequential,
                                        r.value().params.interval, r.value().params.m);
      job.k_max = kmax;
      job.samples = samples;
      job.seed = 7;
      job.sample.mem_size = 64;
      std::vector<ccdfg::sweep::SweepCell> serial, parallel;
      double ts = best_ms(reps, [&] { serial = ccdfg::sweep::sweep_serial(job); });
      double tp = best_ms(reps, [&] { parallel = ccdfg::sweep::sweep_parallel(job); });
      bool equal = serial == parallel;
      if (!equal) status = 1;
      std::printf("%-16s %-12s %10.2f %10.2f %8.2f %s\n", d.file,
                  kind == ccdfg::sweep::CheckKind::Correctness ? "correctness"
                                                               : "invariant",
                  ts, tp, ts / tp, equal ? "yes" : "NO");
    }
  }
  return status;
}
