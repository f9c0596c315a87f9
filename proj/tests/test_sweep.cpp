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

#include <doctest.h>

#include "ccdfg/sweep.hpp"
#include "ccdfg/synth.hpp"
#include "support.hpp"

using namespace ccdfg;

TEST_SUITE("sweep") {

TEST_CASE("cells are ordered by k then sample") {
  for (const auto& e : testing::pipelined_corpus()) {
    CAPTURE(e.file);
    auto r = synth::pipeline(testing::load_sequential(e.file), e.interval);
    REQUIRE(r.ok());
    const auto& p = r.value();
    auto job = sweep::make_job(sweep::CheckKind::Correctness, p.design, p.sequential,
                               e.interval, p.params.m);
    job.k_max = 3;
    job.samples = 4;
    job.seed = 5;
    auto cells = sweep::sweep_serial(job);
    REQUIRE(cells.size() == 12);
    for (std::size_t n = 0; n < cells.size(); ++n) {
      CHECK(cells[n].k == 1 + n / 4);
      CHECK(cells[n].sample == n % 4);
      CHECK(cells[n].seed == equiv::derive_seed(5, n % 4));
    }
    CHECK(sweep::count_failures(cells) == 0);
  }
}

TEST_CASE("parallel sweep matches the serial reference") {
  for (const auto& e : testing::pipelined_corpus()) {
    auto r = synth::pipeline(testing::load_sequential(e.file), e.interval);
    REQUIRE(r.ok());
    const auto& p = r.value();
    for (auto kind : {sweep::CheckKind::Correctness, sweep::CheckKind::Invariant}) {
      auto job = sweep::make_job(kind, p.design, p.sequential, e.interval, p.params.m);
      job.k_max = 6;
      job.samples = 15;
      job.seed = 99;
      CHECK(sweep::sweep_parallel(job) == sweep::sweep_serial(job));
    }
  }
}

TEST_CASE("parallel sweep reports the same failures") {
  auto r = synth::pipeline(testing::load_sequential("fig1.ccdfg"), 1);
  REQUIRE(r.ok());
  auto p = r.value();
  std::swap(p.design.epilogue[0], p.design.epilogue[1]);
  auto job = sweep::make_job(sweep::CheckKind::Correctness, p.design, p.sequential, 1,
                             p.params.m);
  job.k_max = 4;
  job.samples = 10;
  auto serial = sweep::sweep_serial(job);
  CHECK(sweep::count_failures(serial) == serial.size());
  CHECK(sweep::sweep_parallel(job) == serial);
}

}  // TEST_SUITE
