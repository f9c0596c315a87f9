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

#include <map>

#include "ccdfg/equiv.hpp"
#include "ccdfg/synth.hpp"
#include "ccdfg/textio.hpp"
#include "support.hpp"

using namespace ccdfg;

namespace {

Expression v(const char* n) { return Expression::var(n); }
Expression k(Word x) { return Expression::constant(x); }

Region steps(const std::string& body) {
  auto doc = textio::parse_ccdfg("ccdfg-format 1\ndesign sequential\nloop:\n" + body);
  return std::get<Ccdfg>(doc.design).loop;
}

template <class E, class T>
bool is_error(const synth::Result<T>& r) {
  return !r.ok() && std::holds_alternative<E>(r.error().kind);
}

std::vector<Statement> flat(const SchedulingStep& s) {
  std::vector<Statement> out;
  for (const auto& ms : s.microsteps) {
    for (const auto& st : ms.statements()) out.push_back(st);
  }
  return out;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("overlap depth") {
  CHECK(synth::compute_m(3, 1).value() == 2);
  CHECK(synth::compute_m(4, 2).value() == 2);
  CHECK(synth::compute_m(8, 3).value() == 5);
  CHECK(is_error<synth::InvalidParams>(synth::compute_m(3, 3)));
  CHECK(is_error<synth::InvalidParams>(synth::compute_m(3, 0)));
  CHECK(is_error<synth::InvalidParams>(synth::compute_m(2, 5)));
}

TEST_CASE("phi elimination peels one iteration") {
  auto c = testing::load_sequential("fig1.ccdfg");
  auto r = synth::phi_elimination(c);
  REQUIRE(r.ok());
  const Ccdfg& p = r.value();
  CHECK(count_phis(p) == 0);
  REQUIRE(p.pre.size() == 4);
  CHECK(p.pre[1].label == "X.peel");
  CHECK(p.pre[3].label == "Z.peel");
  CHECK(p.loop.size() == 3);
  CHECK(p.loop[0].label == "X");
  CHECK(p.loop[2].successors.empty());
  // Peeled phis take the entry value, the loop's take the backedge value.
  CHECK(flat(p.pre[1])[0] == Statement{Assign{"i", k(0)}});
  CHECK(flat(p.loop[0])[0] == Statement{Assign{"i", v("i'")}});
}

TEST_CASE("phi elimination keeps peeled labels unique") {
  auto doc = textio::parse_ccdfg(
      "ccdfg-format 1\ndesign sequential\npre:\nstep X.peel\n  ms (z 1)\n"
      "loop:\nstep X\n  ms (a (phi ((z X.peel) (b X))))\n  ms (b (add a 1))\npost:\n");
  auto r = synth::phi_elimination(std::get<Ccdfg>(doc.design));
  REQUIRE(r.ok());
  CHECK(r.value().pre[1].label != "X.peel");
  CHECK(r.value().pre[1].label.rfind("X.peel", 0) == 0);
}

TEST_CASE("phi elimination rejects invalid designs") {
  auto r = synth::phi_elimination(testing::load_sequential("invalid/branch.ccdfg"));
  REQUIRE(is_error<synth::NotPipelinable>(r));
  CHECK(r.error().kind_name() == "NotPipelinable");
  CHECK_FALSE(std::get<synth::NotPipelinable>(r.error().kind).diagnostics.empty());
}

TEST_CASE("phi elimination is phi-free for generated designs") {
  testing::Rng rng(41);
  for (int n = 0; n < 300; ++n) {
    auto c = testing::random_design(rng);
    auto r = synth::phi_elimination(c);
    REQUIRE(r.ok());
    CHECK(count_phis(r.value()) == 0);
    CHECK(r.value().pre.size() == c.pre.size() + c.loop.size());
  }
}

TEST_CASE("shadow copy for a read two steps after its write") {
  auto loop = steps("step A\n  ms (x (add u 1))\nstep B\n  ms (y x)\nstep C\n  ms (z (add x y))\n");
  auto r = synth::shadow_insertion(loop, 1, {"u"});
  REQUIRE(r.ok());
  const Region& s = r.value();
  // Copy placed where the next iteration rewrites x.
  CHECK(flat(s[1])[0] == Statement{Assign{"x_reg", v("x")}});
  CHECK(flat(s[1])[1] == Statement{Assign{"y", v("x")}});
  CHECK(flat(s[2])[0] ==
        Statement{Assign{"z", Expression::binary(BinaryOp::Add, v("x_reg"), v("y"))}});
  CHECK(flat(s[0]) == flat(loop[0]));
}

TEST_CASE("no shadow within the interval") {
  auto loop = steps("step A\n  ms (x (add u 1))\nstep B\n  ms (y x)\nstep C\n  ms (z (add x y))\n");
  auto r = synth::shadow_insertion(loop, 2, {"u"});
  REQUIRE(r.ok());
  CHECK(r.value() == loop);
}

TEST_CASE("chained shadows") {
  auto loop = steps(
      "step A\n  ms (x (add u 1))\nstep B\n  ms (y u)\nstep C\n  ms (w u)\n"
      "step D\n  ms (z (add x 1))\n");
  auto r = synth::shadow_insertion(loop, 1, {"u"});
  REQUIRE(r.ok());
  std::set<std::string> names = all_variables(r.value());
  CHECK(names.count("x_reg"));
  CHECK(names.count("x_reg_reg"));
  CHECK(flat(r.value()[3])[0] ==
        Statement{Assign{"z", Expression::binary(BinaryOp::Add, v("x_reg_reg"), k(1))}});
}

TEST_CASE("shadow name clash") {
  auto loop = steps("step A\n  ms (x (add u 1))\nstep B\n  ms (y u)\nstep C\n  ms (z x)\n");
  auto r = synth::shadow_insertion(loop, 1, {"u", "x_reg"});
  REQUIRE(is_error<synth::NameClash>(r));
  CHECK(r.error().kind_name() == "NameCollision");
}

TEST_CASE("running example at interval 1") {
  auto r = synth::pipeline(testing::load_sequential("fig1.ccdfg"), 1);
  REQUIRE(r.ok());
  const auto& p = r.value();
  CHECK(p.params == synth::PipelineParams{1, 2, 3});
  CHECK(p.design.prologue.size() == 2);
  CHECK(p.design.fullstage.size() == 1);
  CHECK(p.design.epilogue.size() == 2);
  CHECK(p.shadows == std::vector<std::string>{"i_reg"});
  CHECK(p.design.entry.size() == 1);
  CHECK(p.design.exit == testing::load_sequential("fig1.ccdfg").post);
  // Oldest iteration first: the store of Z precedes the loads of Y.
  const auto full = flat(p.design.fullstage[0]);
  CHECK(std::holds_alternative<Store>(full[1]));
  CHECK(count_statements(p.design.fullstage) == 9 + 1);
}

TEST_CASE("interval equal to the loop length") {
  auto c = testing::load_sequential("fig1.ccdfg");
  auto r = synth::pipeline(c, 3);
  REQUIRE(r.ok());
  const auto& p = r.value();
  CHECK(p.params == synth::PipelineParams{3, 3, 1});
  CHECK(p.design.epilogue.empty());
  REQUIRE(p.design.fullstage.size() == 3);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(flat(p.design.fullstage[s]) == flat(p.sequential.loop[s]));
  }
  CHECK(p.shadows.empty());
}

TEST_CASE("bad intervals") {
  auto c = testing::load_sequential("fig1.ccdfg");
  CHECK(is_error<synth::InvalidParams>(synth::pipeline(c, 0)));
  CHECK(is_error<synth::InvalidParams>(synth::pipeline(c, 4)));
  CHECK(is_error<synth::NotPipelinable>(
      synth::pipeline(testing::load_sequential("invalid/late_phi.ccdfg"), 1)));
}

TEST_CASE("loop-carried hazard") {
  auto c = testing::load_sequential("carried.ccdfg");
  auto r = synth::pipeline(c, 1);
  REQUIRE(is_error<synth::HazardConflict>(r));
  const auto& h = std::get<synth::HazardConflict>(r.error().kind);
  CHECK(h.writer_step == "Z");
  CHECK(h.reader_step == "X");
  CHECK(h.var == "w");
  CHECK(r.error().describe().find("'Z'") != std::string::npos);
  CHECK(synth::pipeline(c, 3).ok());
}

TEST_CASE("memory hazard") {
  auto r = synth::pipeline(testing::load_sequential("scale.ccdfg"), 1);
  REQUIRE(is_error<synth::HazardConflict>(r));
  CHECK(std::get<synth::HazardConflict>(r.error().kind).var == "memory");
  CHECK(synth::pipeline(testing::load_sequential("scale.ccdfg"), 2).ok());
}

TEST_CASE("hazard scan on a bare loop") {
  auto loop = steps("step A\n  ms (a (add b 1))\nstep B\n  ms (c 1)\nstep C\n  ms (b (add c 1))\n");
  auto h = synth::find_hazard(loop, 1);
  REQUIRE(h);
  CHECK(h->var == "b");
  CHECK_FALSE(synth::find_hazard(loop, 2));
}

TEST_CASE("layout covers every iteration and stage once") {
  // Independent placement: iteration j (from 1) runs stage s in cycle
  // (j - 1) * interval + s.
  for (std::size_t L = 1; L <= 8; ++L) {
    for (unsigned i = 1; i <= L; ++i) {
      const unsigned lo = static_cast<unsigned>(std::max<std::size_t>(1, L - i));
      for (unsigned m = lo; m <= L; ++m) {
        if (i == L && m != L) continue;
        CAPTURE(L);
        CAPTURE(i);
        CAPTURE(m);
        auto lay = synth::layout(L, i, m);
        const std::size_t np = ceil_div(m, i);
        CHECK(lay.started_in_prologue == np);
        CHECK(lay.prologue.size() == m);
        CHECK(lay.fullstage.size() == i);
        CHECK(lay.epilogue.size() == (np - 1) * i + L - m);
        for (std::size_t kk = 0; kk <= 4; ++kk) {
          std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
          std::size_t cycle = 0;
          bool ordered = true;
          // Reference iteration for relative slots; 0 means per cycle.
          auto place = [&](const std::vector<synth::Slot>& step, std::size_t youngest,
                           bool absolute) {
            std::size_t last = 0;
            const std::size_t ref = youngest ? youngest : cycle / i + 1;
            for (const auto& slot : step) {
              const std::size_t j = absolute ? slot.iteration : ref - slot.iteration;
              ordered = ordered && j > last;
              last = j;
              CHECK(slot.stage == cycle - (j - 1) * i);
              ++seen[{j, slot.stage}];
            }
            ++cycle;
          };
          for (const auto& st : lay.prologue) place(st, 0, true);
          for (std::size_t t = 0; t < kk; ++t) {
            for (const auto& st : lay.fullstage) place(st, 0, false);
          }
          for (const auto& st : lay.epilogue) place(st, np + kk, false);
          CHECK(ordered);
          CHECK(seen.size() == (np + kk) * L);
          for (const auto& [slot, count] : seen) {
            CHECK(count == 1);
            CHECK(slot.first >= 1);
            CHECK(slot.first <= np + kk);
          }
        }
      }
    }
  }
}

TEST_CASE("statements are conserved") {
  testing::Rng rng(7);
  int built = 0;
  for (int n = 0; n < 300; ++n) {
    auto c = testing::random_design(rng);
    const unsigned L = static_cast<unsigned>(c.loop.size());
    const unsigned i = static_cast<unsigned>(rng.range(1, L));
    auto r = synth::pipeline(c, i);
    if (!r.ok()) continue;
    ++built;
    const auto& p = r.value();
    std::set<std::string> taken = all_variables(p.sequential);
    for (const auto& b : pointer_bases(p.sequential)) taken.insert(b);
    Region peeled(p.sequential.pre.end() - L, p.sequential.pre.end());
    const auto sp = synth::shadow_insertion(peeled, i, taken);
    const auto sl = synth::shadow_insertion(p.sequential.loop, i, taken);
    REQUIRE(sp.ok());
    REQUIRE(sl.ok());
    const std::size_t np = ceil_div(p.params.m, i);
    for (std::size_t kk = 1; kk <= 4; ++kk) {
      const std::size_t executed = count_statements(p.design.prologue) +
                                   kk * count_statements(p.design.fullstage) +
                                   count_statements(p.design.epilogue);
      CHECK(executed == count_statements(sp.value()) +
                            (np + kk - 1) * count_statements(sl.value()));
    }
    CHECK(p.params.depth == ceil_div(L, i));
  }
  CHECK(built > 100);
}

TEST_CASE("successful synthesis passes the correctness check") {
  testing::Rng rng(1234);
  int checked = 0;
  for (int n = 0; n < 250; ++n) {
    auto c = testing::random_design(rng);
    const unsigned L = static_cast<unsigned>(c.loop.size());
    const unsigned i = static_cast<unsigned>(rng.range(1, L));
    auto r = synth::pipeline(c, i);
    if (!r.ok()) continue;
    const auto& p = r.value();
    for (std::size_t kk = 1; kk <= 4; ++kk) {
      auto init = equiv::sample_state(c, rng.bits());
      auto rep = equiv::check_correctness(p.design, p.sequential.pre, p.sequential.loop,
                                          i, p.params.m, kk, init, std::nullopt);
      CAPTURE(textio::serialize_ccdfg({std::string(textio::kFormatVersion), c, {}}));
      CAPTURE(i);
      CAPTURE(kk);
      CAPTURE(rep.diagnostic);
      CHECK(rep.passed);
      auto inv = equiv::check_invariant(p.design, p.sequential.pre, p.sequential.loop,
                                        i, p.params.m, kk, init, std::nullopt);
      CHECK(inv.passed);
      ++checked;
    }
  }
  CHECK(checked > 400);
}

}  // TEST_SUITE
