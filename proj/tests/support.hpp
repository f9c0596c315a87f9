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

// Corpus access and hand-rolled random generators shared by the test
// binaries.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ccdfg/ir.hpp"
#include "ccdfg/textio.hpp"

namespace testing {

using namespace ccdfg;

inline std::string corpus_path(const std::string& name) {
  return std::string(CCDFG_CORPUS_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Ccdfg load_sequential(const std::string& name) {
  auto doc = textio::parse_ccdfg(read_text(corpus_path(name)));
  return std::get<Ccdfg>(doc.design);
}

// Valid sequential corpus designs with the interval each is pipelined at.
struct CorpusEntry {
  const char* file;
  unsigned interval;
};

inline const std::vector<CorpusEntry>& pipelined_corpus() {
  static const std::vector<CorpusEntry> kEntries = {
      {"fig1.ccdfg", 1},  {"xorchain.ccdfg", 1}, {"scale.ccdfg", 2},
      {"counter.ccdfg", 2}, {"carried.ccdfg", 3},
  };
  return kEntries;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }
  // Uniform in [lo, hi].
  std::size_t range(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(gen_() % (hi - lo + 1));
  }
  bool chance(unsigned percent) { return gen_() % 100 < percent; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[range(0, v.size() - 1)];
  }

 private:
  std::mt19937_64 gen_;
};

inline Expression atom(Rng& rng, const std::vector<std::string>& readable) {
  if (readable.empty() || rng.chance(25)) {
    return Expression::constant(rng.chance(50) ? rng.range(0, 7) : rng.bits() & 0xffffffffu);
  }
  return Expression::var(rng.pick(readable));
}

inline BinaryOp any_op(Rng& rng) {
  static const std::vector<BinaryOp> kOps = {
      BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Xor, BinaryOp::And,
      BinaryOp::Or,  BinaryOp::Shl, BinaryOp::Lshr, BinaryOp::Eq, BinaryOp::Lt};
  return rng.pick(kOps);
}

struct DesignShape {
  std::size_t max_steps = 5;
  std::size_t max_phis = 2;
  bool memory = true;
};

// A random design that passes validate_pipelinable. Every read is of a
// live-in, a value defined in pre, a phi target or an earlier write of the
// same iteration, so the design runs without UnboundVariable. Memory accesses
// go through the pointer `buf` at offsets below 16.
inline Ccdfg random_design(Rng& rng, const DesignShape& shape = {}) {
  Ccdfg c;
  const std::size_t L = rng.range(1, shape.max_steps);
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < L; ++s) labels.push_back("S" + std::to_string(s));

  std::vector<std::string> always = {"in0", "in1", "in2"};
  // Loop temporaries also seeded in pre, so reads before the write in an
  // iteration see the previous iteration's value.
  std::vector<std::string> carried;
  SchedulingStep entry{"Entry", {}, {}};
  for (int t = 0; t < 2; ++t) {
    if (!rng.chance(60)) continue;
    std::string name = "r" + std::to_string(t);
    entry.microsteps.emplace_back(std::vector<Statement>{
        Assign{name, Expression::binary(any_op(rng), atom(rng, always),
                                        atom(rng, always))}});
    carried.push_back(name);
  }
  c.pre.push_back(std::move(entry));

  std::vector<std::string> phi_targets;
  std::vector<std::pair<std::string, std::string>> backedges;
  std::vector<Statement> phis;
  const std::size_t nphi = rng.range(0, shape.max_phis);
  for (std::size_t p = 0; p < nphi; ++p) {
    std::string v = "c" + std::to_string(p);
    std::string next = v + "n";
    PhiChoice init{atom(rng, always), "Entry"};
    PhiChoice back{Expression::var(next), labels.back()};
    if (rng.chance(50)) {
      phis.push_back(Phi{v, {init, back}});
    } else {
      phis.push_back(Phi{v, {back, init}});
    }
    phi_targets.push_back(v);
    backedges.emplace_back(v, next);
  }

  std::vector<std::string> temps = {"t0", "t1", "t2", "t3", "t4"};
  for (const auto& r : carried) temps.push_back(r);

  std::vector<std::vector<std::vector<Statement>>> body(L);
  std::vector<std::string> readable = always;
  for (const auto& r : carried) readable.push_back(r);
  for (const auto& v : phi_targets) readable.push_back(v);
  std::vector<std::string> addresses;
  if (!phis.empty()) body[0].push_back(phis);

  for (std::size_t s = 0; s < L; ++s) {
    const std::size_t nms = rng.range(1, 3);
    for (std::size_t k = 0; k < nms; ++k) {
      std::vector<Statement> ms;
      std::set<std::string> written;
      const std::size_t nst = rng.range(1, 2);
      for (std::size_t q = 0; q < nst; ++q) {
        const unsigned roll = static_cast<unsigned>(rng.range(0, 99));
        if (shape.memory && roll < 12) {
          std::string p = "p" + std::to_string(rng.range(0, 2));
          if (written.count(p)) continue;
          ms.push_back(Assign{p, Expression::gep("buf", Expression::constant(
                                                            rng.range(0, 15)))});
          written.insert(p);
          addresses.push_back(p);
        } else if (shape.memory && roll < 20 && !addresses.empty()) {
          ms.push_back(Store{Expression::var(rng.pick(addresses)),
                             atom(rng, readable)});
        } else if (shape.memory && roll < 28 && !addresses.empty()) {
          std::string t = rng.pick(temps);
          if (written.count(t)) continue;
          ms.push_back(Assign{t, Expression::load(Expression::var(rng.pick(addresses)))});
          written.insert(t);
        } else {
          std::string t = rng.pick(temps);
          if (written.count(t)) continue;
          ms.push_back(Assign{t, Expression::binary(any_op(rng), atom(rng, readable),
                                                    atom(rng, readable))});
          written.insert(t);
        }
      }
      if (ms.empty()) continue;
      for (const auto& w : written) {
        if (std::find(readable.begin(), readable.end(), w) == readable.end()) {
          readable.push_back(w);
        }
      }
      body[s].push_back(std::move(ms));
    }
  }
  // Each phi's backedge value is computed somewhere in the body.
  for (const auto& [v, next] : backedges) {
    std::size_t s = rng.range(0, L - 1);
    body[s].push_back({Assign{next, Expression::binary(any_op(rng),
                                                       Expression::var(v),
                                                       atom(rng, always))}});
  }

  for (std::size_t s = 0; s < L; ++s) {
    SchedulingStep step{labels[s], {}, {}};
    for (auto& ms : body[s]) step.microsteps.emplace_back(std::move(ms));
    if (step.microsteps.empty()) {
      step.microsteps.emplace_back(std::vector<Statement>{
          Assign{"t0", Expression::binary(BinaryOp::Add,
                                          Expression::var("in0"),
                                          Expression::constant(1))}});
    }
    c.loop.push_back(std::move(step));
  }
  SchedulingStep exit{"Exit", {}, {}};
  exit.microsteps.emplace_back(std::vector<Statement>{
      Assign{"out", Expression::binary(BinaryOp::Xor, Expression::var("in0"),
                                       Expression::var("in1"))}});
  c.post.push_back(std::move(exit));
  return c;
}

// A random statement over its own fresh variables. `tag` keeps the
// variables of different statements apart.
inline Statement random_statement(Rng& rng, const std::string& tag, bool memory) {
  auto v = [&](int n) { return tag + std::to_string(n); };
  std::vector<std::string> vars = {v(0), v(1), v(2)};
  const unsigned roll = static_cast<unsigned>(rng.range(0, 99));
  if (memory && roll < 30) {
    return Assign{v(3), Expression::load(Expression::var(v(0)))};
  }
  if (memory && roll < 60) {
    return Store{Expression::var(v(0)), atom(rng, vars)};
  }
  if (roll < 70) {
    return Assign{v(3), Expression::gep("buf", atom(rng, vars))};
  }
  return Assign{v(3), Expression::binary(any_op(rng), atom(rng, vars), atom(rng, vars))};
}

}  // namespace testing
