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

// Reference semantics written separately from src/interp.cpp, used to derive
// and cross-check expected values.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccdfg/ir.hpp"
#include "ccdfg/state.hpp"

namespace oracle {

using ccdfg::Word;

struct Machine {
  std::map<std::string, Word> vars;
  std::map<Word, Word> mem;
  std::map<std::string, Word> ptrs;
  unsigned width = 32;

  Word mask() const {
    return width == 64 ? ~Word{0} : (Word{1} << width) - 1;
  }

  static Machine from(const ccdfg::CcdfgState& s) {
    Machine m;
    for (const auto& [k, v] : s.bindings) m.vars[k] = v;
    m.mem = s.memory;
    m.ptrs = s.pointers;
    m.width = s.width;
    return m;
  }

  Word eval(const ccdfg::Expression& e) const {
    using K = ccdfg::Expression::Kind;
    switch (e.kind()) {
      case K::Const:
        return e.value() & mask();
      case K::Var:
        return vars.at(e.name());
      case K::Load:
        return mem.at(eval(e.operand()));
      case K::GetElemPtr:
        return (ptrs.at(e.name()) + eval(e.operand())) & mask();
      case K::Binary:
        break;
    }
    const Word a = eval(e.lhs());
    const Word b = eval(e.rhs());
    // Widen to 128 bits so wraparound is computed rather than inherited.
    using U = unsigned __int128;
    const U m = mask();
    switch (e.op()) {
      case ccdfg::BinaryOp::Add:
        return static_cast<Word>((U{a} + U{b}) & m);
      case ccdfg::BinaryOp::Sub:
        return static_cast<Word>((U{a} + (m + 1) - U{b}) & m);
      case ccdfg::BinaryOp::Mul:
        return static_cast<Word>((U{a} * U{b}) & m);
      case ccdfg::BinaryOp::Xor:
        return a ^ b;
      case ccdfg::BinaryOp::And:
        return a & b;
      case ccdfg::BinaryOp::Or:
        return a | b;
      case ccdfg::BinaryOp::Shl:
        return b >= width ? 0 : static_cast<Word>((U{a} << b) & m);
      case ccdfg::BinaryOp::Lshr:
        return b >= width ? 0 : a >> b;
      case ccdfg::BinaryOp::Eq:
        return a == b;
      case ccdfg::BinaryOp::Lt:
        return a < b;
    }
    throw std::logic_error("unknown op");
  }

  void step(const ccdfg::SchedulingStep& s, const std::optional<std::string>& prev) {
    for (const auto& ms : s.microsteps) {
      for (const auto& st : ms.statements()) {
        if (const auto* a = std::get_if<ccdfg::Assign>(&st)) {
          vars[a->target] = eval(a->rhs);
        } else if (const auto* w = std::get_if<ccdfg::Store>(&st)) {
          Word addr = eval(w->address);
          mem[addr] = eval(w->value);
        } else {
          const auto& p = std::get<ccdfg::Phi>(st);
          if (prev && p.choices[0].pred == *prev) {
            vars[p.target] = eval(p.choices[0].value);
          } else if (prev && p.choices[1].pred == *prev) {
            vars[p.target] = eval(p.choices[1].value);
          } else {
            throw std::runtime_error("phi undefined");
          }
        }
      }
    }
  }
};

// Steps of pre, n loop iterations and post in execution order.
inline std::vector<const ccdfg::SchedulingStep*> unroll(const ccdfg::Ccdfg& c,
                                                        std::size_t n) {
  std::vector<const ccdfg::SchedulingStep*> out;
  for (const auto& s : c.pre) out.push_back(&s);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& s : c.loop) out.push_back(&s);
  }
  for (const auto& s : c.post) out.push_back(&s);
  return out;
}

inline Machine run(const ccdfg::Ccdfg& c, std::size_t n, Machine m,
                   std::optional<std::string> prev = std::nullopt) {
  for (const auto* s : unroll(c, n)) {
    m.step(*s, prev);
    prev = s->label;
  }
  return m;
}

// The running example written as an ordinary loop:
//   for (i = 0; i < n; ++i) { a = (a + 3) ^ arr[i]; out[i] = a; }
struct Fig1Result {
  Word a = 0;
  Word i = 0;
  std::vector<Word> out;
};

inline Fig1Result fig1_loop(const std::vector<Word>& arr, std::size_t n,
                            unsigned width = 32) {
  const Word mask = width == 64 ? ~Word{0} : (Word{1} << width) - 1;
  Fig1Result r;
  for (std::size_t i = 0; i < n; ++i) {
    r.a = ((r.a + 3) & mask) ^ arr.at(i);
    r.out.push_back(r.a);
    r.i = i + 1;
  }
  return r;
}

}  // namespace oracle
