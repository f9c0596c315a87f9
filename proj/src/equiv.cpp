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

#include "ccdfg/equiv.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <json.hpp>

namespace ccdfg::equiv {

using interp::PrevLabel;

CcdfgState get_real(const CcdfgState& s) {
  CcdfgState out = s;
  std::erase_if(out.bindings,
                [](const auto& b) { return is_shadow_name(b.first); });
  return out;
}

CcdfgState in_order(const CcdfgState& s) {
  CcdfgState out = s;
  std::stable_sort(out.bindings.begin(), out.bindings.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

Region get_m_blocks_seq(long m, const Region& loop, long interval) {
  Region out;
  while (m > 0 && interval > 0) {
    if (static_cast<std::size_t>(m) > loop.size()) {
      throw std::invalid_argument("get_m_blocks_seq: cannot take " +
                                  std::to_string(m) + " of " +
                                  std::to_string(loop.size()) + " blocks");
    }
    out.insert(out.end(), loop.begin(), loop.begin() + m);
    if (m <= interval) break;
    m -= interval;
  }
  return out;
}

std::optional<Divergence> first_divergence(const CcdfgState& lhs,
                                           const CcdfgState& rhs) {
  // Bindings: both sides are expected sorted, but do not rely on it.
  std::map<std::string, Word> l(lhs.bindings.begin(), lhs.bindings.end());
  std::map<std::string, Word> r(rhs.bindings.begin(), rhs.bindings.end());
  auto diff_maps = [](const auto& a, const auto& b,
                      auto describe) -> std::optional<Divergence> {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
      if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
        return Divergence{describe(ia->first), ia->second, std::nullopt};
      }
      if (ia == a.end() || ib->first < ia->first) {
        return Divergence{describe(ib->first), std::nullopt, ib->second};
      }
      if (ia->second != ib->second) {
        return Divergence{describe(ia->first), ia->second, ib->second};
      }
      ++ia;
      ++ib;
    }
    return std::nullopt;
  };
  if (auto d = diff_maps(l, r, [](const std::string& n) { return n; })) return d;
  if (lhs.bindings != rhs.bindings && l == r) {
    return Divergence{"binding order", std::nullopt, std::nullopt};
  }
  if (auto d = diff_maps(lhs.memory, rhs.memory, [](Word a) {
        return "mem[" + std::to_string(a) + "]";
      })) {
    return d;
  }
  return diff_maps(lhs.pointers, rhs.pointers,
                   [](const std::string& n) { return "ptr " + n; });
}

namespace {

CheckReport finish(std::size_t k, CcdfgState lhs, CcdfgState rhs) {
  CheckReport r;
  r.k = k;
  r.lhs_state = std::move(lhs);
  r.rhs_state = std::move(rhs);
  r.passed = r.lhs_state == r.rhs_state;
  if (!r.passed) r.first_divergence = first_divergence(r.lhs_state, r.rhs_state);
  return r;
}

CheckReport failed(std::size_t k, std::string diagnostic) {
  CheckReport r;
  r.k = k;
  r.diagnostic = std::move(diagnostic);
  r.first_divergence = Divergence{"error", std::nullopt, std::nullopt};
  return r;
}

PrevLabel after(const Region& r, const PrevLabel& prev) {
  return r.empty() ? prev : PrevLabel(r.back().label);
}

}  // namespace

CheckReport check_invariant(const PipelinedCcdfg& p, const Region& seq_pre,
                            const Region& seq_loop, unsigned interval,
                            unsigned m, std::size_t k, const CcdfgState& init,
                            const PrevLabel& prev, const CheckOptions& opts) {
  if (k == 0) return failed(k, "the invariant is stated for k >= 1");
  try {
    CcdfgState pp = interp::run_ccdfg_k(p.leading(), p.fullstage, k, init, prev);
    if (opts.strip_auxiliary) pp = get_real(pp);

    CcdfgState t1 = interp::run_block_set(seq_pre, init, prev);
    PrevLabel p1 = after(seq_pre, prev);
    CcdfgState t2 = interp::run_blocks_iters(seq_loop, t1, k - 1, p1);
    PrevLabel p2 = k > 1 ? after(seq_loop, p1) : p1;
    Region partial = get_m_blocks_seq(m, seq_loop, interval);
    CcdfgState t3 = interp::run_block_set(partial, t2, p2);
    return finish(k, in_order(pp), in_order(t3));
  } catch (const std::exception& e) {
    return failed(k, e.what());
  }
}

CheckReport check_correctness(const PipelinedCcdfg& p, const Region& seq_pre,
                              const Region& seq_loop, unsigned interval,
                              unsigned m, std::size_t k, const CcdfgState& init,
                              const PrevLabel& prev, const CheckOptions& opts) {
  if (interval == 0) return failed(k, "interval must be positive");
  const std::size_t started = (m + interval - 1) / interval;
  if (k + started == 0) return failed(k, "no iterations to compare");
  try {
    CcdfgState pp = interp::run_ccdfg(p.leading(), p.fullstage, p.epilogue, k,
                                      init, prev);
    if (opts.strip_auxiliary) pp = get_real(pp);
    CcdfgState seq = interp::run_ccdfg(seq_pre, seq_loop, {}, k + started - 1,
                                       init, prev);
    return finish(k, in_order(pp), in_order(seq));
  } catch (const std::exception& e) {
    return failed(k, e.what());
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over a Weyl step.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

CcdfgState layout_state(const std::set<std::string>& live_ins,
                        const std::set<std::string>& pointers,
                        const SampleOptions& opts, std::mt19937_64* rng) {
  CcdfgState s;
  s.width = opts.width;
  const Word mask = width_mask(opts.width);
  auto next = [&] { return rng ? (*rng)() & mask : Word{0}; };
  for (const auto& v : live_ins) s.bind(v, next());
  Word j = 0;
  for (const auto& p : pointers) s.pointers[p] = (j++ * opts.mem_size) & mask;
  const Word cells = std::max<Word>(1, pointers.size()) * opts.mem_size;
  for (Word a = 0; a < cells; ++a) s.memory[a & mask] = next();
  return s;
}

}  // namespace

CcdfgState sample_state(const std::set<std::string>& live_ins,
                        const std::set<std::string>& pointers,
                        std::uint64_t seed, const SampleOptions& opts) {
  std::mt19937_64 rng(seed);
  return layout_state(live_ins, pointers, opts, &rng);
}

CcdfgState sample_state(const Ccdfg& c, std::uint64_t seed,
                        const SampleOptions& opts) {
  return sample_state(live_in_variables(c), pointer_bases(c), seed, opts);
}

CcdfgState zero_state(const std::set<std::string>& live_ins,
                      const std::set<std::string>& pointers,
                      const SampleOptions& opts) {
  return layout_state(live_ins, pointers, opts, nullptr);
}

CcdfgState zero_state(const Ccdfg& c, const SampleOptions& opts) {
  return zero_state(live_in_variables(c), pointer_bases(c), opts);
}

bool check_commutability(const Statement& a, const Statement& b,
                         std::size_t samples, std::uint64_t seed,
                         unsigned width) {
  if (!independent(a, b)) {
    throw PreconditionViolation(
        "statements share a variable or both access memory");
  }
  std::set<std::string> vars = variables(a);
  for (const auto& v : variables(b)) vars.insert(v);
  std::set<std::string> ptrs;
  Region both{SchedulingStep{"a", {Microstep({a})}, {}},
              SchedulingStep{"b", {Microstep({b})}, {}}};
  ptrs = pointer_bases(both);
  auto rw = read_write_sets(both);
  const bool memory = rw.mem_reads || rw.mem_writes;

  SampleOptions opts;
  opts.width = width;
  interp::ExecContext ctx{};
  for (std::size_t n = 0; n < samples; ++n) {
    CcdfgState s = sample_state(vars, ptrs, derive_seed(seed, n), opts);
    if (memory) {
      // Keep addresses inside the mapped window.
      const Word cells = std::max<Word>(1, ptrs.size()) * opts.mem_size;
      for (auto& [name, value] : s.bindings) value %= cells;
    }
    std::optional<CcdfgState> ab, ba;
    try {
      ab = interp::execute_statement(b, interp::execute_statement(a, s, ctx), ctx);
    } catch (const interp::ExecError&) {
    }
    try {
      ba = interp::execute_statement(a, interp::execute_statement(b, s, ctx), ctx);
    } catch (const interp::ExecError&) {
    }
    if (ab.has_value() != ba.has_value()) return false;
    if (ab && in_order(*ab) != in_order(*ba)) return false;
  }
  return true;
}

void write_report_line(std::ostream& os, const CheckReport& r) {
  os << "k=" << r.k << (r.passed ? " pass" : " FAIL");
  if (!r.passed && r.first_divergence) {
    const auto& d = *r.first_divergence;
    os << " at " << d.location;
    if (d.lhs || d.rhs) {
      os << ": lhs=" << (d.lhs ? std::to_string(*d.lhs) : "unbound")
         << " rhs=" << (d.rhs ? std::to_string(*d.rhs) : "unbound");
    }
  }
  if (!r.diagnostic.empty()) os << " (" << r.diagnostic << ')';
  os << '\n';
}

std::string report_json(const CheckReport& r) {
  nlohmann::ordered_json j;
  j["k"] = r.k;
  j["passed"] = r.passed;
  if (r.first_divergence) {
    const auto& d = *r.first_divergence;
    nlohmann::ordered_json dj;
    dj["location"] = d.location;
    dj["lhs"] = d.lhs ? nlohmann::ordered_json(*d.lhs) : nullptr;
    dj["rhs"] = d.rhs ? nlohmann::ordered_json(*d.rhs) : nullptr;
    j["divergence"] = dj;
  } else {
    j["divergence"] = nullptr;
  }
  j["diagnostic"] = r.diagnostic;
  return j.dump();
}

}  // namespace ccdfg::equiv
