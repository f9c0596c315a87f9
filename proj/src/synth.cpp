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

#include "ccdfg/synth.hpp"

#include <map>
#include <sstream>

namespace ccdfg::synth {

namespace {

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

SynthesisError invalid(std::string reason) {
  return SynthesisError{InvalidParams{std::move(reason)}};
}

std::set<std::string> labels_of(const Region& r) {
  std::set<std::string> out;
  for (const auto& s : r) out.insert(s.label);
  return out;
}

std::string unique_label(const std::string& base, std::set<std::string>& used) {
  std::string label = base;
  for (int n = 1; used.count(label); ++n) label = base + "_" + std::to_string(n);
  used.insert(label);
  return label;
}

// Copy of `step` with each phi replaced by the choice picked by `backedge`.
SchedulingStep resolve_phis(const SchedulingStep& step,
                            const std::string& backedge, bool take_backedge) {
  SchedulingStep out{step.label, {}, {}};
  for (const auto& ms : step.microsteps) {
    std::vector<Statement> stmts;
    for (const auto& st : ms.statements()) {
      if (const auto* p = std::get_if<Phi>(&st)) {
        const auto& c = p->choices;
        bool first_is_back = c[0].pred == backedge;
        const PhiChoice& pick =
            (first_is_back == take_backedge) ? c[0] : c[1];
        stmts.push_back(Assign{p->target, pick.value});
      } else {
        stmts.push_back(st);
      }
    }
    out.microsteps.emplace_back(std::move(stmts));
  }
  return out;
}

struct Violation {
  std::string var;
  std::size_t def_step;
};

// First read whose reaching definition in the same iteration lies more than
// `interval` steps earlier.
std::optional<Violation> find_long_read(const Region& loop, unsigned interval) {
  std::map<std::string, std::size_t> def;
  for (std::size_t s = 0; s < loop.size(); ++s) {
    for (const auto& ms : loop[s].microsteps) {
      for (const auto& st : ms.statements()) {
        for (const auto& v : read_write_sets(st).reads) {
          auto it = def.find(v);
          if (it != def.end() && s - it->second > interval) {
            return Violation{v, it->second};
          }
        }
        if (auto w = written_variable(st)) def[*w] = s;
      }
    }
  }
  return std::nullopt;
}

// Renames reads of `from` after step `after` until `from` is redefined.
void rename_forward(Region& loop, std::size_t after, const std::string& from,
                    const std::string& to) {
  for (std::size_t s = after + 1; s < loop.size(); ++s) {
    std::vector<Microstep> rebuilt;
    bool redefined = false;
    for (const auto& ms : loop[s].microsteps) {
      std::vector<Statement> stmts;
      for (const auto& st : ms.statements()) {
        if (redefined) {
          stmts.push_back(st);
          continue;
        }
        stmts.push_back(rename_reads(st, from, to));
        if (written_variable(st) == from) redefined = true;
      }
      rebuilt.emplace_back(std::move(stmts));
    }
    loop[s].microsteps = std::move(rebuilt);
    if (redefined) return;
  }
}

struct StepRef {
  const SchedulingStep* step;
  ReadWriteSets rw;
};

std::optional<HazardConflict> conflict(const StepRef& older,
                                       const StepRef& newer) {
  const auto& a = older.rw;
  const auto& b = newer.rw;
  const auto& wa = older.step->label;
  const auto& wb = newer.step->label;
  for (const auto& v : a.writes) {
    if (b.reads.count(v) || b.writes.count(v)) return HazardConflict{wa, wb, v};
  }
  for (const auto& v : b.writes) {
    if (a.reads.count(v)) return HazardConflict{wb, wa, v};
  }
  if (a.mem_writes && (b.mem_reads || b.mem_writes)) {
    return HazardConflict{wa, wb, "memory"};
  }
  if (b.mem_writes && a.mem_reads) return HazardConflict{wb, wa, "memory"};
  return std::nullopt;
}

// Layout puts stage s of iteration j after stage s' of iteration j + d
// exactly when s - s' > d * interval, so checking d = 1 covers all d.
std::optional<HazardConflict> find_hazard(const Region& older,
                                          const Region& newer,
                                          unsigned interval) {
  std::vector<StepRef> o, n;
  for (const auto& s : older) o.push_back({&s, read_write_sets(s)});
  for (const auto& s : newer) n.push_back({&s, read_write_sets(s)});
  for (std::size_t s = o.size(); s-- > 0;) {
    for (std::size_t t = 0; t < n.size() && t + interval < s; ++t) {
      if (auto c = conflict(o[s], n[t])) return c;
    }
  }
  return std::nullopt;
}

SchedulingStep merge_steps(std::string label,
                           const std::vector<const SchedulingStep*>& parts) {
  SchedulingStep out{std::move(label), {}, {}};
  for (const auto* p : parts) {
    out.microsteps.insert(out.microsteps.end(), p->microsteps.begin(),
                          p->microsteps.end());
  }
  return out;
}

Result<PipelinedCcdfg> construct(const Region& pre, const Region& loop,
                                 unsigned interval, unsigned m,
                                 const std::set<std::string>& reserved) {
  const std::size_t L = loop.size();
  if (L == 0) return invalid("the loop region has no scheduling steps");
  if (interval == 0 || interval > L) {
    return invalid("interval " + std::to_string(interval) +
                   " is outside [1, " + std::to_string(L) + "]");
  }
  std::size_t lo = L > interval ? L - interval : 1;
  if (m < lo || m > L) {
    return invalid("m = " + std::to_string(m) + " is outside [" +
                   std::to_string(lo) + ", " + std::to_string(L) + "]");
  }
  if (pre.size() < L) {
    return invalid("the pre region does not end with a peeled iteration");
  }
  const std::size_t entry_len = pre.size() - L;
  Region peeled(pre.begin() + static_cast<std::ptrdiff_t>(entry_len), pre.end());
  for (std::size_t s = 1; s < L; ++s) {
    if (peeled[s].microsteps != loop[s].microsteps) {
      return invalid("peeled step '" + peeled[s].label +
                     "' differs from loop step '" + loop[s].label + "'");
    }
  }

  if (auto h = find_hazard(loop, loop, interval)) return SynthesisError{*h};
  if (auto h = find_hazard(peeled, loop, interval)) return SynthesisError{*h};

  PipelinedCcdfg out;
  out.entry.assign(pre.begin(), pre.begin() + static_cast<std::ptrdiff_t>(entry_len));
  std::set<std::string> used = reserved;
  for (const auto& l : labels_of(pre)) used.insert(l);
  for (const auto& l : labels_of(loop)) used.insert(l);

  const Layout lay = layout(L, interval, m);
  auto emit = [&](const std::vector<std::vector<Slot>>& cycles,
                  const std::string& prefix, bool absolute, Region& into) {
    for (std::size_t c = 0; c < cycles.size(); ++c) {
      std::vector<const SchedulingStep*> parts;
      for (const auto& slot : cycles[c]) {
        bool first = absolute && slot.iteration == 1;
        parts.push_back(first ? &peeled[slot.stage] : &loop[slot.stage]);
      }
      into.push_back(
          merge_steps(unique_label(prefix + "." + std::to_string(c), used),
                      parts));
    }
  };
  emit(lay.prologue, "prologue", true, out.prologue);
  emit(lay.fullstage, "full", false, out.fullstage);
  emit(lay.epilogue, "epilogue", false, out.epilogue);
  return out;
}

}  // namespace

std::string_view SynthesisError::kind_name() const {
  return std::visit(
      Overload{[](const HazardConflict&) { return std::string_view("HazardConflict"); },
               [](const NameClash&) { return std::string_view("NameCollision"); },
               [](const InvalidParams&) { return std::string_view("InvalidParams"); },
               [](const NotPipelinable&) { return std::string_view("NotPipelinable"); }},
      kind);
}

std::string SynthesisError::describe() const {
  std::ostringstream os;
  os << kind_name() << ": ";
  std::visit(
      Overload{
          [&](const HazardConflict& h) {
            os << "step '" << h.writer_step << "' writes " << h.var
               << " which step '" << h.reader_step
               << "' of an overlapping iteration accesses out of order";
          },
          [&](const NameClash& n) { os << "shadow name '" << n.var << "' is taken"; },
          [&](const InvalidParams& p) { os << p.reason; },
          [&](const NotPipelinable& p) {
            os << p.diagnostics.size() << " validation error(s)";
            for (const auto& d : p.diagnostics) {
              os << "\n  [" << d.rule << "]";
              if (!d.step.empty()) os << " step " << d.step << ":";
              os << ' ' << d.message;
            }
          }},
      kind);
  return os.str();
}

Result<Ccdfg> phi_elimination(const Ccdfg& c) {
  if (auto diags = validate_pipelinable(c); !diags.empty()) {
    return SynthesisError{NotPipelinable{std::move(diags)}};
  }
  const std::string& backedge = c.loop.back().label;
  std::set<std::string> used = labels_of(c.pre);
  for (const auto& r : {&c.loop, &c.post}) {
    for (const auto& l : labels_of(*r)) used.insert(l);
  }

  Ccdfg out;
  out.pre = c.pre;
  for (auto& s : out.pre) s.successors.clear();
  for (const auto& step : c.loop) {
    SchedulingStep peeled = resolve_phis(step, backedge, false);
    peeled.label = unique_label(step.label + std::string(kPeelSuffix), used);
    out.pre.push_back(std::move(peeled));
    out.loop.push_back(resolve_phis(step, backedge, true));
  }
  out.post = c.post;
  for (auto& s : out.post) s.successors.clear();
  return out;
}

Result<Region> shadow_insertion(const Region& loop, unsigned interval,
                                const std::set<std::string>& taken) {
  if (interval == 0) return invalid("interval must be positive");
  Region out = loop;
  std::set<std::string> names = taken;
  for (const auto& v : all_variables(loop)) names.insert(v);
  while (auto v = find_long_read(out, interval)) {
    std::string shadow;
    try {
      shadow = fresh_shadow_name(v->var, names);
    } catch (const NameCollision& e) {
      return SynthesisError{NameClash{e.name()}};
    }
    names.insert(shadow);
    // The copy runs in the cycle where the next iteration rewrites the
    // variable; the older iteration goes first within that superstep.
    std::size_t at = v->def_step + interval;
    rename_forward(out, at, v->var, shadow);
    auto& ms = out[at].microsteps;
    ms.insert(ms.begin(),
              Microstep({Assign{shadow, Expression::var(v->var)}}));
  }
  return out;
}

Result<unsigned> compute_m(unsigned loop_len, unsigned interval) {
  if (interval == 0 || interval >= loop_len) {
    return invalid("interval " + std::to_string(interval) +
                   " must be positive and below the loop length " +
                   std::to_string(loop_len));
  }
  return loop_len - interval;
}

Layout layout(std::size_t L, unsigned interval, unsigned m) {
  Layout out;
  const std::size_t i = interval;
  const std::size_t np = (m + i - 1) / i;
  out.started_in_prologue = np;

  for (std::size_t c = 0; c < m; ++c) {
    std::vector<Slot> cycle;
    for (std::size_t j = 1; (j - 1) * i <= c; ++j) {
      std::size_t stage = c - (j - 1) * i;
      if (stage < L) cycle.push_back({j, stage});
    }
    out.prologue.push_back(std::move(cycle));
  }

  for (std::size_t r = 0; r < i; ++r) {
    const std::size_t lowest = (m + r) % i;
    std::vector<Slot> cycle;
    for (std::size_t s = lowest; s < L; s += i) {
      cycle.insert(cycle.begin(), Slot{(s - lowest) / i, s});
    }
    out.fullstage.push_back(std::move(cycle));
  }

  const std::size_t drain = (np - 1) * i + L - m;
  for (std::size_t e = 0; e < drain; ++e) {
    std::vector<Slot> cycle;
    for (std::size_t d = np; d-- > 0;) {
      std::size_t stage = m + e + d * i - (np - 1) * i;
      if (stage < L) cycle.push_back({d, stage});
    }
    out.epilogue.push_back(std::move(cycle));
  }
  return out;
}

std::optional<HazardConflict> find_hazard(const Region& loop,
                                          unsigned interval) {
  return find_hazard(loop, loop, interval);
}

Result<PipelinedCcdfg> superstep_construction(const Region& pre,
                                              const Region& loop,
                                              unsigned interval, unsigned m) {
  return construct(pre, loop, interval, m, {});
}

Result<PipelineResult> pipeline(const Ccdfg& c, unsigned interval) {
  auto peeled = phi_elimination(c);
  if (!peeled) return peeled.error();
  const Ccdfg& cp = peeled.value();
  const std::size_t L = cp.loop.size();
  if (interval == 0 || interval > L) {
    return invalid("interval " + std::to_string(interval) +
                   " is outside [1, " + std::to_string(L) + "]");
  }

  std::set<std::string> taken = all_variables(cp);
  for (const auto& p : pointer_bases(cp)) taken.insert(p);

  const std::size_t entry_len = cp.pre.size() - L;
  Region first(cp.pre.begin() + static_cast<std::ptrdiff_t>(entry_len),
               cp.pre.end());
  auto shadow_first = shadow_insertion(first, interval, taken);
  if (!shadow_first) return shadow_first.error();
  auto shadow_loop = shadow_insertion(cp.loop, interval, taken);
  if (!shadow_loop) return shadow_loop.error();

  unsigned m = static_cast<unsigned>(L);
  if (interval < L) {
    auto cm = compute_m(static_cast<unsigned>(L), interval);
    if (!cm) return cm.error();
    m = cm.value();
  }

  Region pre(cp.pre.begin(), cp.pre.begin() + static_cast<std::ptrdiff_t>(entry_len));
  pre.insert(pre.end(), shadow_first.value().begin(), shadow_first.value().end());
  auto built = construct(pre, shadow_loop.value(), interval, m, labels_of(cp.post));
  if (!built) return built.error();

  PipelineResult out;
  out.design = std::move(built).value();
  out.design.exit = cp.post;
  out.params = PipelineParams{
      interval, m, static_cast<unsigned>((L + interval - 1) / interval)};
  out.sequential = cp;
  for (const auto& v : all_variables(shadow_loop.value())) {
    if (!taken.count(v)) out.shadows.push_back(v);
  }
  return out;
}

}  // namespace ccdfg::synth
