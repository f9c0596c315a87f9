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

#include "ccdfg/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccdfg/equiv.hpp"
#include "ccdfg/interp.hpp"
#include "ccdfg/sweep.hpp"
#include "ccdfg/synth.hpp"
#include "ccdfg/textio.hpp"

namespace ccdfg::cli {

namespace {

using json = nlohmann::ordered_json;

// Thrown for conditions that map to exit 2 after argument parsing.
struct UsageError {
  std::string message;
};

struct Config {
  std::string command;
  std::string input;
  std::string state_path;
  bool zero_init = false;
  std::size_t k = 1;
  bool trace = false;
  std::string prev;
  Word mem_size = 16;
  unsigned interval = 0;
  std::size_t k_max = 8;
  std::size_t samples = 20;
  std::uint64_t seed = 0;
  std::string pipelined_input;
  std::string output;
  std::string format = "text";
  bool serial = false;
  unsigned width = kDefaultWidth;

  bool machine() const { return format != "text"; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{"cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

textio::CcdfgDocument load_design(const std::string& path, unsigned width) {
  std::string text = read_file(path);
  try {
    return textio::parse_ccdfg(text, width);
  } catch (const textio::ParseError& e) {
    throw UsageError{path + ":" + e.what()};
  }
}

const Ccdfg& sequential_of(const textio::CcdfgDocument& doc,
                           const std::string& path) {
  if (doc.is_pipelined()) {
    throw UsageError{path + ": expected a sequential design"};
  }
  return std::get<Ccdfg>(doc.design);
}

json state_json(const CcdfgState& s) {
  json j;
  json vars = json::object();
  for (const auto& [k, v] : equiv::in_order(s).bindings) vars[k] = v;
  j["vars"] = vars;
  json mem = json::object();
  for (const auto& [a, v] : s.memory) mem[std::to_string(a)] = v;
  j["mem"] = mem;
  json ptrs = json::object();
  for (const auto& [k, v] : s.pointers) ptrs[k] = v;
  j["ptrs"] = ptrs;
  return j;
}

std::string_view phase_name(interp::Phase p) {
  switch (p) {
    case interp::Phase::Entry:
      return "entry";
    case interp::Phase::Loop:
      return "loop";
    case interp::Phase::Exit:
      return "exit";
  }
  return "?";
}

// Everything the design may read, as one sequential view.
Ccdfg flatten(const PipelinedCcdfg& p) {
  Ccdfg c;
  c.pre = p.leading();
  c.loop = p.fullstage;
  c.post = p.epilogue;
  c.post.insert(c.post.end(), p.exit.begin(), p.exit.end());
  return c;
}

std::optional<unsigned> meta_uint(const textio::CcdfgDocument& doc,
                                  std::string_view key) {
  const std::string* v = doc.find_meta(key);
  if (!v) return std::nullopt;
  try {
    std::size_t used = 0;
    unsigned long n = std::stoul(*v, &used);
    if (used != v->size()) return std::nullopt;
    return static_cast<unsigned>(n);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

int cmd_validate(const Config& cfg, std::ostream& out) {
  auto doc = load_design(cfg.input, cfg.width);
  std::vector<Diagnostic> diags;
  if (!doc.is_pipelined()) diags = validate_pipelinable(std::get<Ccdfg>(doc.design));
  if (cfg.machine()) {
    json j;
    j["command"] = "validate";
    j["valid"] = diags.empty();
    json arr = json::array();
    for (const auto& d : diags) {
      arr.push_back({{"rule", d.rule}, {"step", d.step}, {"message", d.message}});
    }
    j["diagnostics"] = arr;
    out << j.dump(2) << '\n';
  } else if (diags.empty()) {
    out << "ok: design is pipelinable\n";
  } else {
    for (const auto& d : diags) {
      out << "[" << d.rule << "]";
      if (!d.step.empty()) out << " step " << d.step << ":";
      out << ' ' << d.message << '\n';
    }
  }
  return diags.empty() ? kExitOk : kExitFailure;
}

int cmd_run(const Config& cfg, std::ostream& out, std::ostream& err) {
  auto doc = load_design(cfg.input, cfg.width);
  Ccdfg view = doc.is_pipelined() ? flatten(std::get<PipelinedCcdfg>(doc.design))
                                  : std::get<Ccdfg>(doc.design);
  equiv::SampleOptions opts{cfg.width, cfg.mem_size};
  CcdfgState init;
  if (!cfg.state_path.empty()) {
    try {
      init = textio::parse_state(read_file(cfg.state_path), cfg.width);
    } catch (const textio::ParseError& e) {
      throw UsageError{cfg.state_path + ":" + e.what()};
    }
  } else {
    init = equiv::zero_state(view, opts);
  }

  interp::PrevLabel prev;
  if (!cfg.prev.empty()) prev = cfg.prev;
  interp::Trace trace;
  CcdfgState final_state;
  try {
    if (doc.is_pipelined()) {
      final_state = interp::run(std::get<PipelinedCcdfg>(doc.design), cfg.k,
                                init, prev, &trace);
    } else {
      final_state = interp::run(std::get<Ccdfg>(doc.design), cfg.k, init, prev,
                                &trace);
    }
  } catch (const interp::ExecError& e) {
    if (cfg.machine()) {
      json j;
      j["command"] = "run";
      j["error"] = std::string(interp::kind_name(e.kind()));
      j["message"] = e.what();
      out << j.dump(2) << '\n';
    }
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  // A pipelined run of k full-stage traversals completes k + ceil(m/i)
  // source iterations.
  std::optional<std::size_t> source_iters;
  if (!doc.is_pipelined()) {
    source_iters = cfg.k;
  } else if (auto i = meta_uint(doc, "interval"), m = meta_uint(doc, "m");
             i && m && *i > 0) {
    source_iters = cfg.k + (*m + *i - 1) / *i;
  }

  CcdfgState shown = equiv::in_order(final_state);
  if (cfg.machine()) {
    json j;
    j["command"] = "run";
    j["design"] = doc.is_pipelined() ? "pipelined" : "sequential";
    j["k"] = cfg.k;
    j["source_iterations"] = source_iters ? json(*source_iters) : json(nullptr);
    j["cycles"] = trace.cycles();
    j["loop_cycles"] = trace.loop_cycles();
    if (cfg.trace) {
      json arr = json::array();
      for (const auto& e : trace.entries) {
        arr.push_back({{"cycle", e.cycle},
                       {"phase", phase_name(e.phase)},
                       {"step", e.label}});
      }
      j["trace"] = arr;
    }
    j["state"] = state_json(shown);
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  if (cfg.trace) interp::write_trace(out, trace);
  out << "iterations: " << cfg.k;
  if (doc.is_pipelined() && source_iters) {
    out << " full-stage traversals (" << *source_iters << " source iterations)";
  }
  out << "\ncycles: " << trace.cycles() << " (" << trace.loop_cycles()
      << " in the loop)\n";
  out << textio::serialize_state(shown);
  return kExitOk;
}

void print_synthesis_error(const synth::SynthesisError& e, const Config& cfg,
                           std::ostream& out, std::ostream& err) {
  if (cfg.machine()) {
    json j;
    j["command"] = cfg.command;
    j["error"] = std::string(e.kind_name());
    if (const auto* h = std::get_if<synth::HazardConflict>(&e.kind)) {
      j["writer_step"] = h->writer_step;
      j["reader_step"] = h->reader_step;
      j["var"] = h->var;
    }
    j["message"] = e.describe();
    out << j.dump(2) << '\n';
  }
  err << "error: " << e.describe() << '\n';
}

void write_output(const Config& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output.empty() || cfg.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw UsageError{"cannot write '" + cfg.output + "'"};
  f << text;
}

int cmd_pipeline(const Config& cfg, std::ostream& out, std::ostream& err) {
  auto doc = load_design(cfg.input, cfg.width);
  const Ccdfg& c = sequential_of(doc, cfg.input);
  auto result = synth::pipeline(c, cfg.interval);
  if (!result) {
    print_synthesis_error(result.error(), cfg, out, err);
    return kExitFailure;
  }
  const auto& r = result.value();
  textio::CcdfgDocument pdoc;
  pdoc.design = r.design;
  pdoc.meta = {{"interval", std::to_string(r.params.interval)},
               {"m", std::to_string(r.params.m)},
               {"depth", std::to_string(r.params.depth)}};
  if (!r.shadows.empty()) {
    std::string joined;
    for (const auto& s : r.shadows) joined += (joined.empty() ? "" : " ") + s;
    pdoc.meta.emplace_back("shadows", joined);
  }
  std::string text = textio::serialize_ccdfg(pdoc);
  if (cfg.machine()) {
    json j;
    j["command"] = "pipeline";
    j["interval"] = r.params.interval;
    j["m"] = r.params.m;
    j["depth"] = r.params.depth;
    j["prologue"] = r.design.prologue.size();
    j["fullstage"] = r.design.fullstage.size();
    j["epilogue"] = r.design.epilogue.size();
    j["shadows"] = r.shadows;
    j["document"] = text;
    write_output(cfg, out, j.dump(2) + "\n");
  } else {
    write_output(cfg, out, text);
  }
  return kExitOk;
}

int cmd_check(const Config& cfg, std::ostream& out, std::ostream& err) {
  auto doc = load_design(cfg.input, cfg.width);
  const Ccdfg& c = sequential_of(doc, cfg.input);
  auto result = synth::pipeline(c, cfg.interval);
  if (!result) {
    print_synthesis_error(result.error(), cfg, out, err);
    err << "pipeline not generated; nothing to check\n";
    return kExitFailure;
  }
  const auto& r = result.value();
  PipelinedCcdfg design = r.design;
  if (!cfg.pipelined_input.empty()) {
    auto pdoc = load_design(cfg.pipelined_input, cfg.width);
    if (!pdoc.is_pipelined()) {
      throw UsageError{cfg.pipelined_input + ": expected a pipelined design"};
    }
    design = std::get<PipelinedCcdfg>(pdoc.design);
  }

  const bool invariant = cfg.command == "check-invariant";
  auto job = sweep::make_job(
      invariant ? sweep::CheckKind::Invariant : sweep::CheckKind::Correctness,
      design, r.sequential, r.params.interval, r.params.m);
  job.k_max = cfg.k_max;
  job.samples = cfg.samples;
  job.seed = cfg.seed;
  job.sample = equiv::SampleOptions{cfg.width, cfg.mem_size};
  auto cells = cfg.serial ? sweep::sweep_serial(job) : sweep::sweep_parallel(job);
  const std::size_t failures = sweep::count_failures(cells);
  const sweep::SweepCell* first_fail = nullptr;
  for (const auto& cell : cells) {
    if (!cell.report.passed) {
      first_fail = &cell;
      break;
    }
  }

  if (cfg.machine()) {
    json j;
    j["command"] = cfg.command;
    j["interval"] = r.params.interval;
    j["m"] = r.params.m;
    j["k_max"] = cfg.k_max;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    json arr = json::array();
    for (const auto& cell : cells) {
      json cj = json::parse(equiv::report_json(cell.report));
      cj["sample"] = cell.sample;
      cj["seed"] = cell.seed;
      arr.push_back(cj);
    }
    j["results"] = arr;
    j["failures"] = failures;
    j["passed"] = failures == 0;
    out << j.dump(2) << '\n';
  } else {
    out << (invariant ? "check-invariant" : "check-equiv")
        << " interval=" << r.params.interval << " m=" << r.params.m
        << " samples=" << cfg.samples << " seed=" << cfg.seed << '\n';
    std::size_t i = 0;
    for (std::size_t k = 1; k <= cfg.k_max; ++k) {
      out << "k=" << k << (k < 10 ? "  " : " ");
      for (std::size_t n = 0; n < cfg.samples; ++n, ++i) {
        out << (cells[i].report.passed ? '.' : 'X');
      }
      out << '\n';
    }
    out << (cells.size() - failures) << "/" << cells.size() << " passed\n";
    if (first_fail) {
      out << "first failure (sample " << first_fail->sample << "): ";
      equiv::write_report_line(out, first_fail->report);
    }
  }
  return failures == 0 ? kExitOk : kExitFailure;
}

unsigned width_from_env() {
  const char* w = std::getenv("CCDFG_WIDTH");
  if (!w || !*w) return kDefaultWidth;
  char* end = nullptr;
  unsigned long v = std::strtoul(w, &end, 10);
  if (*end != '\0' || v < 1 || v > kMaxWidth) {
    throw UsageError{"CCDFG_WIDTH must be an integer in [1, 64]"};
  }
  return static_cast<unsigned>(v);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  Config cfg;
  CLI::App app{"CCDFG loop pipeliner and translation validator", "ccdfg"};
  app.require_subcommand(1);

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"text", "json", "machine-readable"}));
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "Design file (.ccdfg)")->required();
  };

  auto* validate = app.add_subcommand("validate", "Check pipelinability rules");
  add_input(validate);
  add_format(validate);

  auto* run = app.add_subcommand("run", "Execute a design");
  add_input(run);
  add_format(run);
  auto* state_opt = run->add_option("--state", cfg.state_path, "Initial state (.cstate)");
  run->add_flag("--zero-init", cfg.zero_init,
                "Bind live-ins and memory to 0")
      ->excludes(state_opt);
  run->add_option("-k,--iterations", cfg.k,
                  "Loop iterations (full-stage traversals for pipelined designs)");
  run->add_flag("--trace", cfg.trace, "Print one record per cycle");
  run->add_option("--prev", cfg.prev, "Label seen by the first step");
  run->add_option("--mem-size", cfg.mem_size, "Memory words per pointer")
      ->check(CLI::PositiveNumber);

  auto* pipe = app.add_subcommand("pipeline", "Pipeline a sequential design");
  add_input(pipe);
  add_format(pipe);
  pipe->add_option("--interval", cfg.interval, "Pipeline interval")
      ->required()
      ->check(CLI::PositiveNumber);
  pipe->add_option("-o,--output", cfg.output, "Output path");

  for (const char* name : {"check-equiv", "check-invariant"}) {
    auto* sub = app.add_subcommand(
        name, std::string(name) == "check-equiv"
                  ? "Sweep the correctness check over k and random states"
                  : "Sweep the backedge invariant over k and random states");
    add_input(sub);
    add_format(sub);
    sub->add_option("--interval", cfg.interval, "Pipeline interval")
        ->required()
        ->check(CLI::PositiveNumber);
    sub->add_option("--kmax", cfg.k_max, "Largest k")->check(CLI::PositiveNumber);
    sub->add_option("--samples", cfg.samples, "Random states per k")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Base seed");
    sub->add_option("--mem-size", cfg.mem_size, "Memory words per pointer")
        ->check(CLI::PositiveNumber);
    sub->add_option("--pipelined-input", cfg.pipelined_input,
                    "Check this pipelined design instead of the synthesized one");
    sub->add_flag("--serial", cfg.serial, "Run the sweep on one thread");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    cfg.width = width_from_env();
    auto* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (sub == run && cfg.state_path.empty() && !cfg.zero_init) {
      throw UsageError{"run needs --state FILE or --zero-init"};
    }
    if (sub == validate) return cmd_validate(cfg, out);
    if (sub == run) return cmd_run(cfg, out, err);
    if (sub == pipe) return cmd_pipeline(cfg, out, err);
    return cmd_check(cfg, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.message << '\n';
    return kExitUsage;
  }
}

}  // namespace ccdfg::cli
