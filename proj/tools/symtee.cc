// Copyright 2026 The SymTEE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// symtee: scans TEE trusted-application C sources for memory copies whose
// length is never validated against the destination size.
//
// Exit codes: 0 clean, 1 findings (or bench thresholds missed), 2 error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "symtee/bench/bench.h"
#include "symtee/cparse/errors.h"
#include "symtee/cparse/parser.h"
#include "symtee/harness/lower.h"
#include "symtee/ir.h"
#include "symtee/llm/client.h"
#include "symtee/pipeline/pipeline.h"
#include "symtee/report/report.h"

namespace {

using namespace symtee;

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitError = 2;

struct Options {
  std::string sinks;
  std::string generator = "template";
  std::string engine = "builtin";
  std::uint64_t domain_bound = 4096;
  std::uint64_t default_capacity = 512;
  std::size_t path_budget = 4096;
  std::string format = "text";
  int jobs = 1;
  std::string out;
  std::string llm_transport = "replay";
  std::string llm_fixtures = "fixtures";
  std::string prompts = "prompts";
  int max_retries = 3;
  double price_per_token = 0.0;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot read file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to --out when given, else stdout.
void Emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(opt.out + ": cannot write output");
  out << text;
}

report::Format FormatOf(const Options& opt) {
  return opt.format == "json" ? report::Format::kJson : report::Format::kText;
}

std::shared_ptr<llm::LlmClient> MakeClient(const Options& opt) {
  std::shared_ptr<llm::Transport> t;
  if (opt.llm_transport == "replay") {
    t = std::make_shared<llm::ReplayTransport>(opt.llm_fixtures);
  } else if (opt.llm_transport == "live") {
    t = std::make_shared<llm::LiveTransport>(llm::LiveConfig::FromEnvironment());
  } else {
    std::string path = opt.llm_fixtures;
    if (std::filesystem::is_directory(path)) path += "/recorded.json";
    t = std::make_shared<llm::RecordTransport>(
        std::make_unique<llm::LiveTransport>(llm::LiveConfig::FromEnvironment()), path);
  }
  return std::make_shared<llm::LlmClient>(t);
}

pipeline::PipelineConfig MakeConfig(const Options& opt) {
  pipeline::PipelineConfig c;
  if (!opt.sinks.empty()) c.sinks = slicer::LoadSinkSpecs(ReadFile(opt.sinks));
  c.generator =
      opt.generator == "llm" ? pipeline::GeneratorKind::kLlm : pipeline::GeneratorKind::kTemplate;
  c.engine = opt.engine == "external" ? pipeline::EngineKind::kExternal
             : opt.engine == "both"   ? pipeline::EngineKind::kBoth
                                      : pipeline::EngineKind::kBuiltin;
  c.harness.domain_bound = opt.domain_bound;
  c.harness.default_capacity = opt.default_capacity;
  c.path_budget = opt.path_budget;
  c.jobs = opt.jobs;
  c.gen.max_retries = opt.max_retries;
  c.gen.prompts_dir = opt.prompts;
  c.external = symexec::EngineConfig::FromEnvironment();
  if (c.generator == pipeline::GeneratorKind::kLlm) c.llm = MakeClient(opt);
  c.Validate();
  return c;
}

int CmdScan(const Options& opt, const std::vector<std::string>& paths) {
  pipeline::PipelineConfig config = MakeConfig(opt);
  pipeline::ScanResult r = pipeline::ScanPaths(paths, config);
  for (const std::string& e : r.errors) std::cerr << "error: " << e << "\n";
  for (const pipeline::FileResult& f : r.files) {
    for (const pipeline::CandidateResult& c : f.candidates) {
      if (c.stage == pipeline::CandidateResult::Stage::kSliceFailed ||
          c.stage == pipeline::CandidateResult::Stage::kHarnessFailed) {
        std::cerr << "warning: " << f.path << ":" << c.line << ": " << c.api << " in "
                  << c.function << " not verified (" << pipeline::StageName(c.stage)
                  << "): " << c.detail << "\n";
      }
    }
  }
  if (!r.ok() && r.findings.empty() && r.files.empty()) return kExitError;
  Emit(opt, report::RenderReport(r.findings, FormatOf(opt)));
  return r.ExitCode();
}

int CmdHarness(const Options& opt, const std::string& file, const std::string& function,
               std::uint32_t line, bool emit_ir) {
  pipeline::PipelineConfig config = MakeConfig(opt);
  cparse::TranslationUnit unit = cparse::ParseUnit(ReadFile(file), file);
  for (const slicer::SinkCandidate& cand : slicer::AnalyzeUnit(unit, config.sinks)) {
    if (!function.empty() && cand.function_name != function) continue;
    if (line != 0 && cand.call_span.start_line != line) continue;
    if (slicer::ShouldDrop(cand)) {
      std::cerr << "note: " << file << ":" << cand.call_span.start_line
                << ": sink is guarded or its length is opaque; synthesizing anyway\n";
    }
    slicer::Slice slice = slicer::ExtractSlice(cand, unit);
    if (!emit_ir && config.generator == pipeline::GeneratorKind::kTemplate) {
      // Printed even when the harness would not lower, to help debugging.
      Emit(opt, harness::RenderSource(harness::BuildModel(slice, config.harness)));
      return kExitClean;
    }
    pipeline::HarnessArtifact a = pipeline::SynthesizeHarness(slice, config);
    if (!a.fallback_reason.empty()) std::cerr << "note: " << a.fallback_reason << "\n";
    Emit(opt, emit_ir ? ir::Dump(a.ir) : a.source);
    return kExitClean;
  }
  std::cerr << "error: no matching sink call in " << file << "\n";
  return kExitError;
}

int CmdExec(const Options& opt, const std::string& file) {
  pipeline::PipelineConfig config = MakeConfig(opt);
  pipeline::HarnessArtifact a;
  a.source = ReadFile(file);
  harness::LoweringConfig lc;
  for (const slicer::SinkSpec& s : config.sinks) lc.sink_names.push_back(s.api_name);
  lc.max_paths = config.path_budget;
  a.ir = harness::LiftSourceToHir(a.source, lc);
  pipeline::EngineVerdict v = pipeline::RunEngine(a, config);
  std::string engine = config.engine == pipeline::EngineKind::kExternal ? "external" : "builtin";
  if (opt.format == "json") {
    nlohmann::ordered_json doc = {{"version", report::kSchemaVersion},
                                  {"tool", report::kToolName},
                                  {"harness", file},
                                  {"engine", engine}};
    doc["violations"] = nlohmann::ordered_json::array();
    for (const symexec::Violation& x : v.violations) {
      nlohmann::ordered_json w = nlohmann::ordered_json::object();
      for (const auto& [name, value] : x.witness.assignment) w[name] = value;
      doc["violations"].push_back({{"assert_site", x.assert_site},
                                   {"message", x.message},
                                   {"witness", w},
                                   {"path", x.path.ToString()}});
    }
    Emit(opt, doc.dump() + "\n");
  } else {
    std::ostringstream out;
    if (v.violations.empty()) out << file << ": no assertion can fail (" << engine << ")\n";
    for (const symexec::Violation& x : v.violations) {
      out << file << ": assert #" << x.assert_site << " fails";
      if (!x.message.empty()) out << " (" << x.message << ")";
      out << " with " << (x.witness.assignment.empty() ? "no input" : x.witness.ToString())
          << "\n  path: " << x.path.ToString() << "\n";
    }
    Emit(opt, out.str());
  }
  return v.violations.empty() ? kExitClean : kExitFindings;
}

int CmdBench(const Options& opt, const std::string& root, double min_precision,
             double min_recall, const std::string& json_out) {
  std::vector<bench::CorpusCase> cases;
  try {
    cases = bench::LoadCorpus(root);
  } catch (const bench::CorpusError& e) {
    std::cerr << "error: corpus: " << e.what() << "\n";
    return kExitError;
  }
  pipeline::PipelineConfig config = MakeConfig(opt);
  std::vector<bench::CaseOutcome> outcomes = bench::RunCorpus(cases, config);
  bench::BenchScore score = bench::Score(outcomes, opt.price_per_token);
  std::string json = bench::RenderScoreJson(score, outcomes);
  Emit(opt, opt.format == "json" ? json : bench::RenderScoreText(score, outcomes));
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(json_out + ": cannot write output");
    out << json;
  }
  if (score.errors > 0) return kExitError;
  bool ok = bench::MeetsPercent(score.total.tp, score.total.n, min_precision) &&
            bench::MeetsPercent(score.total.tp, score.total.vul, min_recall);
  return ok ? kExitClean : kExitFindings;
}

int CmdReport(const Options& opt, const std::string& file) {
  std::vector<report::Finding> findings = report::ParseReport(ReadFile(file));
  Emit(opt, report::RenderReport(findings, FormatOf(opt)));
  return findings.empty() ? kExitClean : kExitFindings;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detects unvalidated copy lengths in TEE trusted-application C code."};
  app.fallthrough();
  app.require_subcommand(1);
  Options opt;
  app.add_option("--sinks", opt.sinks, "JSON sink specification file")->check(CLI::ExistingFile);
  app.add_option("--generator", opt.generator, "harness generator")
      ->check(CLI::IsMember({"template", "llm"}))
      ->capture_default_str();
  app.add_option("--engine", opt.engine, "symbolic engine")
      ->check(CLI::IsMember({"builtin", "external", "both"}))
      ->capture_default_str();
  app.add_option("--domain-bound", opt.domain_bound, "upper bound for symbolic lengths")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--default-capacity", opt.default_capacity,
                 "destination size assumed when it cannot be resolved")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--path-budget", opt.path_budget, "maximum paths explored per harness")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  app.add_option("--jobs", opt.jobs, "files scanned in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", opt.out, "write output to this file instead of stdout");
  app.add_option("--llm-transport", opt.llm_transport, "LLM transport")
      ->check(CLI::IsMember({"live", "replay", "record"}))
      ->capture_default_str();
  app.add_option("--llm-fixtures", opt.llm_fixtures, "fixture file or directory")
      ->capture_default_str();
  app.add_option("--prompts", opt.prompts, "prompt template directory")->capture_default_str();
  app.add_option("--max-retries", opt.max_retries, "LLM retries after the first attempt")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--price-per-token", opt.price_per_token, "for the usage cost estimate")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  std::vector<std::string> scan_paths;
  auto* scan = app.add_subcommand("scan", "scan files or directories and report findings");
  scan->add_option("paths", scan_paths, "C files or directories")->required();

  std::string harness_file, harness_function;
  std::uint32_t harness_line = 0;
  bool harness_ir = false;
  auto* harness = app.add_subcommand("harness", "print the harness for one sink call");
  harness->add_option("file", harness_file, "C source file")->required();
  harness->add_option("--function", harness_function, "function containing the sink");
  harness->add_option("--line", harness_line, "line of the sink call");
  harness->add_flag("--ir", harness_ir, "print the lowered IR instead of C");

  std::string exec_file;
  auto* exec = app.add_subcommand("exec", "run a harness file through an engine");
  exec->add_option("harness", exec_file, "harness C file")->required();

  std::string bench_root;
  double min_precision = 100.0, min_recall = 92.0;
  std::string bench_json;
  auto* bench = app.add_subcommand("bench", "score the scanner on a labeled corpus");
  bench->add_option("corpus", bench_root, "corpus root")->required();
  bench->add_option("--min-precision", min_precision, "required precision in percent")
      ->capture_default_str();
  bench->add_option("--min-recall", min_recall, "required recall in percent")
      ->capture_default_str();
  bench->add_option("--json-out", bench_json, "also write the JSON score here");

  std::string report_file;
  auto* rep = app.add_subcommand("report", "re-render a saved JSON report");
  rep->add_option("file", report_file, "JSON report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitClean : kExitError;
  }

  try {
    if (*scan) return CmdScan(opt, scan_paths);
    if (*harness) return CmdHarness(opt, harness_file, harness_function, harness_line, harness_ir);
    if (*exec) return CmdExec(opt, exec_file);
    if (*bench) return CmdBench(opt, bench_root, min_precision, min_recall, bench_json);
    if (*rep) return CmdReport(opt, report_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
