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


#include "symtee/pipeline/pipeline.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "symtee/cparse/errors.h"
#include "symtee/cparse/parser.h"
#include "symtee/harness/lower.h"

namespace symtee::pipeline {

namespace fs = std::filesystem;

void PipelineConfig::Validate() const {
  if (generator == GeneratorKind::kLlm && !llm) {
    throw std::invalid_argument("the llm generator needs a transport");
  }
  if (harness.domain_bound == 0) throw std::invalid_argument("domain bound must be positive");
  if (harness.default_capacity == 0) {
    throw std::invalid_argument("default capacity must be positive");
  }
  if (path_budget == 0) throw std::invalid_argument("path budget must be positive");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

std::string StageName(CandidateResult::Stage stage) {
  switch (stage) {
    case CandidateResult::Stage::kSliceFailed:
      return "slice_failed";
    case CandidateResult::Stage::kHarnessFailed:
      return "harness_failed";
    case CandidateResult::Stage::kClean:
      return "clean";
    case CandidateResult::Stage::kConfirmed:
      return "confirmed";
  }
  return "clean";
}

HarnessArtifact SynthesizeHarness(const slicer::Slice& slice, const PipelineConfig& config) {
  HarnessArtifact a;
  a.model = harness::BuildModel(slice, config.harness);
  if (config.generator == GeneratorKind::kLlm) {
    harness::GenConfig gen = config.gen;
    gen.harness = config.harness;
    try {
      harness::GenResult r = harness::GenerateViaLlm(slice, *config.llm, gen);
      a.source = std::move(r.source);
      a.calls = std::move(r.calls);
      a.generator = report::Generator::kLlm;
      a.ir = harness::LiftSourceToHir(a.source, harness::LoweringConfigFor(a.model));
      return a;
    } catch (const harness::GenError& e) {
      a.calls = e.calls();
      a.generator = report::Generator::kLlmFallbackTemplate;
      a.fallback_reason = e.what();
    }
  }
  a.source = harness::RenderSource(a.model);
  a.ir = harness::RenderHir(a.model);
  return a;
}

const symexec::Violation& PickViolation(const std::vector<symexec::Violation>& violations) {
  return *std::min_element(
      violations.begin(), violations.end(),
      [](const symexec::Violation& a, const symexec::Violation& b) {
        return std::tie(a.witness.assignment, a.assert_site) <
               std::tie(b.witness.assignment, b.assert_site);
      });
}

namespace {

symexec::ExecConfig ExecConfigFor(const PipelineConfig& config) {
  symexec::ExecConfig ec;
  ec.domain_bound = config.harness.domain_bound;
  ec.max_paths = config.path_budget;
  return ec;
}

// True when `witness` drives the IR into a failing assertion.
bool Reproduces(const ir::HarnessIR& ir, const symexec::Witness& witness) {
  auto run = symexec::ExecuteConcrete(ir, witness.AsMap());
  return run.assumptions_hold && run.failed_assert.has_value();
}

}  // namespace

EngineVerdict RunEngine(const HarnessArtifact& artifact, const PipelineConfig& config) {
  EngineVerdict v;
  if (config.engine != EngineKind::kExternal) {
    v.violations = symexec::FindViolations(artifact.ir, ExecConfigFor(config));
  }
  if (config.engine == EngineKind::kBuiltin) return v;

  symexec::EngineOutcome out = symexec::ExternalEngineRun(artifact.source, config.external);
  v.log_excerpt = out.log_excerpt;
  using Status = symexec::EngineOutcome::Status;
  if (out.status == Status::kEngineUnavailable) {
    throw ScanError("external engine unavailable: set SYMTEE_ENGINE_PATH");
  }
  if (out.status == Status::kEngineFailure) {
    throw ScanError("external engine failed: " + out.log_excerpt);
  }
  if (config.engine == EngineKind::kExternal) {
    v.violations = std::move(out.violations);
    return v;
  }
  // Both: the external witness must reproduce on the IR and the verdicts
  // must agree on whether anything fails.
  if (v.violations.empty() != out.violations.empty()) {
    throw symexec::DiscrepancyError(
        std::string("engines disagree: builtin reports ") +
        (v.violations.empty() ? "no violation" : "a violation") + ", external reports " +
        (out.violations.empty() ? "none" : "one"));
  }
  for (const symexec::Violation& ext : out.violations) {
    if (!Reproduces(artifact.ir, ext.witness)) {
      throw symexec::DiscrepancyError("external witness " + ext.witness.ToString() +
                                      " does not reproduce on the builtin IR");
    }
  }
  return v;
}

std::vector<llm::UsageRecord> FileResult::Usage() const {
  std::vector<llm::UsageRecord> out;
  for (const CandidateResult& c : candidates) out.insert(out.end(), c.calls.begin(), c.calls.end());
  return out;
}

int ScanResult::ExitCode() const {
  if (!errors.empty()) return 2;
  return findings.empty() ? 0 : 1;
}

FileResult ScanSource(const std::string& source, const std::string& display_path,
                      const PipelineConfig& config) {
  FileResult result;
  result.path = display_path;
  cparse::TranslationUnit unit;
  try {
    unit = cparse::ParseUnit(source, display_path);
  } catch (const cparse::ParseError& e) {
    result.errors.push_back(display_path + ":" + std::to_string(e.line()) + ":" +
                            std::to_string(e.column()) + ": " + e.what());
    return result;
  } catch (const cparse::DuplicateDefinition& e) {
    result.errors.push_back(display_path + ": " + e.what());
    return result;
  }

  std::vector<slicer::SinkCandidate> cands = slicer::AnalyzeUnit(unit, config.sinks);
  result.sink_calls = cands.size();
  for (const slicer::SinkCandidate& cand : cands) {
    if (slicer::ShouldDrop(cand)) {
      ++result.dropped;
      continue;
    }
    CandidateResult cr;
    cr.function = cand.function_name;
    cr.line = cand.call_span.start_line;
    cr.api = cand.spec.api_name;
    slicer::Slice slice;
    try {
      slice = slicer::ExtractSlice(cand, unit);
    } catch (const slicer::SliceError& e) {
      cr.stage = CandidateResult::Stage::kSliceFailed;
      cr.detail = e.what();
      result.candidates.push_back(std::move(cr));
      continue;
    }

    HarnessArtifact artifact;
    try {
      artifact = SynthesizeHarness(slice, config);
    } catch (const harness::LoweringError& e) {
      cr.stage = CandidateResult::Stage::kHarnessFailed;
      cr.detail = e.what();
      result.candidates.push_back(std::move(cr));
      continue;
    } catch (const cparse::ParseError& e) {
      cr.stage = CandidateResult::Stage::kHarnessFailed;
      cr.detail = e.what();
      result.candidates.push_back(std::move(cr));
      continue;
    } catch (const std::exception& e) {
      // Transport errors, fixture misses and missing prompt files.
      result.errors.push_back(display_path + ":" + std::to_string(cr.line) + ": " + e.what());
      continue;
    }
    cr.generator = artifact.generator;
    cr.calls = artifact.calls;
    cr.harness_source = artifact.source;
    if (!artifact.fallback_reason.empty()) cr.detail = artifact.fallback_reason;

    EngineVerdict verdict;
    try {
      verdict = RunEngine(artifact, config);
    } catch (const symexec::PathBudgetExceeded& e) {
      cr.stage = CandidateResult::Stage::kHarnessFailed;
      cr.detail = e.what();
      result.candidates.push_back(std::move(cr));
      continue;
    } catch (const std::exception& e) {
      result.errors.push_back(display_path + ":" + std::to_string(cr.line) + ": " + e.what());
      cr.detail = e.what();
      result.candidates.push_back(std::move(cr));
      continue;
    }

    if (verdict.violations.empty()) {
      cr.stage = CandidateResult::Stage::kClean;
    } else {
      cr.stage = CandidateResult::Stage::kConfirmed;
      report::FindingContext ctx;
      ctx.capacity_bytes = artifact.model.capacity_bytes;
      ctx.default_capacity = config.harness.default_capacity;
      ctx.oracle_kind = harness::OracleKindName(artifact.model.oracle.kind);
      ctx.generator = artifact.generator;
      try {
        cparse::TranslationUnit hunit = cparse::ParseUnit(artifact.source, "harness.c");
        if (const cparse::Node* fn = cparse::FindFunction(hunit, cand.function_name)) {
          ctx.harness_first = fn->span.start_line;
          ctx.harness_last = fn->span.end_line;
          ctx.source_first = cand.function->span.start_line;
        }
      } catch (const std::exception&) {
        // The path is omitted when the harness does not re-parse.
      }
      cr.finding =
          report::AssembleFinding(cand, slice, PickViolation(verdict.violations), ctx);
      result.findings.push_back(*cr.finding);
    }
    result.candidates.push_back(std::move(cr));
  }
  return result;
}

FileResult ScanFile(const std::string& path, const PipelineConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    FileResult r;
    r.path = path;
    r.errors.push_back(path + ": cannot read file");
    return r;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ScanSource(ss.str(), path, config);
}

std::vector<std::string> CollectSources(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const std::string& p : paths) {
    fs::path path(p);
    if (!fs::exists(path)) throw ScanError(p + ": no such file or directory");
    if (fs::is_directory(path)) {
      std::vector<std::string> found;
      for (const auto& e : fs::recursive_directory_iterator(path)) {
        if (e.is_regular_file() && e.path().extension() == ".c") {
          found.push_back(e.path().lexically_normal().generic_string());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(path.lexically_normal().generic_string());
    }
  }
  return out;
}

ScanResult ScanPaths(const std::vector<std::string>& paths, const PipelineConfig& config) {
  ScanResult result;
  std::vector<std::string> files;
  try {
    files = CollectSources(paths);
  } catch (const ScanError& e) {
    result.errors.push_back(e.what());
    return result;
  }
  result.files.resize(files.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < files.size(); i = next++) {
      result.files[i] = ScanFile(files[i], config);
    }
  };
  int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(files.size())));
  std::vector<std::thread> threads;
  for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  for (const FileResult& f : result.files) {
    result.findings.insert(result.findings.end(), f.findings.begin(), f.findings.end());
    result.errors.insert(result.errors.end(), f.errors.begin(), f.errors.end());
  }
  report::SortFindings(&result.findings);
  return result;
}

}  // namespace symtee::pipeline
