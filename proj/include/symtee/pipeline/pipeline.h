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


// End-to-end scanning: parse, slice, synthesize a harness, run an engine and
// assemble findings.

#ifndef SYMTEE_PIPELINE_PIPELINE_H_
#define SYMTEE_PIPELINE_PIPELINE_H_

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symtee/harness/harness.h"
#include "symtee/harness/llm_gen.h"
#include "symtee/ir.h"
#include "symtee/llm/client.h"
#include "symtee/report/report.h"
#include "symtee/slicer/slicer.h"
#include "symtee/symexec/external.h"
#include "symtee/symexec/symexec.h"

namespace symtee::pipeline {

enum class GeneratorKind { kTemplate, kLlm };
enum class EngineKind { kBuiltin, kExternal, kBoth };

struct PipelineConfig {
  std::vector<slicer::SinkSpec> sinks = slicer::DefaultSinkSpecs();
  GeneratorKind generator = GeneratorKind::kTemplate;
  EngineKind engine = EngineKind::kBuiltin;
  harness::HarnessConfig harness;
  std::size_t path_budget = 4096;
  // Required for the llm generator.
  std::shared_ptr<llm::LlmClient> llm;
  harness::GenConfig gen;
  symexec::EngineConfig external;
  int jobs = 1;

  // Throws std::invalid_argument when the combination cannot run.
  void Validate() const;
};

class ScanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A harness ready for an engine.
struct HarnessArtifact {
  harness::HarnessModel model;
  std::string source;
  ir::HarnessIR ir;
  report::Generator generator = report::Generator::kTemplate;
  std::vector<llm::UsageRecord> calls;
  std::string fallback_reason;  // set when the LLM generator gave up
};

// Throws harness::LoweringError for unliftable template harnesses and
// propagates transport errors from the LLM client.
HarnessArtifact SynthesizeHarness(const slicer::Slice& slice, const PipelineConfig& config);

struct EngineVerdict {
  std::vector<symexec::Violation> violations;
  std::string log_excerpt;  // external engine only
};

// Runs the configured engine(s). `both` throws symexec::DiscrepancyError when
// the engines disagree on the violation set; an unavailable or failing
// external engine throws ScanError.
EngineVerdict RunEngine(const HarnessArtifact& artifact, const PipelineConfig& config);

// The violation with the smallest witness in declaration order.
const symexec::Violation& PickViolation(const std::vector<symexec::Violation>& violations);

struct CandidateResult {
  enum class Stage { kSliceFailed, kHarnessFailed, kClean, kConfirmed };
  std::string function;
  std::uint32_t line = 0;
  std::string api;
  Stage stage = Stage::kClean;
  std::string detail;  // failure reason
  report::Generator generator = report::Generator::kTemplate;
  std::vector<llm::UsageRecord> calls;
  std::string harness_source;
  std::optional<report::Finding> finding;
};

std::string StageName(CandidateResult::Stage stage);

struct FileResult {
  std::string path;
  std::size_t sink_calls = 0;  // every sink call site found
  std::size_t dropped = 0;     // guarded or opaque-length candidates
  std::vector<CandidateResult> candidates;  // the rest, in source order
  std::vector<std::string> errors;          // operational errors
  std::vector<report::Finding> findings;

  std::vector<llm::UsageRecord> Usage() const;
};

struct ScanResult {
  std::vector<FileResult> files;  // in input order
  std::vector<report::Finding> findings;  // sorted
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
  // 0 clean, 1 findings present, 2 operational error.
  int ExitCode() const;
};

// `display_path` names the file in findings.
FileResult ScanSource(const std::string& source, const std::string& display_path,
                      const PipelineConfig& config);
FileResult ScanFile(const std::string& path, const PipelineConfig& config);

// Expands directories to their *.c files (recursively, sorted). Throws
// ScanError for missing paths.
std::vector<std::string> CollectSources(const std::vector<std::string>& paths);

// Scans files with `config.jobs` workers; results keep input order.
ScanResult ScanPaths(const std::vector<std::string>& paths, const PipelineConfig& config);

}  // namespace symtee::pipeline

#endif  // SYMTEE_PIPELINE_PIPELINE_H_
