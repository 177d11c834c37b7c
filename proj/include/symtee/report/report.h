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


// Findings and their JSON and text renderings.

#ifndef SYMTEE_REPORT_REPORT_H_
#define SYMTEE_REPORT_REPORT_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symtee/slicer/slicer.h"
#include "symtee/symexec/symexec.h"

namespace symtee::report {

inline constexpr int kSchemaVersion = 1;
inline constexpr char kToolName[] = "symtee";

enum class Generator { kTemplate, kLlm, kLlmFallbackTemplate };
std::string GeneratorName(Generator g);

// One branch decision, located in the scanned file.
struct PathStep {
  std::uint32_t start_line = 0;
  std::uint32_t end_line = 0;
  bool taken = false;
  std::string condition;
  bool operator==(const PathStep&) const = default;
};

struct Finding {
  std::string id;
  std::string file;
  std::string function;
  std::uint32_t sink_line = 0;
  std::string sink_api;
  std::uint64_t capacity_bytes = 0;
  std::string length_expr;
  std::vector<std::pair<std::string, std::uint64_t>> witness;  // declaration order
  std::string oracle_kind;  // "return_value" or "flag"
  std::string engine;       // "builtin" or "external"
  std::string generator;
  std::string suggested_guard;
  std::vector<PathStep> path;
  std::string artifact;  // external engine test artifact, else empty

  bool operator==(const Finding&) const = default;
};

// Extra facts the candidate and violation do not carry.
struct FindingContext {
  std::uint64_t capacity_bytes = 0;  // 0: the candidate's fixed capacity
  std::uint64_t default_capacity = 512;
  std::string oracle_kind = "flag";
  Generator generator = Generator::kTemplate;
  // Maps harness lines of the sliced function back to the scanned file:
  // line L in [harness_first, harness_last] is L - harness_first + source_first.
  std::uint32_t harness_first = 0;
  std::uint32_t harness_last = 0;
  std::uint32_t source_first = 0;
};

// Stable hex id over (file, function, call span).
std::string FindingId(const slicer::SinkCandidate& cand);

// `if (<len> > <capacity>) return <error>;` where the return matches the
// function's return type.
std::string SuggestedGuard(const slicer::SinkCandidate& cand, std::uint64_t capacity);

Finding AssembleFinding(const slicer::SinkCandidate& cand, const slicer::Slice& slice,
                        const symexec::Violation& violation, const FindingContext& ctx = {});

// Orders by (file, sink_line, id).
void SortFindings(std::vector<Finding>* findings);

enum class Format { kJson, kText };

std::string RenderReport(const std::vector<Finding>& findings, Format format);

class ReportParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inverse of the JSON rendering.
std::vector<Finding> ParseReport(std::string_view json_text);

}  // namespace symtee::report

#endif  // SYMTEE_REPORT_REPORT_H_
