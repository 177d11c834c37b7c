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


// Labeled corpus runner and precision/recall scoring.

#ifndef SYMTEE_BENCH_BENCH_H_
#define SYMTEE_BENCH_BENCH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symtee/llm/client.h"
#include "symtee/pipeline/pipeline.h"
#include "symtee/report/report.h"

namespace symtee::bench {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SinkLabel {
  std::string file;  // relative to the case directory
  std::string function;
  std::uint32_t line = 0;
  std::string api;
  bool operator==(const SinkLabel&) const = default;
};

struct CaseLabel {
  std::vector<SinkLabel> vulnerable_sinks;
  std::vector<SinkLabel> safe_sinks;
  bool expect_slicer_failure = false;
};

struct CorpusCase {
  std::string name;   // "<group>/<case>"
  std::string group;  // "synth" or "real"
  std::string dir;
  std::vector<std::string> sources;  // file names relative to dir, sorted
  CaseLabel label;
};

// Parses label.json. A label without "file" refers to the only source file.
CaseLabel ParseLabel(const std::string& json_text, const std::vector<std::string>& sources);

// Reads <root>/cases/<group>/<case>/ (or <root>/<group>/<case>/ when root has
// no cases/ directory). Labels are checked against the parsed sources.
std::vector<CorpusCase> LoadCorpus(const std::string& root);

struct CaseOutcome {
  std::string name;
  std::string group;
  std::size_t vul = 0;
  std::vector<report::Finding> findings;
  std::size_t tp = 0;
  std::vector<report::Finding> false_positives;
  std::vector<SinkLabel> missed;
  bool expect_slicer_failure = false;
  std::size_t slicer_candidates = 0;  // after dropping guarded and opaque sinks
  std::size_t extracted_slices = 0;
  std::size_t confirmed = 0;          // slices the engine confirmed
  std::vector<std::string> errors;
  std::vector<std::string> notes;     // per-candidate failures and fallbacks
  std::vector<llm::UsageRecord> usage;

  std::size_t n() const { return findings.size(); }
  bool slicer_failure_as_expected() const {
    return !expect_slicer_failure || extracted_slices == 0;
  }
};

// A finding matches a vulnerable label when file, function and API agree and
// the lines are within +-2. Each label matches at most once.
CaseOutcome RunCase(const CorpusCase& c, const pipeline::PipelineConfig& config);

// Runs every case (config.jobs at a time); outcomes keep corpus order.
std::vector<CaseOutcome> RunCorpus(const std::vector<CorpusCase>& cases,
                                   const pipeline::PipelineConfig& config);

struct Tally {
  std::size_t vul = 0;
  std::size_t n = 0;
  std::size_t tp = 0;
  bool operator==(const Tally&) const = default;
};

struct BenchScore {
  Tally total;
  std::map<std::string, Tally> per_group;
  llm::UsageReport usage;
  std::size_t errors = 0;

  // Exact ratios as "100.0"; "—" when the denominator is zero.
  std::string PrecisionText() const;
  std::string RecallText() const;
};

BenchScore Score(const std::vector<CaseOutcome>& outcomes, double price_per_token = 0.0);

// Percent with one decimal, rounded half up from the exact ratio.
std::string PercentText(std::size_t num, std::size_t den);

// Exact comparison of tp/den * 100 against `min_percent`. An undefined ratio
// fails.
bool MeetsPercent(std::size_t num, std::size_t den, double min_percent);

std::string RenderScoreText(const BenchScore& score, const std::vector<CaseOutcome>& outcomes);
std::string RenderScoreJson(const BenchScore& score, const std::vector<CaseOutcome>& outcomes);

}  // namespace symtee::bench

#endif  // SYMTEE_BENCH_BENCH_H_
