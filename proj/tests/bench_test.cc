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


#include "symtee/bench/bench.h"

#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>

namespace symtee::bench {
namespace {

namespace fs = std::filesystem;

// A scratch corpus root removed when the test ends.
class ScratchDir {
 public:
  ScratchDir() {
    path_ = fs::temp_directory_path() /
            ("symtee_bench_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

  void Write(const std::string& rel, const std::string& text) const {
    fs::create_directories((path_ / rel).parent_path());
    std::ofstream(path_ / rel) << text;
  }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

constexpr char kSource[] = R"(TEE_Result f(TEE_Param params[4])
{
    char out[64];
    TEE_MemMove(out, params[0].memref.buffer, params[0].memref.size);
    return TEE_SUCCESS;
}
)";

std::string Label(int line, const std::string& api = "TEE_MemMove") {
  return R"({"vulnerable_sinks":[{"function":"f","line":)" + std::to_string(line) +
         R"(,"api":")" + api + R"("}],"safe_sinks":[],"expect_slicer_failure":false})";
}

const std::vector<CorpusCase>& Bundled() {
  static const std::vector<CorpusCase> cases = LoadCorpus("corpus");
  return cases;
}

const std::vector<CaseOutcome>& BundledOutcomes() {
  static const std::vector<CaseOutcome> outcomes = RunCorpus(Bundled(), pipeline::PipelineConfig{});
  return outcomes;
}

const CaseOutcome& Outcome(const std::string& name) {
  for (const CaseOutcome& o : BundledOutcomes()) {
    if (o.name == name) return o;
  }
  throw std::out_of_range(name);
}

TEST(LoadCorpusTest, BundledCorpusShape) {
  const auto& cases = Bundled();
  std::map<std::string, size_t> vul;
  size_t evading = 0;
  for (const CorpusCase& c : cases) {
    vul[c.group] += c.label.vulnerable_sinks.size();
    evading += c.label.expect_slicer_failure;
  }
  EXPECT_EQ(vul["synth"], 15u);
  EXPECT_EQ(vul["real"], 11u);
  EXPECT_EQ(evading, 2u);
  // 26 vulnerable cases plus the fixed pbkdf2 variant.
  EXPECT_EQ(cases.size(), 27u);
  for (size_t i = 1; i < cases.size(); ++i) EXPECT_LT(cases[i - 1].name, cases[i].name);
}

TEST(LoadCorpusTest, EmptyDirectory) {
  ScratchDir d;
  EXPECT_TRUE(LoadCorpus(d.path().string()).empty());
}

TEST(LoadCorpusTest, MissingRootIsError) {
  EXPECT_THROW(LoadCorpus("no/such/corpus"), CorpusError);
}

TEST(LoadCorpusTest, LabelOnNonSinkLineNamesTheCase) {
  ScratchDir d;
  d.Write("cases/synth/good/a.c", kSource);
  d.Write("cases/synth/good/label.json", Label(4));
  EXPECT_EQ(LoadCorpus(d.path().string()).size(), 1u);
  d.Write("cases/synth/broken/a.c", kSource);
  d.Write("cases/synth/broken/label.json", Label(3));
  try {
    LoadCorpus(d.path().string());
    FAIL() << "expected CorpusError";
  } catch (const CorpusError& e) {
    EXPECT_NE(std::string(e.what()).find("synth/broken"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpusTest, LabelWithWrongApiIsError) {
  ScratchDir d;
  d.Write("cases/real/x/a.c", kSource);
  d.Write("cases/real/x/label.json", Label(4, "memcpy"));
  EXPECT_THROW(LoadCorpus(d.path().string()), CorpusError);
}

TEST(LoadCorpusTest, MalformedJsonIsError) {
  ScratchDir d;
  d.Write("cases/real/x/a.c", kSource);
  d.Write("cases/real/x/label.json", "{\"vulnerable_sinks\": [");
  EXPECT_THROW(LoadCorpus(d.path().string()), CorpusError);
}

TEST(ParseLabelTest, DefaultsToOnlyFile) {
  CaseLabel l = ParseLabel(Label(4), {"a.c"});
  ASSERT_EQ(l.vulnerable_sinks.size(), 1u);
  EXPECT_EQ(l.vulnerable_sinks[0].file, "a.c");
  EXPECT_FALSE(l.expect_slicer_failure);
  EXPECT_THROW(ParseLabel(Label(4), {"a.c", "b.c"}), CorpusError);
}

TEST(PercentTest, RoundingAndUndefined) {
  EXPECT_EQ(PercentText(24, 26), "92.3");
  EXPECT_EQ(PercentText(24, 24), "100.0");
  EXPECT_EQ(PercentText(24, 25), "96.0");
  EXPECT_EQ(PercentText(2, 3), "66.7");
  EXPECT_EQ(PercentText(1, 16), "6.3");  // 6.25 rounds up
  EXPECT_EQ(PercentText(0, 0), "—");
  EXPECT_TRUE(MeetsPercent(24, 26, 92));
  EXPECT_FALSE(MeetsPercent(24, 26, 99));
  EXPECT_TRUE(MeetsPercent(24, 24, 100));
  EXPECT_FALSE(MeetsPercent(23, 24, 100));
  EXPECT_FALSE(MeetsPercent(0, 0, 0));
}

TEST(ScoreTest, ZeroOutcomes) {
  BenchScore s = Score({});
  EXPECT_EQ(s.total, (Tally{0, 0, 0}));
  EXPECT_EQ(s.PrecisionText(), "—");
  EXPECT_EQ(s.RecallText(), "—");
}

TEST(ScoreTest, InjectedFalsePositive) {
  std::vector<CaseOutcome> outcomes = BundledOutcomes();
  CaseOutcome fp;
  fp.name = "synth/injected";
  fp.group = "synth";
  fp.findings.emplace_back();
  fp.false_positives.emplace_back();
  outcomes.push_back(fp);
  BenchScore s = Score(outcomes);
  EXPECT_EQ(s.total, (Tally{26, 25, 24}));
  EXPECT_EQ(s.PrecisionText(), "96.0");
  EXPECT_EQ(s.RecallText(), "92.3");
}

TEST(RunCorpusTest, BundledCorpusScore) {
  BenchScore s = Score(BundledOutcomes());
  EXPECT_EQ(s.total, (Tally{26, 24, 24}));
  EXPECT_EQ(s.per_group.at("synth"), (Tally{15, 13, 13}));
  EXPECT_EQ(s.per_group.at("real"), (Tally{11, 11, 11}));
  EXPECT_EQ(s.PrecisionText(), "100.0");
  EXPECT_EQ(s.RecallText(), "92.3");
  EXPECT_EQ(s.errors, 0u);
  std::string text = RenderScoreText(s, BundledOutcomes());
  EXPECT_NE(text.find("100.0 / 92.3"), std::string::npos) << text;
}

TEST(RunCorpusTest, MissesAreLocalizedAtTheSlicer) {
  size_t confirmed = 0;
  for (const CaseOutcome& o : BundledOutcomes()) {
    if (o.expect_slicer_failure) {
      EXPECT_EQ(o.slicer_candidates, 0u) << o.name;
      EXPECT_EQ(o.extracted_slices, 0u) << o.name;
      EXPECT_EQ(o.missed.size(), 1u) << o.name;
    } else {
      EXPECT_TRUE(o.missed.empty()) << o.name;
    }
    EXPECT_TRUE(o.false_positives.empty()) << o.name;
    EXPECT_TRUE(o.errors.empty()) << o.name;
    confirmed += o.confirmed;
  }
  EXPECT_EQ(confirmed, 24u);
}

TEST(RunCorpusTest, Pbkdf2Pair) {
  const CaseOutcome& vuln = Outcome("real/pbkdf2_vuln");
  ASSERT_EQ(vuln.findings.size(), 1u);
  EXPECT_EQ(vuln.tp, 1u);
  EXPECT_EQ(vuln.findings[0].witness[0].second, 513u);
  EXPECT_TRUE(Outcome("real/pbkdf2_fixed").findings.empty());
  EXPECT_TRUE(Outcome("synth/fn_alias").findings.empty());
}

TEST(RunCorpusTest, ReproducibleAcrossJobCounts) {
  pipeline::PipelineConfig cfg;
  cfg.jobs = 4;
  auto again = RunCorpus(Bundled(), cfg);
  EXPECT_EQ(RenderScoreJson(Score(again), again),
            RenderScoreJson(Score(BundledOutcomes()), BundledOutcomes()));
  EXPECT_EQ(RenderScoreText(Score(again), again),
            RenderScoreText(Score(BundledOutcomes()), BundledOutcomes()));
}

TEST(RunCaseTest, LineToleranceIsTwo) {
  ScratchDir d;
  d.Write("cases/synth/x/a.c", kSource);
  d.Write("cases/synth/x/label.json", Label(4));
  CorpusCase c = LoadCorpus(d.path().string()).at(0);
  c.label.vulnerable_sinks[0].line = 6;
  EXPECT_EQ(RunCase(c, pipeline::PipelineConfig{}).tp, 1u);
  c.label.vulnerable_sinks[0].line = 7;
  CaseOutcome o = RunCase(c, pipeline::PipelineConfig{});
  EXPECT_EQ(o.tp, 0u);
  EXPECT_EQ(o.missed.size(), 1u);
}

}  // namespace
}  // namespace symtee::bench
