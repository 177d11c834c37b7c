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

#include <gtest/gtest.h>
#include <stdlib.h>

#include <fstream>
#include <sstream>

namespace symtee::pipeline {
namespace {

constexpr char kVuln[] = "corpus/cases/real/pbkdf2_vuln/pbkdf2.c";
constexpr char kFixed[] = "corpus/cases/real/pbkdf2_fixed/pbkdf2.c";

symexec::EngineConfig FakeEngine() {
  symexec::EngineConfig cfg;
  cfg.engine_path = "tests/testdata/fake_engine/fake-engine";
  cfg.include_dir = "tests/testdata/fake_engine/include";
  cfg.timeout_secs = 120;
  return cfg;
}

std::string Render(const ScanResult& r) {
  return report::RenderReport(r.findings, report::Format::kJson);
}

TEST(ScanTest, Pbkdf2VulnerableHasOneFinding) {
  FileResult r = ScanFile(kVuln, PipelineConfig{});
  ASSERT_TRUE(r.errors.empty());
  ASSERT_EQ(r.findings.size(), 1u);
  const report::Finding& f = r.findings[0];
  EXPECT_EQ(f.function, "g_CryptoTaPbkdf_PBKDF2");
  EXPECT_EQ(f.sink_api, "TEE_MemMove");
  EXPECT_EQ(f.capacity_bytes, 512u);
  ASSERT_EQ(f.witness.size(), 1u);
  EXPECT_EQ(f.witness[0].first, "dkLen");
  EXPECT_EQ(f.witness[0].second, 513u);
  EXPECT_EQ(f.suggested_guard, "if (dkLen > 512) return TEE_ERROR_BAD_PARAMETERS;");
  EXPECT_EQ(f.generator, "template");
}

TEST(ScanTest, Pbkdf2FixedIsClean) {
  FileResult r = ScanFile(kFixed, PipelineConfig{});
  EXPECT_TRUE(r.errors.empty());
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.sink_calls, 1u);
  EXPECT_EQ(r.dropped, 1u);  // guarded by the dkLen check
}

TEST(ScanTest, ExitCodes) {
  PipelineConfig cfg;
  EXPECT_EQ(ScanPaths({kVuln}, cfg).ExitCode(), 1);
  EXPECT_EQ(ScanPaths({kFixed}, cfg).ExitCode(), 0);
  ScanResult missing = ScanPaths({"missing_dir/"}, cfg);
  EXPECT_EQ(missing.ExitCode(), 2);
  ASSERT_EQ(missing.errors.size(), 1u);
  EXPECT_NE(missing.errors[0].find("missing_dir"), std::string::npos);
}

TEST(ScanTest, ParseErrorIsOperational) {
  FileResult r = ScanSource("int f( {", "bad.c", PipelineConfig{});
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].rfind("bad.c:1:", 0), 0u) << r.errors[0];
}

TEST(ScanTest, LoweringFailureIsACandidateNotAnError) {
  FileResult r = ScanSource(R"(
void f(TEE_Param params[4]) {
    char out[64];
    unsigned int i;
    for (i = 0; i < params[0].memref.size; i++) {
        out[0] = 1;
    }
    TEE_MemMove(out, params[0].memref.buffer, params[0].memref.size);
}
)",
                            "loop.c", PipelineConfig{});
  EXPECT_TRUE(r.errors.empty());
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].stage, CandidateResult::Stage::kHarnessFailed);
  EXPECT_FALSE(r.candidates[0].detail.empty());
}

TEST(ScanTest, JobsDoNotChangeOutput) {
  PipelineConfig one;
  PipelineConfig many;
  many.jobs = 6;
  ScanResult a = ScanPaths({"corpus/cases/real"}, one);
  ScanResult b = ScanPaths({"corpus/cases/real"}, many);
  EXPECT_GT(a.findings.size(), 5u);
  EXPECT_EQ(Render(a), Render(b));
  ASSERT_EQ(a.files.size(), b.files.size());
  for (size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i].path, b.files[i].path);
}

TEST(ScanTest, CollectSourcesSortsAndRecurses) {
  auto files = CollectSources({"corpus/cases/real/pbkdf2_vuln", kFixed});
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0], kVuln);
  EXPECT_EQ(files[1], kFixed);
}

TEST(ConfigTest, Validate) {
  PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.generator = GeneratorKind::kLlm;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.jobs = 0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
}

TEST(EngineTest, ExternalUnavailableIsOperational) {
  PipelineConfig cfg;
  cfg.engine = EngineKind::kExternal;
  FileResult r = ScanFile(kVuln, cfg);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_NE(r.errors[0].find("SYMTEE_ENGINE_PATH"), std::string::npos);
}

TEST(EngineTest, BothEnginesAgreeOnPbkdf2) {
  PipelineConfig cfg;
  cfg.engine = EngineKind::kBoth;
  cfg.external = FakeEngine();
  FileResult r = ScanFile(kVuln, cfg);
  ASSERT_TRUE(r.errors.empty()) << r.errors[0];
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].witness[0].second, 513u);
}

TEST(EngineTest, DisagreementIsDiscrepancy) {
  // The fake engine only enumerates 0..100, so it misses the overflow.
  PipelineConfig cfg;
  cfg.engine = EngineKind::kBoth;
  cfg.external = FakeEngine();
  setenv("FAKE_ENGINE_BOUND", "100", 1);
  FileResult r = ScanFile(kVuln, cfg);
  unsetenv("FAKE_ENGINE_BOUND");
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_NE(r.errors[0].find("engines disagree"), std::string::npos) << r.errors[0];
  EXPECT_TRUE(r.findings.empty());
}

TEST(PickViolationTest, MinimalWitnessWins) {
  symexec::Violation a;
  a.witness.assignment = {{"n", 700}};
  symexec::Violation b;
  b.witness.assignment = {{"n", 513}};
  EXPECT_EQ(PickViolation({a, b}).witness.ToString(), "n=513");
}

class GarbageTransport : public llm::Transport {
 public:
  llm::Completion Complete(const llm::CompletionRequest&) override {
    llm::Completion c;
    c.text = "I cannot help with that.";
    c.usage.input_tokens = 100;
    c.usage.output_tokens = 7;
    return c;
  }
};

TEST(LlmGeneratorTest, ExhaustedRetriesFallBackToTemplate) {
  PipelineConfig cfg;
  cfg.generator = GeneratorKind::kLlm;
  cfg.llm = std::make_shared<llm::LlmClient>(std::make_shared<GarbageTransport>());
  FileResult r = ScanFile(kVuln, cfg);
  ASSERT_TRUE(r.errors.empty());
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].generator, "llm_fallback_template");
  // One first attempt plus three retries, all billed.
  ASSERT_EQ(r.Usage().size(), 4u);
  EXPECT_EQ(r.Usage()[3].total(), 107u);
}

TEST(LlmGeneratorTest, FixtureMissIsOperational) {
  auto transport = std::make_shared<llm::ReplayTransport>(std::vector<llm::FixtureEntry>{});
  PipelineConfig cfg;
  cfg.generator = GeneratorKind::kLlm;
  cfg.llm = std::make_shared<llm::LlmClient>(transport);
  FileResult r = ScanFile(kVuln, cfg);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_TRUE(r.findings.empty());
}

}  // namespace
}  // namespace symtee::pipeline
