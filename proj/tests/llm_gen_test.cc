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


#include "symtee/harness/llm_gen.h"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "symtee/cparse/parser.h"
#include "symtee/symexec/symexec.h"

namespace symtee::harness {
namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Sliced {
  cparse::TranslationUnit unit;
  slicer::Slice slice;
};

std::unique_ptr<Sliced> ProduceSlice() {
  auto s = std::make_unique<Sliced>();
  s->unit = cparse::ParseUnit(ReadFile("tests/testdata/produce_harness.c"), "produce.c");
  auto cands = slicer::AnalyzeUnit(s->unit, slicer::DefaultSinkSpecs());
  EXPECT_EQ(cands.size(), 1u);
  s->slice = slicer::ExtractSlice(cands.at(0), s->unit);
  return s;
}

std::string Fenced(const std::string& code) {
  return "Here is the harness.\n```c\n" + code + "```\nDone.";
}

// Scripts a replay transport for a sequence of replies by replaying the
// generator's own request construction, including retry sections.
std::vector<llm::FixtureEntry> Script(const slicer::Slice& slice, const GenConfig& config,
                                      const std::vector<std::string>& replies) {
  HarnessModel model = BuildModel(slice, config.harness);
  std::vector<llm::FixtureEntry> entries;
  std::vector<std::string> errors;
  std::uint64_t k = 1;
  for (const std::string& reply : replies) {
    entries.push_back({llm::PromptHash(BuildRequest(slice, config, errors)), reply, 1000 * k,
                       100 * k});
    std::string error = ValidateHarness(ExtractCode(reply), model);
    if (!error.empty()) errors.push_back(error);
    ++k;
  }
  return entries;
}

llm::LlmClient ReplayOf(std::vector<llm::FixtureEntry> entries) {
  return llm::LlmClient(std::make_shared<llm::ReplayTransport>(std::move(entries)));
}

TEST(ExtractCodeTest, FencedAndBare) {
  EXPECT_EQ(ExtractCode("x\n```c\nint a;\n```\ny"), "int a;\n");
  EXPECT_EQ(ExtractCode("```\nint b;\n```"), "int b;\n");
  EXPECT_EQ(ExtractCode("int c;"), "int c;");
  EXPECT_EQ(ExtractCode("```c\nint d;\n"), "int d;\n");
}

TEST(BuildRequestTest, CarriesSliceStubsAndOracle) {
  auto s = ProduceSlice();
  llm::CompletionRequest req = BuildRequest(s->slice, {});
  EXPECT_NE(req.system_prompt.find("klee_make_symbolic"), std::string::npos);
  for (const char* needle : {"void produce(TEE_Param params[4])", "- TEE_MemMove (function)",
                             "volatile int g_checked = 0;", "size > 512UL",
                             "0 <= size <= 4096", "Missing input validation"}) {
    EXPECT_NE(req.user_prompt.find(needle), std::string::npos) << needle << "\n" << req.user_prompt;
  }
  EXPECT_EQ(req.user_prompt.find("{{"), std::string::npos);
  llm::CompletionRequest retry = BuildRequest(s->slice, {}, {"lowering error: boom"});
  EXPECT_EQ(retry.user_prompt.rfind(req.user_prompt, 0), 0u);
  EXPECT_NE(retry.user_prompt.find("lowering error: boom"), std::string::npos);
  EXPECT_NE(llm::PromptHash(req), llm::PromptHash(retry));
}

TEST(GenerateViaLlmTest, ValidReplyOnFirstAttempt) {
  auto s = ProduceSlice();
  std::string golden = ReadFile("tests/testdata/produce_harness.c");
  auto client = ReplayOf(Script(s->slice, {}, {Fenced(golden)}));
  GenResult r = GenerateViaLlm(s->slice, client);
  EXPECT_EQ(r.source, golden);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(r.usage().input_tokens, 1000u);
  EXPECT_EQ(r.usage().output_tokens, 100u);
  // Same verdict as the template harness.
  auto llm_v = symexec::FindViolations(LiftSourceToHir(r.source), {});
  auto tpl_v = symexec::FindViolations(RenderHir(BuildModel(s->slice)), {});
  ASSERT_EQ(llm_v.size(), 1u);
  ASSERT_EQ(tpl_v.size(), 1u);
  EXPECT_EQ(llm_v[0].witness, tpl_v[0].witness);
}

TEST(GenerateViaLlmTest, FailOnceThenSucceedSumsUsage) {
  auto s = ProduceSlice();
  std::string golden = ReadFile("tests/testdata/produce_harness.c");
  std::string no_oracle = golden;
  no_oracle.replace(no_oracle.find("klee_assert"), 11, "(void)");
  auto client = ReplayOf(Script(s->slice, {}, {Fenced(no_oracle), Fenced(golden)}));
  GenResult r = GenerateViaLlm(s->slice, client);
  EXPECT_EQ(r.attempts, 2);
  ASSERT_EQ(r.calls.size(), 2u);
  EXPECT_EQ(r.usage().input_tokens, 3000u);
  EXPECT_EQ(r.usage().output_tokens, 300u);
}

TEST(GenerateViaLlmTest, GarbageRepliesExhaustRetries) {
  auto s = ProduceSlice();
  std::vector<std::string> garbage(4, "I cannot help with that.");
  auto client = ReplayOf(Script(s->slice, {}, garbage));
  try {
    GenerateViaLlm(s->slice, client);
    FAIL() << "expected GenError";
  } catch (const GenError& e) {
    EXPECT_EQ(e.attempts(), 4);
    EXPECT_EQ(e.calls().size(), 4u);
    EXPECT_NE(std::string(e.what()).find("parse error"), std::string::npos) << e.what();
  }
}

TEST(GenerateViaLlmTest, MaxRetriesIsHonoured) {
  auto s = ProduceSlice();
  GenConfig config;
  config.max_retries = 0;
  auto client = ReplayOf(Script(s->slice, config, {"nope"}));
  try {
    GenerateViaLlm(s->slice, client, config);
    FAIL() << "expected GenError";
  } catch (const GenError& e) {
    EXPECT_EQ(e.attempts(), 1);
  }
}

TEST(GenerateViaLlmTest, HarnessWithoutTheSlicedFunctionIsRejected) {
  auto s = ProduceSlice();
  HarnessModel m = BuildModel(s->slice);
  std::string src = ReadFile("tests/testdata/produce_harness.c");
  size_t at = src.find("void produce");
  src.replace(at, 12, "void consume");
  src.replace(src.find("    produce(params);"), 20, "    consume(params);");
  EXPECT_NE(ValidateHarness(src, m).find("does not define `produce`"), std::string::npos);
}

TEST(GenerateViaLlmTest, FixtureMissPropagates) {
  auto s = ProduceSlice();
  auto client = ReplayOf({});
  EXPECT_THROW(GenerateViaLlm(s->slice, client), llm::FixtureMiss);
}

}  // namespace
}  // namespace symtee::harness
