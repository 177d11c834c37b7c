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


#include "symtee/report/report.h"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "symtee/cparse/parser.h"
#include "symtee/harness/harness.h"

namespace symtee::report {
namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr char kPbkdf2Vuln[] = R"(
TEE_Result g_CryptoTaPbkdf_PBKDF2(const char *pwd, uint32_t pwdLen,
                                  char *output, int dkLen) {
    char resultBuf[512];
    if (output == NULL)
        return TEE_ERROR_BAD_PARAMETERS;
    (void)pwd;
    (void)pwdLen;
    TEE_MemMove(output, resultBuf, dkLen);
    return TEE_SUCCESS;
}
)";

struct Case {
  cparse::TranslationUnit unit;
  slicer::SinkCandidate cand;
  slicer::Slice slice;
  harness::HarnessModel model;
  symexec::Violation violation;
};

std::unique_ptr<Case> Analyze(const std::string& source, const std::string& file) {
  auto c = std::make_unique<Case>();
  c->unit = cparse::ParseUnit(source, file);
  auto cands = slicer::AnalyzeUnit(c->unit, slicer::DefaultSinkSpecs());
  EXPECT_EQ(cands.size(), 1u);
  c->cand = cands.at(0);
  c->slice = slicer::ExtractSlice(c->cand, c->unit);
  c->model = harness::BuildModel(c->slice);
  auto v = symexec::FindViolations(harness::RenderHir(c->model), {});
  EXPECT_EQ(v.size(), 1u);
  c->violation = v.at(0);
  return c;
}

FindingContext ContextFor(const Case& c) {
  FindingContext ctx;
  ctx.capacity_bytes = c.model.capacity_bytes;
  ctx.oracle_kind = harness::OracleKindName(c.model.oracle.kind);
  return ctx;
}

TEST(AssembleFindingTest, Pbkdf2SuggestedGuard) {
  auto c = Analyze(kPbkdf2Vuln, "pbkdf2.c");
  Finding f = AssembleFinding(c->cand, c->slice, c->violation, ContextFor(*c));
  EXPECT_EQ(f.suggested_guard, "if (dkLen > 512) return TEE_ERROR_BAD_PARAMETERS;");
  EXPECT_EQ(f.sink_api, "TEE_MemMove");
  EXPECT_EQ(f.sink_line, 9u);
  EXPECT_EQ(f.function, "g_CryptoTaPbkdf_PBKDF2");
  EXPECT_EQ(f.capacity_bytes, 512u);
  EXPECT_EQ(f.length_expr, "dkLen");
  EXPECT_EQ(f.oracle_kind, "return_value");
  EXPECT_EQ(f.engine, "builtin");
  EXPECT_EQ(f.generator, "template");
  ASSERT_EQ(f.witness.size(), 1u);
  EXPECT_EQ(f.witness[0], (std::pair<std::string, std::uint64_t>{"dkLen", 513}));
}

TEST(AssembleFindingTest, ProduceFinding) {
  auto c = Analyze(ReadFile("tests/testdata/produce_harness.c"), "produce.c");
  Finding f = AssembleFinding(c->cand, c->slice, c->violation, ContextFor(*c));
  EXPECT_EQ(f.sink_api, "TEE_MemMove");
  EXPECT_EQ(f.capacity_bytes, 512u);
  EXPECT_EQ(f.witness, (std::vector<std::pair<std::string, std::uint64_t>>{{"size", 513}}));
  EXPECT_EQ(f.suggested_guard, "if (params[0].memref.size > 512) return;");
  EXPECT_EQ(f.oracle_kind, "flag");
}

TEST(AssembleFindingTest, IdIsStable) {
  auto a = Analyze(kPbkdf2Vuln, "pbkdf2.c");
  auto b = Analyze(kPbkdf2Vuln, "pbkdf2.c");
  auto other = Analyze(kPbkdf2Vuln, "other.c");
  Finding fa = AssembleFinding(a->cand, a->slice, a->violation);
  Finding fb = AssembleFinding(b->cand, b->slice, b->violation);
  EXPECT_EQ(fa.id, fb.id);
  EXPECT_EQ(fa.id.size(), 16u);
  EXPECT_NE(fa.id, AssembleFinding(other->cand, other->slice, other->violation).id);
}

TEST(AssembleFindingTest, PathStepsMapToSourceLines) {
  const char* src = R"(void f(TEE_Param params[4]) {
    char out[64];
    if (params[0].memref.size > 1024)
        return;
    TEE_MemMove(out, params[0].memref.buffer, params[0].memref.size);
}
)";
  auto c = Analyze(src, "f.c");
  std::string harness = harness::RenderSource(c->model);
  auto hunit = cparse::ParseUnit(harness, "h.c");
  const cparse::Node* fn = cparse::FindFunction(hunit, "f");
  ASSERT_NE(fn, nullptr);
  FindingContext ctx = ContextFor(*c);
  ctx.harness_first = fn->span.start_line;
  ctx.harness_last = fn->span.end_line;
  ctx.source_first = 1;
  Finding f = AssembleFinding(c->cand, c->slice, c->violation, ctx);
  ASSERT_EQ(f.path.size(), 1u);
  EXPECT_EQ(f.path[0].start_line, 3u);
  EXPECT_FALSE(f.path[0].taken);
  EXPECT_EQ(f.path[0].condition, "params[0].memref.size > 1024");
}

// Inserting the suggested guard before the sink makes the slicer see it as
// guarded.
TEST(AssembleFindingTest, SuggestedGuardFlipsSlicerVerdict) {
  for (const std::string& src : {std::string(kPbkdf2Vuln),
                                 ReadFile("tests/testdata/produce_harness.c")}) {
    auto c = Analyze(src, "x.c");
    Finding f = AssembleFinding(c->cand, c->slice, c->violation, ContextFor(*c));
    std::string patched = slicer::InsertGuardBefore(c->unit, *c->cand.call, f.suggested_guard);
    auto unit = cparse::ParseUnit(patched, "x.c");
    auto cands = slicer::AnalyzeUnit(unit, slicer::DefaultSinkSpecs());
    ASSERT_EQ(cands.size(), 1u);
    EXPECT_TRUE(cands[0].guard.guarded()) << patched;
  }
}

Finding Sample(std::string file, std::uint32_t line) {
  Finding f;
  f.id = "id" + file + std::to_string(line);
  f.file = std::move(file);
  f.function = "fn";
  f.sink_line = line;
  f.sink_api = "memcpy";
  f.capacity_bytes = 16;
  f.length_expr = "n";
  f.witness = {{"n", 17}, {"a", 0}};
  f.oracle_kind = "flag";
  f.engine = "builtin";
  f.generator = "template";
  f.suggested_guard = "if (n > 16) return;";
  f.path = {{4, 4, true, "n < 100"}};
  return f;
}

TEST(RenderReportTest, EmptyJson) {
  EXPECT_EQ(RenderReport({}, Format::kJson), "{\"version\":1,\"tool\":\"symtee\",\"findings\":[]}\n");
  EXPECT_EQ(RenderReport({}, Format::kText), "no findings\n");
}

TEST(RenderReportTest, Pbkdf2Json) {
  auto c = Analyze(kPbkdf2Vuln, "pbkdf2.c");
  std::string out =
      RenderReport({AssembleFinding(c->cand, c->slice, c->violation, ContextFor(*c))},
                   Format::kJson);
  EXPECT_NE(out.find("\"sink_api\":\"TEE_MemMove\""), std::string::npos) << out;
  EXPECT_NE(out.find("\"witness\":{\"dkLen\":513}"), std::string::npos) << out;
  // Key order follows the schema.
  auto doc = nlohmann::ordered_json::parse(out);
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc["findings"][0].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"id", "file", "function", "sink_line", "sink_api",
                                            "capacity_bytes", "length_expr", "witness",
                                            "oracle_kind", "engine", "generator",
                                            "suggested_guard", "path"}));
}

TEST(RenderReportTest, TextBlocksAreOrderedByFileThenLine) {
  std::string out = RenderReport({Sample("b.c", 3), Sample("a.c", 20), Sample("a.c", 7)},
                                 Format::kText);
  size_t a7 = out.find("a.c:7:");
  size_t a20 = out.find("a.c:20:");
  size_t b3 = out.find("b.c:3:");
  ASSERT_NE(a7, std::string::npos);
  EXPECT_LT(a7, a20);
  EXPECT_LT(a20, b3);
  EXPECT_NE(out.find("witness: n=17 a=0"), std::string::npos);
  EXPECT_NE(out.find("suggested guard: if (n > 16) return;"), std::string::npos);
  EXPECT_NE(out.find("3 findings"), std::string::npos);
}

TEST(RenderReportTest, JsonRoundTrips) {
  std::vector<Finding> in = {Sample("a.c", 7), Sample("b.c", 3)};
  in[1].engine = "external";
  in[1].artifact = "test000001.ktest";
  in[1].path.clear();
  in[0].witness.clear();
  EXPECT_EQ(ParseReport(RenderReport(in, Format::kJson)), in);
}

TEST(RenderReportTest, RenderingIsDeterministic) {
  std::vector<Finding> in = {Sample("z.c", 1), Sample("a.c", 2)};
  std::vector<Finding> reversed = {in[1], in[0]};
  EXPECT_EQ(RenderReport(in, Format::kJson), RenderReport(reversed, Format::kJson));
  EXPECT_EQ(RenderReport(in, Format::kText), RenderReport(reversed, Format::kText));
}

TEST(ParseReportTest, RejectsMalformedInput) {
  EXPECT_THROW(ParseReport("nope"), ReportParseError);
  EXPECT_THROW(ParseReport("{\"version\":2,\"findings\":[]}"), ReportParseError);
  EXPECT_THROW(ParseReport("{\"version\":1,\"findings\":[{\"id\":1}]}"), ReportParseError);
}

}  // namespace
}  // namespace symtee::report
