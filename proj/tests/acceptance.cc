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


// Acceptance run: one PASS/FAIL/SKIP line per criterion. Exits non-zero when
// any criterion fails. Run from the source root.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "symtee/bench/bench.h"
#include "symtee/cparse/parser.h"
#include "symtee/harness/harness.h"
#include "symtee/harness/lower.h"
#include "symtee/llm/client.h"
#include "symtee/pipeline/pipeline.h"
#include "symtee/report/report.h"
#include "symtee/slicer/slicer.h"
#include "symtee/symexec/external.h"
#include "symtee/symexec/symexec.h"

namespace fs = std::filesystem;
using namespace symtee;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

// Collects failures; the first few are kept for the report line.
class Failures {
 public:
  void Add(const std::string& what) {
    if (count_++ < 3) text_ += (text_.empty() ? "" : "; ") + what;
  }
  bool empty() const { return count_ == 0; }
  Outcome Result(const std::string& pass_detail) const {
    if (count_ == 0) return {Status::kPass, pass_detail};
    return {Status::kFail, std::to_string(count_) + " failure(s): " + text_};
  }

 private:
  int count_ = 0;
  std::string text_;
};

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot read");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One template harness per extracted corpus slice.
struct CorpusHarness {
  std::string where;  // case/file:line
  std::shared_ptr<cparse::TranslationUnit> unit;
  size_t index = 0;  // into AnalyzeUnit(unit)
  slicer::SinkCandidate cand;
  harness::HarnessModel model;
  ir::HarnessIR ir;
};

const std::vector<bench::CorpusCase>& Corpus() {
  static const auto cases = bench::LoadCorpus("corpus");
  return cases;
}

const std::vector<CorpusHarness>& CorpusHarnesses() {
  static const std::vector<CorpusHarness> all = [] {
    std::vector<CorpusHarness> out;
    for (const bench::CorpusCase& c : Corpus()) {
      for (const std::string& src : c.sources) {
        auto unit = std::make_shared<cparse::TranslationUnit>(
            cparse::ParseUnit(ReadFile(fs::path(c.dir) / src), src));
        auto cands = slicer::AnalyzeUnit(*unit, slicer::DefaultSinkSpecs());
        for (size_t i = 0; i < cands.size(); ++i) {
          if (slicer::ShouldDrop(cands[i])) continue;
          CorpusHarness h;
          h.where = c.name + "/" + src + ":" + std::to_string(cands[i].call_span.start_line);
          h.unit = unit;
          h.index = i;
          h.cand = cands[i];
          h.model = harness::BuildModel(slicer::ExtractSlice(cands[i], *unit));
          h.ir = harness::RenderHir(h.model);
          out.push_back(std::move(h));
        }
      }
    }
    return out;
  }();
  return all;
}

const std::vector<bench::CaseOutcome>& TemplateOutcomes() {
  static const auto outcomes = bench::RunCorpus(Corpus(), pipeline::PipelineConfig{});
  return outcomes;
}

// Minimal witness per assertion site.
std::map<int, symexec::Witness> MinimalBySite(const std::vector<symexec::Violation>& vs) {
  std::map<int, symexec::Witness> out;
  for (const symexec::Violation& v : vs) {
    auto it = out.find(v.assert_site);
    if (it == out.end() || v.witness.assignment < it->second.assignment) {
      out[v.assert_site] = v.witness;
    }
  }
  return out;
}

Outcome Criterion1() {
  auto start = std::chrono::steady_clock::now();
  auto cases = bench::LoadCorpus("corpus");
  auto outcomes = bench::RunCorpus(cases, pipeline::PipelineConfig{});
  bench::BenchScore s = bench::Score(outcomes);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << "Vul=" << s.total.vul << " N=" << s.total.n << " TP=" << s.total.tp
    << " P=" << s.PrecisionText() << "% R=" << s.RecallText() << "% in " << std::fixed
    << std::setprecision(2) << secs << " s";
  bool ok = s.total == bench::Tally{26, 24, 24} && s.PrecisionText() == "100.0" &&
            s.RecallText() == "92.3" && secs < 60 && s.errors == 0;
  return {ok ? Status::kPass : Status::kFail, d.str()};
}

Outcome Criterion2() {
  Failures f;
  size_t confirmed = 0;
  size_t missed = 0;
  for (const bench::CaseOutcome& o : TemplateOutcomes()) {
    if (o.expect_slicer_failure) {
      if (o.slicer_candidates != 0 || o.extracted_slices != 0) {
        f.Add(o.name + " reached the harness stage");
      }
      if (o.missed.size() != o.vul) f.Add(o.name + " was detected");
      missed += o.missed.size();
    } else if (!o.missed.empty()) {
      f.Add(o.name + " missed a label after slicing");
    }
    confirmed += o.confirmed;
  }
  if (missed != 2) f.Add(std::to_string(missed) + " misses, expected 2");
  if (confirmed != 24) f.Add(std::to_string(confirmed) + " confirmed slices, expected 24");
  return f.Result("2 misses with 0 extracted slices; 24/24 vulnerable slices confirmed");
}

Outcome Criterion3() {
  Failures f;
  pipeline::FileResult vuln = pipeline::ScanFile("corpus/cases/real/pbkdf2_vuln/pbkdf2.c", {});
  pipeline::FileResult fixed = pipeline::ScanFile("corpus/cases/real/pbkdf2_fixed/pbkdf2.c", {});
  if (vuln.findings.size() != 1) {
    f.Add(std::to_string(vuln.findings.size()) + " findings on the vulnerable case");
  } else {
    const report::Finding& x = vuln.findings[0];
    if (x.witness != std::vector<std::pair<std::string, std::uint64_t>>{{"dkLen", 513}}) {
      f.Add("unexpected witness");
    }
    if (x.suggested_guard != "if (dkLen > 512) return TEE_ERROR_BAD_PARAMETERS;") {
      f.Add("guard was: " + x.suggested_guard);
    }
  }
  if (!fixed.findings.empty() || !fixed.errors.empty()) f.Add("fixed case is not clean");
  // Independent enumeration over dkLen in 0..4096.
  for (const CorpusHarness& h : CorpusHarnesses()) {
    if (h.where.rfind("real/pbkdf2_vuln/", 0) != 0) continue;
    std::vector<symexec::Witness> failing;
    symexec::BruteForceOracle(h.ir, 4096, &failing);
    if (failing.empty() || failing.front().ToString() != "dkLen=513" ||
        failing.size() != 4096 - 512) {
      f.Add("enumeration disagrees");
    }
  }
  return f.Result("dkLen=513 (enumeration agrees), guard matches, fixed case clean");
}

Outcome Criterion4() {
  Failures f;
  auto unit = cparse::ParseUnit(ReadFile("corpus/cases/synth/produce/produce.c"), "produce.c");
  auto cands = slicer::AnalyzeUnit(unit, slicer::DefaultSinkSpecs());
  harness::HarnessConfig cfg;
  cfg.domain_bound = 4096;
  harness::HarnessModel m = harness::BuildModel(slicer::ExtractSlice(cands.at(0), unit), cfg);
  std::string src = harness::RenderSource(m);
  cparse::ParseUnit(src, "harness.c");
  auto generated = symexec::FindViolations(harness::LiftSourceToHir(src));
  auto verbatim =
      symexec::FindViolations(harness::LiftSourceToHir(ReadFile("tests/testdata/produce_harness.c")));
  if (generated.size() != 1 || generated[0].witness.ToString() != "size=513") {
    f.Add("generated harness verdict differs");
  }
  if (verbatim.size() != 1 || verbatim[0].witness.ToString() != "size=513") {
    f.Add("verbatim harness verdict differs");
  }
  return f.Result("generated and verbatim harnesses both violate once at size=513");
}

Outcome Criterion5() {
  Failures f;
  size_t compared = 0;
  for (const CorpusHarness& h : CorpusHarnesses()) {
    if (h.ir.decls.size() > 2) continue;
    ++compared;
    symexec::ExecConfig ec;
    ec.domain_bound = h.model.domain_bound;
    auto engine = MinimalBySite(symexec::FindViolations(h.ir, ec));
    auto oracle = MinimalBySite(symexec::BruteForceOracle(h.ir, h.model.domain_bound));
    if (engine != oracle) f.Add(h.where);
  }
  if (compared == 0) f.Add("no harness compared");
  return f.Result(std::to_string(compared) + " harnesses, 0 disagreements");
}

Outcome Criterion6() {
  Failures f;
  size_t files = 0;
  size_t sinks = 0;
  size_t soundness = 0;
  size_t witnesses = 0;
  // Parser round-trip fixpoint.
  for (const bench::CorpusCase& c : Corpus()) {
    for (const std::string& src : c.sources) {
      auto first = cparse::ParseUnit(ReadFile(fs::path(c.dir) / src), src);
      std::string printed = cparse::PrettyPrint(first);
      auto second = cparse::ParseUnit(printed, src);
      if (!cparse::StructurallyEqual(first, second) || cparse::PrettyPrint(second) != printed) {
        f.Add("round trip: " + c.name + "/" + src);
      }
      ++files;

      // Guard monotonicity on every sink with a traceable length.
      auto cands = slicer::AnalyzeUnit(first, slicer::DefaultSinkSpecs());
      for (size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].length.kind == slicer::LengthOrigin::Kind::kOpaque) continue;
        std::uint64_t cap = cands[i].capacity.bytes ? cands[i].capacity.bytes : 512;
        std::string guard = report::SuggestedGuard(cands[i], cap);
        auto patched = cparse::ParseUnit(
            slicer::InsertGuardBefore(first, *cands[i].call, guard), src);
        auto after = slicer::AnalyzeUnit(patched, slicer::DefaultSinkSpecs());
        if (after.size() != cands.size() || !after[i].guard.guarded()) {
          f.Add("monotonicity: " + c.name + ":" + std::to_string(cands[i].call_span.start_line));
        }
        ++sinks;
      }
    }
  }
  for (const CorpusHarness& h : CorpusHarnesses()) {
    symexec::ExecConfig ec;
    ec.domain_bound = h.model.domain_bound;
    auto violations = symexec::FindViolations(h.ir, ec);
    // Witness re-execution.
    for (const symexec::Violation& v : violations) {
      auto run = symexec::ExecuteConcrete(h.ir, v.witness.AsMap());
      if (!run.assumptions_hold || run.failed_assert != v.assert_site) {
        f.Add("witness: " + h.where + " " + v.witness.ToString());
      }
      ++witnesses;
    }
    if (violations.empty()) continue;
    // Guard soundness: the suggested guard before the sink removes every
    // violation from the re-synthesized harness.
    std::uint64_t cap = h.model.capacity_bytes;
    std::string guard = report::SuggestedGuard(h.cand, cap);
    auto patched = cparse::ParseUnit(
        slicer::InsertGuardBefore(*h.unit, *h.cand.call, guard), "patched.c");
    auto cands = slicer::AnalyzeUnit(patched, slicer::DefaultSinkSpecs());
    auto model = harness::BuildModel(slicer::ExtractSlice(cands.at(h.index), patched));
    if (!symexec::FindViolations(harness::RenderHir(model), ec).empty()) {
      f.Add("soundness: " + h.where);
    }
    // And at the IR level: assuming the trigger is false up front.
    const ir::Stmt* oracle = nullptr;
    for (const ir::Stmt& s : h.ir.body) {
      if (s.kind == ir::Stmt::Kind::kIf && !s.then_body.empty() &&
          s.then_body.back().kind == ir::Stmt::Kind::kAssert) {
        oracle = &s;
      }
    }
    std::set<std::string> inputs;
    for (const ir::SymDecl& d : h.ir.decls) inputs.insert(d.name);
    bool over_inputs = oracle != nullptr;
    if (oracle != nullptr) {
      std::function<void(const ir::Cond&)> scan = [&](const ir::Cond& c) {
        for (const auto& [n, k] : c.lhs.terms) over_inputs &= inputs.count(n) > 0;
        for (const auto& [n, k] : c.rhs.terms) over_inputs &= inputs.count(n) > 0;
        for (const ir::Cond& o : c.operands) scan(o);
      };
      scan(oracle->cond);
    }
    if (over_inputs) {
      ir::HarnessIR assumed = h.ir;
      assumed.body.insert(assumed.body.begin(), ir::Stmt::Assume(ir::Cond::Not(oracle->cond)));
      if (!symexec::FindViolations(assumed, ec).empty()) f.Add("assumed soundness: " + h.where);
    }
    ++soundness;
  }
  // Byte-identical reports across runs and job counts.
  pipeline::PipelineConfig one;
  pipeline::PipelineConfig four;
  four.jobs = 4;
  auto a = pipeline::ScanPaths({"corpus"}, one);
  auto b = pipeline::ScanPaths({"corpus"}, one);
  auto c = pipeline::ScanPaths({"corpus"}, four);
  for (report::Format fmt : {report::Format::kJson, report::Format::kText}) {
    std::string ra = report::RenderReport(a.findings, fmt);
    if (ra != report::RenderReport(b.findings, fmt) ||
        ra != report::RenderReport(c.findings, fmt)) {
      f.Add("reports differ between runs");
    }
  }
  std::ostringstream d;
  d << files << " files round-trip, " << sinks << " sinks monotone, " << soundness
    << " harnesses sound, " << witnesses << " witnesses replay, reports identical";
  return f.Result(d.str());
}

Outcome Criterion7() {
  Failures f;
  const double price = 0.00001;
  pipeline::PipelineConfig cfg;
  cfg.generator = pipeline::GeneratorKind::kLlm;
  cfg.llm = std::make_shared<llm::LlmClient>(std::make_shared<llm::ReplayTransport>("fixtures"));
  auto outcomes = bench::RunCorpus(Corpus(), cfg);
  const auto& templ = TemplateOutcomes();
  size_t covered = 0;
  std::uint64_t records_total = 0;
  size_t cases_with_calls = 0;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const bench::CaseOutcome& o = outcomes[i];
    if (!o.errors.empty()) f.Add(o.name + ": " + o.errors[0]);
    if (o.findings.size() != templ[i].findings.size()) {
      f.Add(o.name + " finding count differs");
      continue;
    }
    for (size_t k = 0; k < o.findings.size(); ++k) {
      const report::Finding& x = o.findings[k];
      const report::Finding& y = templ[i].findings[k];
      if (x.sink_line != y.sink_line || x.witness != y.witness || x.generator != "llm") {
        f.Add(o.name + " verdict differs");
      }
    }
    if (!o.usage.empty()) {
      ++covered;
      ++cases_with_calls;
    }
    for (const llm::UsageRecord& u : o.usage) records_total += u.input_tokens + u.output_tokens;
  }
  // Independent totals: every committed fixture entry is consumed once.
  std::uint64_t fixture_total = 0;
  for (const auto& e : fs::directory_iterator("fixtures")) {
    if (e.path().extension() != ".json") continue;
    for (const llm::FixtureEntry& x : llm::ParseFixture(ReadFile(e.path()))) {
      fixture_total += x.input_tokens + x.output_tokens;
    }
  }
  bench::BenchScore s = bench::Score(outcomes, price);
  if (s.usage.total_tokens != records_total || records_total != fixture_total) {
    f.Add("token totals disagree");
  }
  std::uint64_t n = cases_with_calls;
  if (n == 0 || s.usage.RoundedAverage() != (2 * fixture_total + n) / (2 * n)) {
    f.Add("average mismatch");
  }
  if (s.usage.EstimatedCost() != static_cast<double>(fixture_total) * price) {
    f.Add("cost mismatch");
  }
  auto single = llm::UsageSummary({{"produce", {{3012, 2919, "r1"}}}}, 0.0);
  if (llm::FormatCount(single.RoundedAverage()) != "5,931") f.Add("5,931 rendering");
  auto pair = llm::UsageSummary({{"a", {{4000, 0, ""}}}, {"b", {{5000, 3000, ""}}}}, 0.0);
  if (pair.RoundedAverage() != 6000u) f.Add("4000/8000 average");
  if (llm::FormatCount(llm::UsageSummary({}, 0.0).RoundedAverage()) != "—") f.Add("empty average");
  std::ostringstream d;
  d << covered << " fixture-covered cases match the template verdicts; " << fixture_total
    << " tokens, average " << llm::FormatCount(s.usage.RoundedAverage());
  return f.Result(d.str());
}

Outcome Criterion8() {
  symexec::EngineConfig cfg = symexec::EngineConfig::FromEnvironment();
  if (cfg.engine_path.empty()) return {Status::kSkip, "SYMTEE_ENGINE_PATH not set"};
  std::string src = ReadFile("tests/testdata/produce_harness.c");
  auto builtin = symexec::FindViolations(harness::LiftSourceToHir(src));
  auto out = symexec::ExternalEngineRun(src, cfg);
  using S = symexec::EngineOutcome::Status;
  if (out.status != S::kViolations && out.status != S::kClean) {
    return {Status::kFail, "engine run failed: " + out.log_excerpt};
  }
  if (out.violations.empty() != builtin.empty()) return {Status::kFail, "verdicts differ"};
  for (const symexec::Violation& v : out.violations) {
    auto run = symexec::ExecuteConcrete(harness::LiftSourceToHir(src), v.witness.AsMap());
    if (!run.failed_assert) return {Status::kFail, "witness " + v.witness.ToString() + " does not fail"};
  }
  return {Status::kPass, "external engine agrees with the builtin verdict"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"corpus precision and recall", Criterion1},
      {"false negatives localized at the slicer", Criterion2},
      {"pbkdf2 vulnerable/fixed pair", Criterion3},
      {"produce golden harness", Criterion4},
      {"engine vs brute-force oracle", Criterion5},
      {"property suites", Criterion6},
      {"LLM replay path and usage accounting", Criterion7},
      {"external engine smoke test", Criterion8},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kSkip ? "SKIP" : "FAIL";
    failed += o.status == Status::kFail;
    std::cout << tag << "  " << i + 1 << ". " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
