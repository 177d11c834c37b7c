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


// Builds replay fixtures for the LLM generator from authored replies.
//
// For every sink slice in the corpus, replies are read from
//   <responses>/<case>/<function>-<line>.<attempt>.md
// and keyed by the hash of the request the generator sends on that attempt,
// including the retry sections for earlier rejected replies. Token counts are
// estimated as ceil(bytes / 4) of the prompt and the reply.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "symtee/bench/bench.h"
#include "symtee/cparse/parser.h"
#include "symtee/harness/llm_gen.h"

namespace fs = std::filesystem;
using namespace symtee;

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t EstimateTokens(std::size_t bytes) { return (bytes + 3) / 4; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symtee-fixtures: build LLM replay fixtures from authored replies"};
  std::string corpus = "corpus";
  std::string responses = "fixtures/responses";
  std::string out_dir = "fixtures";
  std::string prompts = "prompts";
  bool check = false;
  app.add_option("--corpus", corpus, "corpus root")->capture_default_str();
  app.add_option("--responses", responses, "authored reply directory")->capture_default_str();
  app.add_option("--out", out_dir, "fixture output directory")->capture_default_str();
  app.add_option("--prompts", prompts, "prompt template directory")->capture_default_str();
  app.add_flag("--check", check, "fail instead of writing when a fixture would change");
  CLI11_PARSE(app, argc, argv);

  harness::GenConfig gen;
  gen.prompts_dir = prompts;
  int missing = 0;
  int stale = 0;
  try {
    for (const bench::CorpusCase& c : bench::LoadCorpus(corpus)) {
      std::string case_id = fs::path(c.dir).filename().string();
      std::vector<llm::FixtureEntry> entries;
      for (const std::string& src : c.sources) {
        cparse::TranslationUnit unit =
            cparse::ParseUnit(ReadFile(fs::path(c.dir) / src), src);
        for (const slicer::SinkCandidate& cand :
             slicer::AnalyzeUnit(unit, slicer::DefaultSinkSpecs())) {
          if (slicer::ShouldDrop(cand)) continue;
          slicer::Slice slice;
          try {
            slice = slicer::ExtractSlice(cand, unit);
          } catch (const slicer::SliceError&) {
            continue;
          }
          harness::HarnessModel model = harness::BuildModel(slice, gen.harness);
          std::string stem = cand.function_name + "-" + std::to_string(cand.call_span.start_line);
          std::vector<std::string> errors;
          size_t first = entries.size();
          for (int attempt = 1; attempt <= 1 + gen.max_retries; ++attempt) {
            fs::path reply_path =
                fs::path(responses) / case_id / (stem + "." + std::to_string(attempt) + ".md");
            if (!fs::exists(reply_path)) break;
            std::string reply = ReadFile(reply_path);
            llm::CompletionRequest req = harness::BuildRequest(slice, gen, errors);
            entries.push_back({llm::PromptHash(req), reply,
                               EstimateTokens(req.system_prompt.size() + req.user_prompt.size()),
                               EstimateTokens(reply.size())});
            std::string error = harness::ValidateHarness(harness::ExtractCode(reply), model);
            if (error.empty()) break;
            errors.push_back(error);
          }
          if (entries.size() == first) {
            std::cerr << "missing reply: " << case_id << "/" << stem << ".1.md\n";
            ++missing;
          }
        }
      }
      if (entries.empty()) continue;
      fs::path out = fs::path(out_dir) / (case_id + ".json");
      std::string text = llm::SerializeFixture(entries);
      if (fs::exists(out) && ReadFile(out) == text) continue;
      if (check) {
        std::cerr << "stale fixture: " << out.string() << "\n";
        ++stale;
        continue;
      }
      std::ofstream(out, std::ios::binary | std::ios::trunc) << text;
      std::cout << "wrote " << out.string() << " (" << entries.size() << " entries)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "symtee-fixtures: " << e.what() << "\n";
    return 2;
  }
  return missing + stale == 0 ? 0 : 1;
}
