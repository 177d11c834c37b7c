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


// Harness generation through an LLM, validated by lifting the reply to IR.

#ifndef SYMTEE_HARNESS_LLM_GEN_H_
#define SYMTEE_HARNESS_LLM_GEN_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "symtee/harness/harness.h"
#include "symtee/llm/client.h"
#include "symtee/slicer/slicer.h"

namespace symtee::harness {

struct GenConfig {
  HarnessConfig harness;
  int max_retries = 3;  // attempts = 1 + max_retries
  std::string prompts_dir = "prompts";
  int max_output_tokens = 4096;
};

struct GenResult {
  std::string source;
  std::vector<llm::UsageRecord> calls;  // one per attempt
  int attempts = 0;

  llm::UsageRecord usage() const;
};

class GenError : public std::runtime_error {
 public:
  GenError(const std::string& message, std::vector<llm::UsageRecord> calls, int attempts)
      : std::runtime_error(message), calls_(std::move(calls)), attempts_(attempts) {}
  const std::vector<llm::UsageRecord>& calls() const { return calls_; }
  int attempts() const { return attempts_; }

 private:
  std::vector<llm::UsageRecord> calls_;
  int attempts_;
};

// The first request for `slice`. `previous_errors` appends one retry section
// per earlier rejection, oldest first.
llm::CompletionRequest BuildRequest(const slicer::Slice& slice, const GenConfig& config,
                                    const std::vector<std::string>& previous_errors = {});

// The C text of a reply: the first fenced block when there is one, else the
// whole reply.
std::string ExtractCode(const std::string& reply);

// Empty when `source` is acceptable for `model`, else the rejection reason.
std::string ValidateHarness(const std::string& source, const HarnessModel& model);

// Throws GenError once every attempt was rejected. Transport errors and
// fixture misses propagate unchanged.
GenResult GenerateViaLlm(const slicer::Slice& slice, const llm::LlmClient& client,
                         const GenConfig& config = {});

}  // namespace symtee::harness

#endif  // SYMTEE_HARNESS_LLM_GEN_H_
