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


// Chat-completion client with live, replay and record transports, and token
// accounting across cases.

#ifndef SYMTEE_LLM_CLIENT_H_
#define SYMTEE_LLM_CLIENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symtee::llm {

struct CompletionRequest {
  std::string system_prompt;
  std::string user_prompt;
  int max_output_tokens = 4096;
  double temperature = 0.0;
};

struct UsageRecord {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::string request_id;

  std::uint64_t total() const { return input_tokens + output_tokens; }
  bool operator==(const UsageRecord&) const = default;
};

struct Completion {
  std::string text;
  UsageRecord usage;
};

class TransportError : public std::runtime_error {
 public:
  enum class Kind { kNetwork, kAuth, kProtocol, kConfig };
  TransportError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class FixtureMiss : public std::runtime_error {
 public:
  explicit FixtureMiss(std::string hash)
      : std::runtime_error("no recorded response for prompt hash " + hash),
        hash_(std::move(hash)) {}
  const std::string& hash() const { return hash_; }

 private:
  std::string hash_;
};

class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lowercase hex SHA-256 over system prompt, a NUL byte, then user prompt.
std::string PromptHash(const CompletionRequest& req);

struct FixtureEntry {
  std::string prompt_hash;
  std::string response_text;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  bool operator==(const FixtureEntry&) const = default;
};

std::vector<FixtureEntry> ParseFixture(std::string_view json_text);
std::string SerializeFixture(const std::vector<FixtureEntry>& entries);

class Transport {
 public:
  virtual ~Transport() = default;
  virtual Completion Complete(const CompletionRequest& req) = 0;
};

struct LiveConfig {
  std::string endpoint;  // e.g. https://api.example.com/v1/chat/completions
  std::string api_key;
  std::string model;
  int timeout_secs = 120;

  // SYMTEE_LLM_ENDPOINT, SYMTEE_LLM_API_KEY, SYMTEE_LLM_MODEL.
  static LiveConfig FromEnvironment();
};

// One HTTP(S) POST per request to a chat-completions style endpoint. Calls
// are serialized.
class LiveTransport : public Transport {
 public:
  explicit LiveTransport(LiveConfig config);
  Completion Complete(const CompletionRequest& req) override;

 private:
  LiveConfig config_;
  std::mutex mu_;
};

// Answers from recorded fixtures. Entries sharing a hash are handed out in
// file order; asking for more than were recorded is a miss.
class ReplayTransport : public Transport {
 public:
  // `path` is a fixture file or a directory of *.json fixtures.
  explicit ReplayTransport(const std::string& path);
  explicit ReplayTransport(std::vector<FixtureEntry> entries);
  Completion Complete(const CompletionRequest& req) override;

 private:
  std::map<std::string, std::vector<FixtureEntry>> by_hash_;
  std::map<std::string, size_t> next_;
  std::mutex mu_;
};

// Forwards to `inner` and appends every exchange to the fixture file.
class RecordTransport : public Transport {
 public:
  RecordTransport(std::unique_ptr<Transport> inner, std::string fixture_path);
  Completion Complete(const CompletionRequest& req) override;

 private:
  std::unique_ptr<Transport> inner_;
  std::string path_;
  std::mutex mu_;
};

class LlmClient {
 public:
  explicit LlmClient(std::shared_ptr<Transport> transport) : transport_(std::move(transport)) {}
  // Throws std::invalid_argument on empty prompts.
  Completion Complete(const CompletionRequest& req) const;

 private:
  std::shared_ptr<Transport> transport_;
};

// --------------------------------------------------------------- accounting

struct CaseUsage {
  std::string case_id;
  std::uint64_t total_tokens = 0;
  bool operator==(const CaseUsage&) const = default;
};

struct UsageReport {
  std::vector<CaseUsage> per_case;
  std::uint64_t total_tokens = 0;
  double price_per_token = 0.0;

  size_t case_count() const { return per_case.size(); }
  // Nearest integer, halves rounded up. Empty when there are no cases.
  std::optional<std::uint64_t> RoundedAverage() const;
  double EstimatedCost() const { return static_cast<double>(total_tokens) * price_per_token; }
  std::optional<double> AverageCost() const;
};

UsageReport UsageSummary(
    const std::vector<std::pair<std::string, std::vector<UsageRecord>>>& records,
    double price_per_token);

// "5,931"; "—" when undefined.
std::string FormatCount(std::optional<std::uint64_t> n);
std::string RenderUsageText(const UsageReport& report);

}  // namespace symtee::llm

#endif  // SYMTEE_LLM_CLIENT_H_
