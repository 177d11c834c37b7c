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


#include "symtee/llm/client.h"

#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace symtee::llm {

using nlohmann::json;
using nlohmann::ordered_json;

std::string PromptHash(const CompletionRequest& req) {
  std::string data = req.system_prompt;
  data.push_back('\0');
  data += req.user_prompt;
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  std::string hex;
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

std::vector<FixtureEntry> ParseFixture(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FixtureError(std::string("fixture is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw FixtureError("fixture must be a JSON array");
  std::vector<FixtureEntry> out;
  for (const json& item : doc) {
    try {
      for (const char* key : {"input_tokens", "output_tokens"}) {
        if (!item.at(key).is_number_unsigned()) {
          throw FixtureError(std::string("fixture field ") + key + " must be a count");
        }
      }
      FixtureEntry e;
      e.prompt_hash = item.at("prompt_hash").get<std::string>();
      e.response_text = item.at("response_text").get<std::string>();
      e.input_tokens = item.at("input_tokens").get<std::uint64_t>();
      e.output_tokens = item.at("output_tokens").get<std::uint64_t>();
      out.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw FixtureError(std::string("malformed fixture entry: ") + e.what());
    }
  }
  return out;
}

std::string SerializeFixture(const std::vector<FixtureEntry>& entries) {
  ordered_json doc = ordered_json::array();
  for (const FixtureEntry& e : entries) {
    doc.push_back({{"prompt_hash", e.prompt_hash},
                   {"response_text", e.response_text},
                   {"input_tokens", e.input_tokens},
                   {"output_tokens", e.output_tokens}});
  }
  return doc.dump(2) + "\n";
}

namespace {

std::string ReadFileOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FixtureError("cannot read fixture " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Env(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

}  // namespace

// ------------------------------------------------------------------- live

LiveConfig LiveConfig::FromEnvironment() {
  LiveConfig c;
  c.endpoint = Env("SYMTEE_LLM_ENDPOINT");
  c.api_key = Env("SYMTEE_LLM_API_KEY");
  c.model = Env("SYMTEE_LLM_MODEL");
  return c;
}

LiveTransport::LiveTransport(LiveConfig config) : config_(std::move(config)) {}

Completion LiveTransport::Complete(const CompletionRequest& req) {
  using Kind = TransportError::Kind;
  if (config_.endpoint.empty()) throw TransportError(Kind::kConfig, "SYMTEE_LLM_ENDPOINT is not set");
  if (config_.api_key.empty()) throw TransportError(Kind::kAuth, "SYMTEE_LLM_API_KEY is not set");

  size_t scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError(Kind::kConfig, "endpoint needs a scheme: " + config_.endpoint);
  }
  size_t path_start = config_.endpoint.find('/', scheme_end + 3);
  std::string origin = config_.endpoint.substr(0, path_start);
  std::string path =
      path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);

  ordered_json body = {
      {"model", config_.model},
      {"messages",
       {{{"role", "system"}, {"content", req.system_prompt}},
        {{"role", "user"}, {"content", req.user_prompt}}}},
      {"max_tokens", req.max_output_tokens},
      {"temperature", req.temperature},
  };

  std::lock_guard<std::mutex> lock(mu_);
  httplib::Client cli(origin);
  cli.set_connection_timeout(config_.timeout_secs, 0);
  cli.set_read_timeout(config_.timeout_secs, 0);
  cli.set_bearer_token_auth(config_.api_key);
  auto res = cli.Post(path, body.dump(), "application/json");
  if (!res) {
    throw TransportError(Kind::kNetwork, "request to " + origin + " failed: " +
                                             httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw TransportError(Kind::kAuth, "endpoint rejected credentials (HTTP " +
                                          std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    throw TransportError(Kind::kProtocol, "HTTP " + std::to_string(res->status) + ": " +
                                              res->body.substr(0, 200));
  }
  try {
    json reply = json::parse(res->body);
    Completion c;
    c.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    if (reply.contains("usage")) {
      const json& u = reply["usage"];
      c.usage.input_tokens = u.value("prompt_tokens", std::uint64_t{0});
      c.usage.output_tokens = u.value("completion_tokens", std::uint64_t{0});
    }
    c.usage.request_id = reply.value("id", "");
    return c;
  } catch (const json::exception& e) {
    throw TransportError(Kind::kProtocol, std::string("unexpected reply shape: ") + e.what());
  }
}

// ----------------------------------------------------------------- replay

ReplayTransport::ReplayTransport(const std::string& path) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& e : std::filesystem::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  for (const auto& f : files) {
    for (FixtureEntry& e : ParseFixture(ReadFileOrThrow(f))) {
      by_hash_[e.prompt_hash].push_back(std::move(e));
    }
  }
}

ReplayTransport::ReplayTransport(std::vector<FixtureEntry> entries) {
  for (FixtureEntry& e : entries) by_hash_[e.prompt_hash].push_back(std::move(e));
}

Completion ReplayTransport::Complete(const CompletionRequest& req) {
  std::string hash = PromptHash(req);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_hash_.find(hash);
  size_t& next = next_[hash];
  if (it == by_hash_.end() || next >= it->second.size()) throw FixtureMiss(hash);
  const FixtureEntry& e = it->second[next++];
  Completion c;
  c.text = e.response_text;
  c.usage.input_tokens = e.input_tokens;
  c.usage.output_tokens = e.output_tokens;
  c.usage.request_id = "replay:" + hash.substr(0, 12) + ":" + std::to_string(next);
  return c;
}

// ----------------------------------------------------------------- record

RecordTransport::RecordTransport(std::unique_ptr<Transport> inner, std::string fixture_path)
    : inner_(std::move(inner)), path_(std::move(fixture_path)) {}

Completion RecordTransport::Complete(const CompletionRequest& req) {
  Completion c = inner_->Complete(req);
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<FixtureEntry> entries;
  if (std::filesystem::exists(path_)) entries = ParseFixture(ReadFileOrThrow(path_));
  entries.push_back({PromptHash(req), c.text, c.usage.input_tokens, c.usage.output_tokens});
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw FixtureError("cannot write fixture " + path_);
  out << SerializeFixture(entries);
  return c;
}

Completion LlmClient::Complete(const CompletionRequest& req) const {
  if (req.system_prompt.empty() || req.user_prompt.empty()) {
    throw std::invalid_argument("completion prompts must be non-empty");
  }
  return transport_->Complete(req);
}

// ------------------------------------------------------------- accounting

std::optional<std::uint64_t> UsageReport::RoundedAverage() const {
  if (per_case.empty()) return std::nullopt;
  std::uint64_t n = per_case.size();
  return (2 * total_tokens + n) / (2 * n);
}

std::optional<double> UsageReport::AverageCost() const {
  if (per_case.empty()) return std::nullopt;
  return EstimatedCost() / static_cast<double>(per_case.size());
}

UsageReport UsageSummary(
    const std::vector<std::pair<std::string, std::vector<UsageRecord>>>& records,
    double price_per_token) {
  UsageReport r;
  r.price_per_token = price_per_token;
  for (const auto& [id, recs] : records) {
    CaseUsage c{id, 0};
    for (const UsageRecord& u : recs) c.total_tokens += u.total();
    r.total_tokens += c.total_tokens;
    r.per_case.push_back(std::move(c));
  }
  return r;
}

std::string FormatCount(std::optional<std::uint64_t> n) {
  if (!n) return "—";
  std::string digits = std::to_string(*n);
  std::string out;
  for (size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string RenderUsageText(const UsageReport& report) {
  std::ostringstream out;
  out << "cases with LLM usage: " << report.case_count() << "\n";
  out << "total tokens: " << FormatCount(report.total_tokens) << "\n";
  out << "average tokens per case: " << FormatCount(report.RoundedAverage()) << "\n";
  if (auto avg = report.AverageCost()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "$%.4f", *avg);
    out << "estimated cost per case: " << buf << "\n";
  } else {
    out << "estimated cost per case: —\n";
  }
  return out.str();
}

}  // namespace symtee::llm
