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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace symtee::llm {
namespace {

CompletionRequest Req(std::string sys, std::string user) {
  CompletionRequest r;
  r.system_prompt = std::move(sys);
  r.user_prompt = std::move(user);
  return r;
}

std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("symtee_llm_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(PromptHashTest, MatchesIndependentDigest) {
  // Digests computed with Python's hashlib over b"sys\0user" and b"\0".
  EXPECT_EQ(PromptHash(Req("sys", "user")),
            "d9a85eb23dd96f9c5e0bfaa3121633c2d678e44c5582ec82120d4132f70ff461");
  EXPECT_EQ(PromptHash(Req("", "")),
            "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d");
  // The separator keeps boundary shifts apart.
  EXPECT_NE(PromptHash(Req("ab", "c")), PromptHash(Req("a", "bc")));
}

TEST(FixtureTest, RoundTrip) {
  std::vector<FixtureEntry> entries = {{"h1", "int main(void) {}\n", 10, 20},
                                       {"h2", "\"quoted\" \\ text", 0, 1}};
  EXPECT_EQ(ParseFixture(SerializeFixture(entries)), entries);
  EXPECT_TRUE(ParseFixture("[]").empty());
}

TEST(FixtureTest, MalformedFixturesAreRejected) {
  EXPECT_THROW(ParseFixture("{}"), FixtureError);
  EXPECT_THROW(ParseFixture("[{\"prompt_hash\":\"x\"}]"), FixtureError);
  EXPECT_THROW(ParseFixture("not json"), FixtureError);
  EXPECT_THROW(ParseFixture("[{\"prompt_hash\":\"x\",\"response_text\":\"\","
                            "\"input_tokens\":-1,\"output_tokens\":0}]"),
               FixtureError);
}

TEST(ReplayTransportTest, ReturnsRecordedTextAndUsage) {
  auto req = Req("sys", "user");
  ReplayTransport t({{PromptHash(req), "harness text", 3012, 2919}});
  LlmClient client(std::shared_ptr<Transport>(&t, [](Transport*) {}));
  Completion c = client.Complete(req);
  EXPECT_EQ(c.text, "harness text");
  EXPECT_EQ(c.usage.input_tokens, 3012u);
  EXPECT_EQ(c.usage.output_tokens, 2919u);
  EXPECT_EQ(c.usage.total(), 5931u);
}

TEST(ReplayTransportTest, UnmatchedPromptIsFixtureMiss) {
  ReplayTransport t({{PromptHash(Req("sys", "user")), "x", 1, 1}});
  try {
    t.Complete(Req("sys", "other"));
    FAIL() << "expected FixtureMiss";
  } catch (const FixtureMiss& e) {
    EXPECT_EQ(e.hash(), PromptHash(Req("sys", "other")));
  }
}

TEST(ReplayTransportTest, SameHashEntriesAreConsumedInOrder) {
  auto req = Req("s", "u");
  ReplayTransport t({{PromptHash(req), "first", 1, 1}, {PromptHash(req), "second", 2, 2}});
  EXPECT_EQ(t.Complete(req).text, "first");
  EXPECT_EQ(t.Complete(req).text, "second");
  EXPECT_THROW(t.Complete(req), FixtureMiss);
}

TEST(ReplayTransportTest, LoadsADirectoryOfFixtures) {
  auto dir = TempDir("dir");
  std::ofstream(dir / "b.json") << SerializeFixture({{PromptHash(Req("s", "b")), "B", 1, 2}});
  std::ofstream(dir / "a.json") << SerializeFixture({{PromptHash(Req("s", "a")), "A", 3, 4}});
  std::ofstream(dir / "notes.txt") << "ignored";
  ReplayTransport t(dir.string());
  EXPECT_EQ(t.Complete(Req("s", "a")).text, "A");
  EXPECT_EQ(t.Complete(Req("s", "b")).text, "B");
  EXPECT_THROW(ReplayTransport((dir / "missing.json").string()), FixtureError);
}

TEST(LlmClientTest, EmptyPromptsAreRejected) {
  LlmClient client(std::make_shared<ReplayTransport>(std::vector<FixtureEntry>{}));
  EXPECT_THROW(client.Complete(Req("", "u")), std::invalid_argument);
  EXPECT_THROW(client.Complete(Req("s", "")), std::invalid_argument);
}

TEST(RecordTransportTest, AppendsExchangesThenReplays) {
  auto dir = TempDir("record");
  std::string path = (dir / "rec.json").string();
  auto r1 = Req("s", "one");
  auto r2 = Req("s", "two");
  auto inner = std::make_unique<ReplayTransport>(
      std::vector<FixtureEntry>{{PromptHash(r1), "ONE", 5, 6}, {PromptHash(r2), "TWO", 7, 8}});
  RecordTransport rec(std::move(inner), path);
  EXPECT_EQ(rec.Complete(r1).text, "ONE");
  EXPECT_EQ(rec.Complete(r2).text, "TWO");
  ReplayTransport replay(path);
  Completion c = replay.Complete(r2);
  EXPECT_EQ(c.text, "TWO");
  EXPECT_EQ(c.usage.total(), 15u);
}

// A loopback stand-in for a chat-completions endpoint.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
      if (req.get_header_value("Authorization") != "Bearer good-key") {
        res.status = 401;
        res.set_content("{\"error\":\"bad key\"}", "application/json");
        return;
      }
      auto body = nlohmann::json::parse(req.body);
      std::string user = body["messages"][1]["content"];
      nlohmann::json reply = {
          {"id", "cmpl-1"},
          {"choices", {{{"message", {{"role", "assistant"}, {"content", "echo:" + user}}}}}},
          {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 4}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(LiveTransportTest, RoundTripAgainstLoopbackEndpoint) {
  FakeEndpoint ep;
  LiveTransport t({ep.url(), "good-key", "test-model", 10});
  Completion c = t.Complete(Req("s", "hello"));
  EXPECT_EQ(c.text, "echo:hello");
  EXPECT_EQ(c.usage.input_tokens, 11u);
  EXPECT_EQ(c.usage.output_tokens, 4u);
  EXPECT_EQ(c.usage.request_id, "cmpl-1");
}

TEST(LiveTransportTest, BadCredentialsAreAuthErrors) {
  FakeEndpoint ep;
  LiveTransport t({ep.url(), "wrong", "test-model", 10});
  try {
    t.Complete(Req("s", "hello"));
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.kind(), TransportError::Kind::kAuth);
  }
  LiveTransport none({ep.url(), "", "m", 10});
  EXPECT_THROW(none.Complete(Req("s", "u")), TransportError);
}

TEST(LiveTransportTest, UnreachableEndpointIsNetworkError) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  LiveTransport t({"http://127.0.0.1:" + std::to_string(port) + "/v1", "k", "m", 2});
  try {
    t.Complete(Req("s", "u"));
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.kind(), TransportError::Kind::kNetwork);
  }
}

// ------------------------------------------------------------ accounting

TEST(UsageSummaryTest, AveragesPerCaseTotals) {
  UsageReport r = UsageSummary({{"a", {{1500, 2500, ""}}}, {"b", {{5000, 3000, ""}}}}, 0.0);
  EXPECT_EQ(r.case_count(), 2u);
  EXPECT_EQ(r.total_tokens, 12000u);
  EXPECT_EQ(r.RoundedAverage(), 6000u);
  EXPECT_EQ(FormatCount(r.RoundedAverage()), "6,000");
}

TEST(UsageSummaryTest, SingleCaseRendersWithSeparator) {
  UsageReport r = UsageSummary({{"pbkdf2", {{3012, 2919, ""}}}}, 0.0);
  EXPECT_EQ(FormatCount(r.RoundedAverage()), "5,931");
  EXPECT_NE(RenderUsageText(r).find("average tokens per case: 5,931"), std::string::npos);
}

TEST(UsageSummaryTest, EmptyInputHasUndefinedAverage) {
  UsageReport r = UsageSummary({}, 1e-5);
  EXPECT_EQ(r.case_count(), 0u);
  EXPECT_FALSE(r.RoundedAverage().has_value());
  EXPECT_EQ(FormatCount(r.RoundedAverage()), "—");
  EXPECT_NE(RenderUsageText(r).find("per case: —"), std::string::npos);
}

TEST(UsageSummaryTest, RetriesAreCountedWithinTheirCase) {
  UsageReport r = UsageSummary({{"x", {{100, 50, ""}, {120, 60, ""}}}, {"y", {}}}, 2e-6);
  ASSERT_EQ(r.per_case.size(), 2u);
  EXPECT_EQ(r.per_case[0].total_tokens, 330u);
  EXPECT_EQ(r.per_case[1].total_tokens, 0u);
  // 330 / 2 = 165 exactly; cost is the plain product.
  EXPECT_EQ(r.RoundedAverage(), 165u);
  EXPECT_DOUBLE_EQ(r.EstimatedCost(), 330 * 2e-6);
}

TEST(UsageSummaryTest, AverageRoundsHalfUp) {
  EXPECT_EQ(UsageSummary({{"a", {{1, 0, ""}}}, {"b", {{2, 0, ""}}}}, 0).RoundedAverage(), 2u);
  EXPECT_EQ(UsageSummary({{"a", {{1, 0, ""}}}, {"b", {{1, 0, ""}}}, {"c", {{2, 0, ""}}}}, 0)
                .RoundedAverage(),
            1u);
}

TEST(FormatCountTest, Separators) {
  EXPECT_EQ(FormatCount(0u), "0");
  EXPECT_EQ(FormatCount(999u), "999");
  EXPECT_EQ(FormatCount(1000u), "1,000");
  EXPECT_EQ(FormatCount(1234567u), "1,234,567");
}

}  // namespace
}  // namespace symtee::llm
