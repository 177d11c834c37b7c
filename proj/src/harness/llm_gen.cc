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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "symtee/cparse/errors.h"
#include "symtee/cparse/parser.h"
#include "symtee/harness/lower.h"

namespace symtee::harness {

namespace {

std::string ReadPrompt(const GenConfig& config, const std::string& name) {
  std::filesystem::path path = std::filesystem::path(config.prompts_dir) / name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing prompt template " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Fill(std::string text, const std::map<std::string, std::string>& vars) {
  for (const auto& [key, value] : vars) {
    std::string needle = "{{" + key + "}}";
    for (size_t at = text.find(needle); at != std::string::npos;
         at = text.find(needle, at + value.size())) {
      text.replace(at, needle.size(), value);
    }
  }
  return text;
}

std::string StubList(const HarnessModel& m) {
  std::string out;
  for (const Stub& s : m.stubs) {
    if (s.kind == StubKind::kFlagGlobal) continue;
    const char* what = s.kind == StubKind::kNoOpFunction ? "function"
                       : s.kind == StubKind::kTypeDecl   ? "type"
                                                         : "constant";
    out += "- " + s.name + " (" + what + ")\n";
  }
  return out.empty() ? "- none\n" : out;
}

std::string InputList(const HarnessModel& m) {
  std::string out;
  for (const SymbolicInput& in : m.symbolic_inputs) {
    out += "- " + in.name + ": " + (in.is_signed ? "signed " : "unsigned ") +
           std::to_string(in.width_bits) + "-bit, 0 <= " + in.name +
           " <= " + std::to_string(in.domain_upper_bound) + "\n";
  }
  for (const std::string& setup : m.main_setup) {
    if (setup.find("memref.buffer") == std::string::npos) out += "  wired as `" + setup + "`\n";
  }
  return out.empty() ? "- none: the copy length is a constant\n" : out;
}

std::string OracleText(const HarnessModel& m) {
  std::string out;
  if (m.oracle.kind == OracleSpec::Kind::kReturnValue) {
    out = "Store the return value of `" + m.function_name + "` and require it to equal `" +
          m.oracle.expected_error + "`.\n";
  } else {
    out = "Declare `volatile int " + m.oracle.flag_name + " = 0;`. Inside `" + m.function_name +
          "`, set `" + m.oracle.flag_name +
          " = 1;` in every branch that rejects the length before the copy. Require the flag "
          "to be set.\n";
  }
  if (m.oracle.uses_copy_length()) {
    out += std::string("Declare `unsigned long ") + kCopyLengthName + " = 0;` and assign it the copy "
           "length immediately before the copy. The trigger reads it.\n";
  }
  return out;
}

}  // namespace

llm::UsageRecord GenResult::usage() const {
  llm::UsageRecord sum;
  for (const llm::UsageRecord& u : calls) {
    sum.input_tokens += u.input_tokens;
    sum.output_tokens += u.output_tokens;
  }
  if (!calls.empty()) sum.request_id = calls.back().request_id;
  return sum;
}

llm::CompletionRequest BuildRequest(const slicer::Slice& slice, const GenConfig& config,
                                    const std::vector<std::string>& previous_errors) {
  HarnessModel m = BuildModel(slice, config.harness);
  llm::CompletionRequest req;
  req.system_prompt = ReadPrompt(config, "system.txt");
  req.max_output_tokens = config.max_output_tokens;
  req.user_prompt = Fill(ReadPrompt(config, "harness.txt"),
                         {{"function", m.function_name},
                          {"sink", slice.origin.spec.api_name},
                          {"length", slice.origin.length.expr_text},
                          {"capacity", std::to_string(m.capacity_bytes)},
                          {"slice", slice.Text()},
                          {"stubs", StubList(m)},
                          {"inputs", InputList(m)},
                          {"oracle", OracleText(m)},
                          {"trigger", m.oracle.trigger},
                          {"message", kOracleMessage}});
  if (!previous_errors.empty()) {
    std::string retry = ReadPrompt(config, "retry.txt");
    for (const std::string& e : previous_errors) req.user_prompt += Fill(retry, {{"error", e}});
  }
  return req;
}

std::string ExtractCode(const std::string& reply) {
  size_t open = reply.find("```");
  if (open == std::string::npos) return reply;
  size_t body = reply.find('\n', open);
  if (body == std::string::npos) return "";
  size_t close = reply.find("```", body + 1);
  return reply.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1);
}

std::string ValidateHarness(const std::string& source, const HarnessModel& model) {
  try {
    cparse::TranslationUnit unit = cparse::ParseUnit(source, "harness.c");
    if (cparse::FindFunction(unit, model.function_name) == nullptr) {
      return "the harness does not define `" + model.function_name + "`";
    }
    LiftSourceToHir(source, LoweringConfigFor(model));
  } catch (const cparse::ParseError& e) {
    return std::string("parse error: ") + e.what();
  } catch (const cparse::DuplicateDefinition& e) {
    return std::string("parse error: ") + e.what();
  } catch (const LoweringError& e) {
    return std::string("lowering error: ") + e.what();
  }
  return "";
}

GenResult GenerateViaLlm(const slicer::Slice& slice, const llm::LlmClient& client,
                         const GenConfig& config) {
  HarnessModel model = BuildModel(slice, config.harness);
  GenResult result;
  std::vector<std::string> errors;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    llm::Completion reply = client.Complete(BuildRequest(slice, config, errors));
    result.calls.push_back(reply.usage);
    result.attempts = attempt + 1;
    std::string source = ExtractCode(reply.text);
    std::string error = ValidateHarness(source, model);
    if (error.empty()) {
      result.source = std::move(source);
      return result;
    }
    errors.push_back(std::move(error));
  }
  throw GenError("no valid harness after " + std::to_string(result.attempts) +
                     " attempts; last error: " + errors.back(),
                 std::move(result.calls), result.attempts);
}

}  // namespace symtee::harness
