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

#include <openssl/sha.h>

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace symtee::report {

using nlohmann::json;
using nlohmann::ordered_json;

std::string GeneratorName(Generator g) {
  switch (g) {
    case Generator::kTemplate:
      return "template";
    case Generator::kLlm:
      return "llm";
    case Generator::kLlmFallbackTemplate:
      return "llm_fallback_template";
  }
  return "template";
}

std::string FindingId(const slicer::SinkCandidate& cand) {
  std::string key = cand.file_id + '\0' + cand.function_name + '\0' +
                    std::to_string(cand.call_span.start_byte) + ':' +
                    std::to_string(cand.call_span.end_byte);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(key.data()), key.size(), digest);
  std::string hex;
  char buf[3];
  for (int i = 0; i < 8; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string SuggestedGuard(const slicer::SinkCandidate& cand, std::uint64_t capacity) {
  std::string ret = "return -1;";
  if (cand.function != nullptr) {
    std::string base = cand.function->type.base;
    if (!cand.function->decl.pointer_quals.empty()) {
      ret = "return NULL;";
    } else if (base.find("TEE_Result") != std::string::npos) {
      ret = "return TEE_ERROR_BAD_PARAMETERS;";
    } else if (base == "void") {
      ret = "return;";
    }
  }
  return "if (" + cand.length.expr_text + " > " + std::to_string(capacity) + ") " + ret;
}

Finding AssembleFinding(const slicer::SinkCandidate& cand, const slicer::Slice& slice,
                        const symexec::Violation& violation, const FindingContext& ctx) {
  (void)slice;
  Finding f;
  f.id = FindingId(cand);
  f.file = cand.file_id;
  f.function = cand.function_name;
  f.sink_line = cand.call_span.start_line;
  f.sink_api = cand.spec.api_name;
  f.capacity_bytes = ctx.capacity_bytes != 0 ? ctx.capacity_bytes
                     : cand.capacity.fixed() ? cand.capacity.bytes
                                             : ctx.default_capacity;
  f.length_expr = cand.length.expr_text;
  f.witness = violation.witness.assignment;
  f.oracle_kind = ctx.oracle_kind;
  f.engine = violation.engine == symexec::Engine::kBuiltin ? "builtin" : "external";
  f.generator = GeneratorName(ctx.generator);
  f.suggested_guard = SuggestedGuard(cand, f.capacity_bytes);
  f.artifact = violation.artifact;
  for (const symexec::Decision& d : violation.decisions) {
    std::uint32_t line = d.span.start_line;
    if (line < ctx.harness_first || line > ctx.harness_last || ctx.harness_first == 0) continue;
    std::uint32_t shift = ctx.source_first;
    f.path.push_back({line - ctx.harness_first + shift,
                      d.span.end_line - ctx.harness_first + shift, d.taken, d.text});
  }
  return f;
}

void SortFindings(std::vector<Finding>* findings) {
  std::sort(findings->begin(), findings->end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.file, a.sink_line, a.id) < std::tie(b.file, b.sink_line, b.id);
  });
}

namespace {

ordered_json ToJson(const Finding& f) {
  ordered_json witness = ordered_json::object();
  for (const auto& [name, value] : f.witness) witness[name] = value;
  ordered_json path = ordered_json::array();
  for (const PathStep& p : f.path) {
    path.push_back({{"span", {{"start_line", p.start_line}, {"end_line", p.end_line}}},
                    {"taken", p.taken},
                    {"condition", p.condition}});
  }
  ordered_json j = {{"id", f.id},
                    {"file", f.file},
                    {"function", f.function},
                    {"sink_line", f.sink_line},
                    {"sink_api", f.sink_api},
                    {"capacity_bytes", f.capacity_bytes},
                    {"length_expr", f.length_expr},
                    {"witness", witness},
                    {"oracle_kind", f.oracle_kind},
                    {"engine", f.engine},
                    {"generator", f.generator},
                    {"suggested_guard", f.suggested_guard},
                    {"path", path}};
  if (!f.artifact.empty()) j["artifact"] = f.artifact;
  return j;
}

std::string RenderText(const std::vector<Finding>& findings) {
  std::ostringstream out;
  if (findings.empty()) {
    out << "no findings\n";
    return out.str();
  }
  for (const Finding& f : findings) {
    out << f.file << ":" << f.sink_line << ": " << f.sink_api << " in " << f.function
        << " copies `" << f.length_expr << "` bytes into a " << f.capacity_bytes
        << "-byte buffer without validating the length\n";
    out << "  witness:";
    for (const auto& [name, value] : f.witness) out << " " << name << "=" << value;
    if (f.witness.empty()) out << " (no symbolic input)";
    out << "\n";
    for (const PathStep& p : f.path) {
      out << "  path: line " << p.start_line << " `" << p.condition << "` "
          << (p.taken ? "taken" : "not taken") << "\n";
    }
    out << "  oracle: " << f.oracle_kind << ", engine: " << f.engine
        << ", harness: " << f.generator << "\n";
    if (!f.artifact.empty()) out << "  artifact: " << f.artifact << "\n";
    out << "  suggested guard: " << f.suggested_guard << "\n";
    out << "  id: " << f.id << "\n\n";
  }
  out << findings.size() << (findings.size() == 1 ? " finding\n" : " findings\n");
  return out.str();
}

}  // namespace

std::string RenderReport(const std::vector<Finding>& findings, Format format) {
  std::vector<Finding> sorted = findings;
  SortFindings(&sorted);
  if (format == Format::kText) return RenderText(sorted);
  ordered_json doc = {{"version", kSchemaVersion}, {"tool", kToolName}};
  doc["findings"] = ordered_json::array();
  for (const Finding& f : sorted) doc["findings"].push_back(ToJson(f));
  return doc.dump() + "\n";
}

std::vector<Finding> ParseReport(std::string_view json_text) {
  std::vector<Finding> out;
  try {
    ordered_json doc = ordered_json::parse(json_text);
    if (doc.at("version").get<int>() != kSchemaVersion) {
      throw ReportParseError("unsupported report version " + doc.at("version").dump());
    }
    for (const ordered_json& j : doc.at("findings")) {
      Finding f;
      f.id = j.at("id").get<std::string>();
      f.file = j.at("file").get<std::string>();
      f.function = j.at("function").get<std::string>();
      f.sink_line = j.at("sink_line").get<std::uint32_t>();
      f.sink_api = j.at("sink_api").get<std::string>();
      f.capacity_bytes = j.at("capacity_bytes").get<std::uint64_t>();
      f.length_expr = j.at("length_expr").get<std::string>();
      for (const auto& [name, value] : j.at("witness").items()) {
        f.witness.emplace_back(name, value.get<std::uint64_t>());
      }
      f.oracle_kind = j.at("oracle_kind").get<std::string>();
      f.engine = j.at("engine").get<std::string>();
      f.generator = j.at("generator").get<std::string>();
      f.suggested_guard = j.at("suggested_guard").get<std::string>();
      for (const ordered_json& p : j.at("path")) {
        f.path.push_back({p.at("span").at("start_line").get<std::uint32_t>(),
                          p.at("span").at("end_line").get<std::uint32_t>(),
                          p.at("taken").get<bool>(), p.value("condition", "")});
      }
      f.artifact = j.value("artifact", "");
      out.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw ReportParseError(std::string("malformed report: ") + e.what());
  }
  return out;
}

}  // namespace symtee::report
