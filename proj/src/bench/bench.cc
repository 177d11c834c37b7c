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


#include "symtee/bench/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "symtee/cparse/errors.h"
#include "symtee/cparse/parser.h"

namespace symtee::bench {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<SinkLabel> ParseSinks(const json& doc, const char* key,
                                  const std::vector<std::string>& sources) {
  std::vector<SinkLabel> out;
  if (!doc.contains(key)) return out;
  for (const json& item : doc.at(key)) {
    SinkLabel l;
    if (item.contains("file")) {
      l.file = item.at("file").get<std::string>();
    } else if (sources.size() == 1) {
      l.file = sources[0];
    } else {
      throw CorpusError(std::string(key) + " entry needs \"file\" in a multi-file case");
    }
    l.function = item.at("function").get<std::string>();
    l.line = item.at("line").get<std::uint32_t>();
    l.api = item.at("api").get<std::string>();
    out.push_back(std::move(l));
  }
  return out;
}

// True when `fn` contains a call on `line`; with `api` set, a call to it.
bool HasCallOnLine(const cparse::Node& fn, std::uint32_t line, const std::string* api) {
  bool found = false;
  cparse::Walk(fn, [&](const cparse::Node& n) {
    if (n.kind == cparse::NodeKind::kCall && n.span.start_line <= line &&
        line <= n.span.end_line && (api == nullptr || n.text == *api)) {
      found = true;
    }
    return !found;
  });
  return found;
}

void ValidateLabels(const CorpusCase& c) {
  std::map<std::string, cparse::TranslationUnit> units;
  for (const std::string& src : c.sources) {
    try {
      units[src] = cparse::ParseUnit(ReadFile(fs::path(c.dir) / src), src);
    } catch (const cparse::ParseError& e) {
      throw CorpusError(c.name + ": " + src + ":" + std::to_string(e.line()) + ": " + e.what());
    }
  }
  auto check = [&](const SinkLabel& l, bool any_call) {
    auto it = units.find(l.file);
    if (it == units.end()) throw CorpusError(c.name + ": label names unknown file " + l.file);
    const cparse::Node* fn = nullptr;
    try {
      fn = cparse::FindFunction(it->second, l.function);
    } catch (const cparse::DuplicateDefinition& e) {
      throw CorpusError(c.name + ": " + e.what());
    }
    if (fn == nullptr) {
      throw CorpusError(c.name + ": label names unknown function " + l.function);
    }
    if (!HasCallOnLine(*fn, l.line, any_call ? nullptr : &l.api)) {
      throw CorpusError(c.name + ": " + l.file + ":" + std::to_string(l.line) +
                        " is not a " + l.api + " call site in " + l.function);
    }
  };
  // Slicer-evading cases reach the API indirectly, so any call will do.
  for (const SinkLabel& l : c.label.vulnerable_sinks) check(l, c.label.expect_slicer_failure);
  for (const SinkLabel& l : c.label.safe_sinks) check(l, false);
}

std::string FileName(const std::string& path) { return fs::path(path).filename().string(); }

}  // namespace

CaseLabel ParseLabel(const std::string& json_text, const std::vector<std::string>& sources) {
  try {
    json doc = json::parse(json_text);
    if (!doc.is_object()) throw CorpusError("label must be a JSON object");
    CaseLabel label;
    label.vulnerable_sinks = ParseSinks(doc, "vulnerable_sinks", sources);
    label.safe_sinks = ParseSinks(doc, "safe_sinks", sources);
    label.expect_slicer_failure = doc.value("expect_slicer_failure", false);
    return label;
  } catch (const json::exception& e) {
    throw CorpusError(std::string("malformed label: ") + e.what());
  }
}

std::vector<CorpusCase> LoadCorpus(const std::string& root) {
  fs::path base(root);
  if (!fs::is_directory(base)) throw CorpusError(root + ": not a directory");
  if (fs::is_directory(base / "cases")) base /= "cases";
  std::vector<CorpusCase> out;
  for (const auto& group : fs::directory_iterator(base)) {
    if (!group.is_directory()) continue;
    for (const auto& dir : fs::directory_iterator(group.path())) {
      if (!dir.is_directory()) continue;
      CorpusCase c;
      c.group = group.path().filename().string();
      c.name = c.group + "/" + dir.path().filename().string();
      c.dir = dir.path().lexically_normal().generic_string();
      for (const auto& f : fs::directory_iterator(dir.path())) {
        if (f.is_regular_file() && f.path().extension() == ".c") {
          c.sources.push_back(f.path().filename().string());
        }
      }
      std::sort(c.sources.begin(), c.sources.end());
      if (c.sources.empty()) throw CorpusError(c.name + ": no source files");
      fs::path label = dir.path() / "label.json";
      if (!fs::exists(label)) throw CorpusError(c.name + ": missing label.json");
      try {
        c.label = ParseLabel(ReadFile(label), c.sources);
      } catch (const CorpusError& e) {
        throw CorpusError(c.name + ": " + e.what());
      }
      ValidateLabels(c);
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusCase& a, const CorpusCase& b) { return a.name < b.name; });
  return out;
}

CaseOutcome RunCase(const CorpusCase& c, const pipeline::PipelineConfig& config) {
  CaseOutcome out;
  out.name = c.name;
  out.group = c.group;
  out.vul = c.label.vulnerable_sinks.size();
  out.expect_slicer_failure = c.label.expect_slicer_failure;
  pipeline::PipelineConfig single = config;
  single.jobs = 1;
  for (const std::string& src : c.sources) {
    std::string source;
    try {
      source = ReadFile(fs::path(c.dir) / src);
    } catch (const CorpusError& e) {
      out.errors.push_back(e.what());
      continue;
    }
    pipeline::FileResult r = pipeline::ScanSource(source, c.dir + "/" + src, single);
    out.errors.insert(out.errors.end(), r.errors.begin(), r.errors.end());
    for (const pipeline::CandidateResult& cand : r.candidates) {
      using Stage = pipeline::CandidateResult::Stage;
      ++out.slicer_candidates;
      if (cand.stage != Stage::kSliceFailed) ++out.extracted_slices;
      if (cand.stage == Stage::kConfirmed) ++out.confirmed;
      if (!cand.detail.empty()) {
        out.notes.push_back(src + ":" + std::to_string(cand.line) + ": " +
                            pipeline::StageName(cand.stage) + ": " + cand.detail);
      }
    }
    std::vector<llm::UsageRecord> usage = r.Usage();
    out.usage.insert(out.usage.end(), usage.begin(), usage.end());
    out.findings.insert(out.findings.end(), r.findings.begin(), r.findings.end());
  }
  report::SortFindings(&out.findings);

  std::vector<bool> used(c.label.vulnerable_sinks.size(), false);
  for (const report::Finding& f : out.findings) {
    bool matched = false;
    for (size_t i = 0; i < c.label.vulnerable_sinks.size() && !matched; ++i) {
      const SinkLabel& l = c.label.vulnerable_sinks[i];
      std::int64_t drift = static_cast<std::int64_t>(f.sink_line) - l.line;
      if (!used[i] && FileName(f.file) == FileName(l.file) && f.function == l.function &&
          f.sink_api == l.api && std::llabs(drift) <= 2) {
        used[i] = matched = true;
      }
    }
    if (matched) {
      ++out.tp;
    } else {
      out.false_positives.push_back(f);
    }
  }
  for (size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) out.missed.push_back(c.label.vulnerable_sinks[i]);
  }
  return out;
}

std::vector<CaseOutcome> RunCorpus(const std::vector<CorpusCase>& cases,
                                   const pipeline::PipelineConfig& config) {
  std::vector<CaseOutcome> outcomes(cases.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < cases.size(); i = next++) outcomes[i] = RunCase(cases[i], config);
  };
  int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(cases.size())));
  std::vector<std::thread> threads;
  for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();
  return outcomes;
}

std::string PercentText(std::size_t num, std::size_t den) {
  if (den == 0) return "—";
  // Tenths of a percent, half up: floor((num * 1000 / den) + 1/2).
  std::uint64_t tenths = (std::uint64_t{num} * 2000 + den) / (2 * std::uint64_t{den});
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

bool MeetsPercent(std::size_t num, std::size_t den, double min_percent) {
  if (den == 0) return false;
  // Compare num/den >= min/100 in thousandths of a percent to stay exact for
  // thresholds with up to three decimals.
  auto min_milli = static_cast<std::uint64_t>(std::llround(min_percent * 1000.0));
  return std::uint64_t{num} * 100000 >= min_milli * std::uint64_t{den};
}

std::string BenchScore::PrecisionText() const { return PercentText(total.tp, total.n); }
std::string BenchScore::RecallText() const { return PercentText(total.tp, total.vul); }

BenchScore Score(const std::vector<CaseOutcome>& outcomes, double price_per_token) {
  BenchScore s;
  std::vector<std::pair<std::string, std::vector<llm::UsageRecord>>> usage;
  for (const CaseOutcome& o : outcomes) {
    Tally& g = s.per_group[o.group];
    for (Tally* t : {&s.total, &g}) {
      t->vul += o.vul;
      t->n += o.n();
      t->tp += o.tp;
    }
    s.errors += o.errors.size();
    if (!o.usage.empty()) usage.emplace_back(o.name, o.usage);
  }
  s.usage = llm::UsageSummary(usage, price_per_token);
  return s;
}

std::string RenderScoreText(const BenchScore& score, const std::vector<CaseOutcome>& outcomes) {
  std::ostringstream out;
  auto row = [&](const std::string& name, const Tally& t, const std::string& tokens) {
    out << std::left << std::setw(8) << name << std::right << std::setw(5) << t.vul
        << std::setw(5) << t.n << std::setw(5) << t.tp << "  " << std::left
        << std::setw(tokens.empty() ? 0 : 13)
        << PercentText(t.tp, t.n) + " / " + PercentText(t.tp, t.vul) << tokens << "\n";
  };
  out << std::left << std::setw(8) << "group" << std::right << std::setw(5) << "Vul"
      << std::setw(5) << "N" << std::setw(5) << "TP" << "  P(%) / R(%)   tokens(avg)\n";
  for (const auto& [group, tally] : score.per_group) row(group, tally, "");
  row("total", score.total, llm::FormatCount(score.usage.RoundedAverage()));
  out << "\nprecision " << score.PrecisionText() << "%, recall " << score.RecallText()
      << "%\n";
  if (score.usage.case_count() > 0) out << "\n" << llm::RenderUsageText(score.usage) << "\n";
  for (const CaseOutcome& o : outcomes) {
    for (const SinkLabel& m : o.missed) {
      out << "missed: " << o.name << " " << m.function << ":" << m.line
          << (o.expect_slicer_failure && o.extracted_slices == 0 ? " (no slice extracted)" : "")
          << "\n";
    }
    for (const report::Finding& f : o.false_positives) {
      out << "false positive: " << o.name << " " << f.function << ":" << f.sink_line << "\n";
    }
    for (const std::string& e : o.errors) out << "error: " << o.name << ": " << e << "\n";
  }
  return out.str();
}

std::string RenderScoreJson(const BenchScore& score, const std::vector<CaseOutcome>& outcomes) {
  auto tally = [](const Tally& t) {
    return ordered_json{{"vul", t.vul},
                        {"n", t.n},
                        {"tp", t.tp},
                        {"precision", PercentText(t.tp, t.n)},
                        {"recall", PercentText(t.tp, t.vul)}};
  };
  ordered_json doc = {{"version", report::kSchemaVersion}, {"tool", report::kToolName}};
  doc["total"] = tally(score.total);
  doc["groups"] = ordered_json::object();
  for (const auto& [g, t] : score.per_group) doc["groups"][g] = tally(t);
  ordered_json cases = ordered_json::array();
  for (const CaseOutcome& o : outcomes) {
    ordered_json missed = ordered_json::array();
    for (const SinkLabel& m : o.missed) {
      missed.push_back({{"file", m.file}, {"function", m.function}, {"line", m.line}});
    }
    std::uint64_t tokens = 0;
    for (const llm::UsageRecord& u : o.usage) tokens += u.total();
    cases.push_back({{"name", o.name},
                     {"vul", o.vul},
                     {"n", o.n()},
                     {"tp", o.tp},
                     {"slicer_candidates", o.slicer_candidates},
                     {"extracted_slices", o.extracted_slices},
                     {"confirmed", o.confirmed},
                     {"expect_slicer_failure", o.expect_slicer_failure},
                     {"missed", missed},
                     {"errors", o.errors},
                     {"tokens", tokens}});
  }
  doc["cases"] = cases;
  ordered_json usage = {{"cases", score.usage.case_count()},
                        {"total_tokens", score.usage.total_tokens}};
  auto avg = score.usage.RoundedAverage();
  usage["average_tokens"] = avg ? ordered_json(*avg) : ordered_json(nullptr);
  doc["usage"] = usage;
  return doc.dump(2) + "\n";
}

}  // namespace symtee::bench
