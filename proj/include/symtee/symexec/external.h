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


// Adapter for an external symbolic-execution engine (KLEE-compatible) that
// runs over the rendered C harness. The on-disk contract is described in
// docs/engine-adapter.md.

#ifndef SYMTEE_SYMEXEC_EXTERNAL_H_
#define SYMTEE_SYMEXEC_EXTERNAL_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symtee/symexec/symexec.h"

namespace symtee::symexec {

class MalformedOutput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Builtin and external verdicts disagree for the same harness.
class DiscrepancyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineConfig {
  std::string engine_path;        // SYMTEE_ENGINE_PATH; empty means unavailable
  std::string cc_path = "clang";  // SYMTEE_ENGINE_CC
  std::string include_dir;        // SYMTEE_ENGINE_INCLUDE, holds klee/klee.h
  int timeout_secs = 60;          // SYMTEE_ENGINE_TIMEOUT_SECS
  std::vector<std::string> extra_args;  // SYMTEE_ENGINE_ARGS, whitespace-split
  bool keep_workspace = false;

  static EngineConfig FromEnvironment();
};

struct RawEngineOutput {
  std::string log;  // engine stdout/stderr plus messages.txt
  std::map<std::string, std::string> artifacts;  // file name -> bytes
};

struct EngineOutcome {
  enum class Status { kViolations, kClean, kEngineUnavailable, kEngineFailure };
  Status status = Status::kEngineUnavailable;
  std::vector<Violation> violations;
  std::string log_excerpt;
  std::string workspace;  // set when keep_workspace
};

std::string_view StatusName(EngineOutcome::Status s);

// Writes the harness to a fresh workspace, compiles it to bitcode, runs the
// engine under a wall-clock budget and parses what it produced.
EngineOutcome ExternalEngineRun(std::string_view harness_source, const EngineConfig& cfg);

// Extracts assertion failures and their witnesses. Throws MalformedOutput.
std::vector<Violation> ParseEngineOutput(const RawEngineOutput& raw);

struct KTestObject {
  std::string name;
  std::string bytes;
};

// Decodes a .ktest file. Throws MalformedOutput on bad magic or truncation.
std::vector<KTestObject> ParseKTest(std::string_view data);

// Encodes objects in the .ktest layout (version 3, no arguments).
std::string WriteKTest(const std::vector<KTestObject>& objects);

}  // namespace symtee::symexec

#endif  // SYMTEE_SYMEXEC_EXTERNAL_H_
