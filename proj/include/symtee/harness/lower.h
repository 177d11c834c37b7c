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


// Lowering of harness C (template-rendered or LLM-written) into HarnessIR.
//
// The harness is executed from `main` by an interpreter whose integer values
// are linear expressions over the symbolic inputs. Every branch on a symbolic
// value becomes an IR `If`; the code after the branch is lowered separately
// for each side, so the IR is a decision tree and needs no merge points.
// Arithmetic whose result could leave its C type is materialized through an
// `Assign`, which carries the wraparound semantics into the IR.

#ifndef SYMTEE_HARNESS_LOWER_H_
#define SYMTEE_HARNESS_LOWER_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symtee/cparse/ast.h"
#include "symtee/ir.h"

namespace symtee::harness {

class LoweringError : public std::runtime_error {
 public:
  LoweringError(const std::string& message, std::uint32_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  std::uint32_t line() const { return line_; }

 private:
  std::uint32_t line_;
};

struct LoweringConfig {
  int unroll_limit = 8;       // loop iterations per loop entry
  std::size_t max_paths = 4096;  // leaves of the decision tree
  int max_call_depth = 16;
  std::vector<std::string> sink_names = {"TEE_MemMove", "memcpy", "memmove"};
};

ir::HarnessIR LowerUnit(const cparse::TranslationUnit& unit, const LoweringConfig& config = {});

// Parses then lowers. Throws cparse::ParseError or LoweringError.
ir::HarnessIR LiftSourceToHir(std::string_view harness_source,
                              const LoweringConfig& config = {});

}  // namespace symtee::harness

#endif  // SYMTEE_HARNESS_LOWER_H_
