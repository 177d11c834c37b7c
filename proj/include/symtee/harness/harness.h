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


// Harness synthesis: expands a slice into a self-contained C program with
// stubbed dependencies, symbolic length inputs and an assertion oracle.

#ifndef SYMTEE_HARNESS_HARNESS_H_
#define SYMTEE_HARNESS_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "symtee/harness/lower.h"
#include "symtee/ir.h"
#include "symtee/slicer/slicer.h"

namespace symtee::harness {

struct HarnessConfig {
  std::uint64_t domain_bound = 4096;
  std::uint64_t default_capacity = 512;  // used when capacity is unresolved
  int unroll_limit = 8;
};

enum class StubKind { kNoOpFunction, kTypeDecl, kFlagGlobal, kConstantMacro };
std::string StubKindName(StubKind kind);

struct Stub {
  std::string name;
  StubKind kind = StubKind::kNoOpFunction;
  std::string text;  // C definition
};

struct SymbolicInput {
  std::string name;
  std::string c_type;  // declaration type in main, e.g. "unsigned long"
  int width_bits = 64;
  bool is_signed = false;
  std::uint64_t domain_upper_bound = 0;
};

// `symbol op value`, e.g. size <= 4096.
struct Assumption {
  std::string symbol;
  std::string op;
  std::uint64_t value = 0;
  std::string text;  // rendered C condition
};

struct OracleSpec {
  enum class Kind { kReturnValue, kFlag };
  Kind kind = Kind::kFlag;
  std::string expected_error;  // kReturnValue
  std::string flag_name;       // kFlag
  // "<lhs> > <capacity>"; lhs is the length symbol, the copy-length global or
  // a constant.
  std::string trigger_lhs;
  std::uint64_t capacity = 0;
  std::string trigger;  // rendered C condition

  bool uses_copy_length() const;
};

std::string OracleKindName(OracleSpec::Kind kind);

inline constexpr char kFlagName[] = "g_checked";
inline constexpr char kCopyLengthName[] = "g_copy_len";
inline constexpr char kOracleMessage[] = "Missing input validation";

// The model keeps a copy of the slice, whose candidate points into the
// translation unit it came from; the unit must outlive the model.
struct HarnessModel {
  slicer::Slice slice;
  std::vector<Stub> stubs;  // one per external symbol, in emission order
  std::vector<SymbolicInput> symbolic_inputs;
  std::vector<Assumption> assumptions;
  OracleSpec oracle;
  std::uint64_t capacity_bytes = 0;
  std::uint64_t domain_bound = 0;
  int unroll_limit = 8;

  // Rendering inputs derived from the slice.
  std::string function_name;
  std::string instrumented_function;   // slice function after instrumentation
  std::vector<std::string> main_decls;  // local declarations in main
  std::vector<std::string> main_setup;  // assignments after the assumptions
  std::vector<std::string> call_args;
  std::string result_name = "ret";  // status variable for kReturnValue
  std::vector<std::string> sink_names;

  const Stub* FindStub(const std::string& name) const;
};

HarnessModel BuildModel(const slicer::Slice& slice, const HarnessConfig& config = {});

// One self-contained C file. Deterministic.
std::string RenderSource(const HarnessModel& model);

// Lowers the rendered source. Throws LoweringError.
ir::HarnessIR RenderHir(const HarnessModel& model);

// Lowering options matching the model (sink names, unroll bound).
LoweringConfig LoweringConfigFor(const HarnessModel& model);

// Error constants and their values as used by the stubs.
const std::vector<std::pair<std::string, std::uint32_t>>& TeeErrorConstants();

}  // namespace symtee::harness

#endif  // SYMTEE_HARNESS_HARNESS_H_
