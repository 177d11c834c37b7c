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


// Sink detection and intraprocedural length/capacity analysis over a parsed
// translation unit.

#ifndef SYMTEE_SLICER_SLICER_H_
#define SYMTEE_SLICER_SLICER_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symtee/cparse/ast.h"

namespace symtee::slicer {

using cparse::Node;
using cparse::SourceSpan;
using cparse::TranslationUnit;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SliceError : public std::runtime_error {
 public:
  SliceError(const std::string& message, std::string missing)
      : std::runtime_error(message), missing_(std::move(missing)) {}
  const std::string& missing() const { return missing_; }

 private:
  std::string missing_;
};

struct SinkSpec {
  std::string api_name;
  int dest_arg = 0;
  int src_arg = 1;
  int len_arg = 2;
};

// TEE_MemMove, memcpy and memmove, all with (dest, src, len).
std::vector<SinkSpec> DefaultSinkSpecs();

// Parses {"sinks":[{"name":...,"dest":0,"src":1,"len":2}, ...]}.
std::vector<SinkSpec> LoadSinkSpecs(std::string_view json_text);

struct CapacityInfo {
  enum class Kind { kFixedArray, kUnresolved };
  Kind kind = Kind::kUnresolved;
  std::uint64_t bytes = 0;
  SourceSpan decl_span;
  std::string dest_name;  // declared array name when resolved

  bool fixed() const { return kind == Kind::kFixedArray; }
};

// One value-carrying step of a local derivation: `name = rhs`.
struct AssignStep {
  std::string name;
  std::string type_base;  // declared type of `name`
  bool is_pointer = false;
  const Node* rhs = nullptr;  // points into the unit
  SourceSpan span;
};

struct LengthOrigin {
  enum class Kind { kConstant, kParamField, kLocalDerived, kOpaque };
  Kind kind = Kind::kOpaque;

  // kConstant, or the folded root constant of a kLocalDerived chain.
  std::uint64_t value = 0;

  // kParamField, or the root of a kLocalDerived chain. `field_path` is empty
  // for a scalar parameter such as `int dkLen`.
  bool has_param_root = false;
  int param_position = -1;
  std::string param_name;
  std::optional<std::uint64_t> subscript;
  std::vector<std::string> field_path;
  std::string root_text;  // e.g. "params[0].memref.size"
  const Node* root = nullptr;

  // kLocalDerived: assignments from the root towards the sink, in order.
  std::vector<AssignStep> chain;

  SourceSpan expr_span;
  std::string expr_text;       // the length argument as written
  const Node* expr = nullptr;  // the length argument node

  // Names whose value equals the length at the sink (copies and widening
  // casts only), plus the printed length argument and root expressions.
  std::vector<std::string> aliases;
  // Every local variable that the length depends on.
  std::vector<std::string> chain_vars;

  // Subscript when present, else the parameter position.
  int param_index() const {
    return subscript ? static_cast<int>(*subscript) : param_position;
  }
};

struct GuardInfo {
  enum class Status { kGuarded, kUnguarded };
  enum class Against { kNone, kCapacity, kConstant };
  Status status = Status::kUnguarded;
  Against compared_against = Against::kNone;
  SourceSpan guard_span;
  std::uint64_t bound = 0;

  bool guarded() const { return status == Status::kGuarded; }
};

struct SinkCandidate {
  std::string file_id;
  std::string function_name;
  const Node* function = nullptr;
  const Node* call = nullptr;
  SourceSpan call_span;
  SinkSpec spec;
  CapacityInfo capacity;
  LengthOrigin length;
  GuardInfo guard;
};

struct Slice {
  std::string function_text;
  std::vector<std::string> required_decls;
  SinkCandidate origin;

  // required_decls followed by function_text.
  std::string Text() const;
};

std::vector<SinkCandidate> FindSinkCalls(const TranslationUnit& unit,
                                         const std::vector<SinkSpec>& specs);
CapacityInfo ResolveDestCapacity(const SinkCandidate& cand,
                                 const TranslationUnit& unit);
LengthOrigin TraceLengthSource(const SinkCandidate& cand,
                               const TranslationUnit& unit);
GuardInfo HasDominatingGuard(const SinkCandidate& cand,
                             const TranslationUnit& unit);
Slice ExtractSlice(const SinkCandidate& cand, const TranslationUnit& unit);

// Runs the three analyses over every sink call and fills in the candidates.
std::vector<SinkCandidate> AnalyzeUnit(const TranslationUnit& unit,
                                       const std::vector<SinkSpec>& specs);

// Candidates that must never reach the harness stage: guarded sinks and sinks
// whose length is opaque.
bool ShouldDrop(const SinkCandidate& cand);

// Identifiers that slices may use without a visible declaration: TEE API
// constants and the like. Harness synthesis supplies stubs for them.
bool IsKnownExternal(std::string_view name);

// Returns the unit's source with `guard_text` inserted as a statement
// immediately before the statement containing `call`. Braces are added when
// that statement is the unbraced body of a control statement.
std::string InsertGuardBefore(const TranslationUnit& unit, const Node& call,
                              std::string_view guard_text);

// Helpers shared with harness synthesis.
// The innermost statement chain from `function`'s body to `target`.
std::vector<const Node*> AncestorsOf(const Node& function, const Node& target);
// True when the statement ends in a return or abort call on every path.
bool IsEarlyExit(const Node& stmt);
// True when `expr` mentions any of `names` as an identifier or printed
// subexpression.
bool MentionsAny(const Node& expr, const std::vector<std::string>& names);

}  // namespace symtee::slicer

#endif  // SYMTEE_SLICER_SLICER_H_
