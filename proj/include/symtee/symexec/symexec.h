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


// Builtin symbolic engine over HarnessIR.

#ifndef SYMTEE_SYMEXEC_SYMEXEC_H_
#define SYMTEE_SYMEXEC_SYMEXEC_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symtee/ir.h"

namespace symtee::symexec {

class PathBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnsupportedConstraint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class OracleScopeExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
// The engine produced a witness that does not reproduce under concrete
// execution. Always a bug in the engine.
class SelfCheckFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ExecConfig {
  std::uint64_t domain_bound = 4096;
  std::size_t max_paths = 4096;
  std::size_t max_constraints = 256;
  std::size_t solver_node_budget = 1u << 20;
};

// `expr <= 0` or `expr == 0` over declared symbols.
struct Atom {
  enum class Rel { kLe, kEq };
  ir::LinExpr expr;
  Rel rel = Rel::kLe;

  bool operator==(const Atom&) const = default;
  std::string ToString() const;
};

struct SymbolDomain {
  std::string name;
  ir::Int lo = 0;
  ir::Int hi = 0;
  bool operator==(const SymbolDomain&) const = default;
};

struct PathCondition {
  std::vector<SymbolDomain> domain;  // declaration order
  std::vector<Atom> constraints;

  bool operator==(const PathCondition&) const = default;
  // Evaluates every constraint and domain bound under `assignment`.
  bool Satisfied(const std::map<std::string, ir::Int>& assignment) const;
  std::string ToString() const;
};

struct Witness {
  std::vector<std::pair<std::string, std::uint64_t>> assignment;  // decl order

  bool operator==(const Witness&) const = default;
  std::map<std::string, ir::Int> AsMap() const;
  std::string ToString() const;
};

// One branch decision along a path.
struct Decision {
  int site = -1;
  bool taken = false;
  cparse::SourceSpan span;
  std::string text;
  bool operator==(const Decision&) const = default;
};

struct PathResult {
  PathCondition condition;
  std::vector<Decision> decisions;
  std::vector<int> reached_asserts;  // passed or failed, in order
  std::optional<int> failed_assert;  // path ends at this failing assert
  std::map<std::string, ir::LinExpr> state;  // final IR variable values
  std::optional<ir::LinExpr> returned;
};

enum class Engine { kBuiltin, kExternal };

struct Violation {
  int assert_site = -1;
  std::string message;
  PathCondition path;
  Witness witness;
  Engine engine = Engine::kBuiltin;
  std::vector<Decision> decisions;
  // External engine only: source line of the failing assert and the test
  // artifact the witness came from.
  int source_line = 0;
  std::string artifact;

  bool operator==(const Violation&) const = default;
};

// The symbol domain of `ir` under `config`: [0, min(2^w - 1, domain_bound)].
std::vector<SymbolDomain> DomainOf(const ir::HarnessIR& ir, std::uint64_t domain_bound);

// Depth-first, then-first path enumeration with eager feasibility pruning.
std::vector<PathResult> Explore(const ir::HarnessIR& ir, const ExecConfig& config = {});

// Returns the lexicographically smallest model in declaration order, or
// nullopt when the condition is unsatisfiable.
std::optional<Witness> CheckFeasible(const PathCondition& pc, const ExecConfig& config = {});

std::vector<Violation> FindViolations(const ir::HarnessIR& ir, const ExecConfig& config = {});

// Exhaustive concrete execution over [0, bound] per symbol (also capped by
// each symbol's width). Returns the minimal failing assignment per assert
// site, ordered by site. When `all_failing` is given it receives every
// failing assignment in enumeration order.
std::vector<Violation> BruteForceOracle(const ir::HarnessIR& ir, std::uint64_t bound,
                                        std::vector<Witness>* all_failing = nullptr);

struct ConcreteRun {
  bool assumptions_hold = true;  // false: an Assume pruned the run
  std::optional<int> failed_assert;
  std::string failed_message;
  std::vector<Decision> decisions;
  std::map<std::string, ir::Int> state;
  std::optional<ir::Int> returned;
};

ConcreteRun ExecuteConcrete(const ir::HarnessIR& ir,
                            const std::map<std::string, ir::Int>& assignment);

}  // namespace symtee::symexec

#endif  // SYMTEE_SYMEXEC_SYMEXEC_H_
