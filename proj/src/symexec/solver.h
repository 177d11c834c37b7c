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


// Internal interval machinery shared by the solver and the explorer.

#ifndef SYMTEE_SRC_SYMEXEC_SOLVER_H_
#define SYMTEE_SRC_SYMEXEC_SOLVER_H_

#include <optional>
#include <utility>
#include <vector>

#include "symtee/symexec/symexec.h"

namespace symtee::symexec::internal {

using Bounds = std::vector<std::pair<ir::Int, ir::Int>>;  // per domain entry

// Tightens the domain of `pc` by interval propagation and difference-bound
// closure. Returns nullopt when the condition is proved unsatisfiable.
std::optional<Bounds> PropagateBounds(const PathCondition& pc);

// Floor division for any sign combination.
ir::Int FloorDiv(ir::Int a, ir::Int b);

}  // namespace symtee::symexec::internal

#endif  // SYMTEE_SRC_SYMEXEC_SOLVER_H_
