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

#ifndef SYMTEE_CPARSE_PARSER_H_
#define SYMTEE_CPARSE_PARSER_H_

#include <cstddef>
#include <string>
#include <string_view>

#include "symtee/cparse/ast.h"
#include "symtee/cparse/errors.h"

namespace symtee::cparse {

struct ParseOptions {
  std::size_t max_bytes = 4u << 20;
};

// Parses a whole file. Statements inside function bodies that fall outside
// the supported subset become kOpaque nodes; any other syntax error aborts
// the file with ParseError.
TranslationUnit ParseUnit(std::string_view source, std::string file_id,
                          const ParseOptions& options = {});

// Parses a standalone expression (used for synthesized trigger expressions).
Node ParseExpression(std::string_view text);

// Emits compilable C for the tree. Deterministic; re-parsing the output yields
// a structurally identical tree.
std::string PrettyPrint(const TranslationUnit& unit);
std::string PrintExpr(const Node& expr);
std::string PrintStatement(const Node& stmt, int indent = 0);

// Returns the unique function definition named `name`, or nullptr. Prototypes
// are not definitions. Throws DuplicateDefinition when the name is defined
// more than once.
const Node* FindFunction(const TranslationUnit& unit, std::string_view name);

// Names treated as typedefs even when their declaration is not visible.
bool IsWellKnownTypedef(std::string_view name);

}  // namespace symtee::cparse

#endif  // SYMTEE_CPARSE_PARSER_H_
