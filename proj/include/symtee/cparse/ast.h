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

// Syntax tree for the C subset accepted by the front end.
//
// The tree is a single uniform `Node` type tagged with a `NodeKind`. Each kind
// uses a fixed subset of the fields; the per-kind layout is listed next to the
// enumerators below. Nodes own their children by value.

#ifndef SYMTEE_CPARSE_AST_H_
#define SYMTEE_CPARSE_AST_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symtee::cparse {

struct SourceSpan {
  std::string file_id;
  std::uint32_t start_byte = 0;
  std::uint32_t end_byte = 0;
  std::uint32_t start_line = 1;
  std::uint32_t end_line = 1;

  bool Contains(const SourceSpan& other) const {
    return start_byte <= other.start_byte && other.end_byte <= end_byte;
  }
  bool operator==(const SourceSpan&) const = default;
};

enum class NodeKind {
  // Top-level items and declarations.
  kFunctionDef,  // text=name, type/decl=return type; children=Params..., [Block]
  kParam,        // text=name (may be empty), type, decl
  kRecordDecl,   // text=tag, children=VarDecl fields (kFlagUnion, kFlagHasBody)
  kEnumDecl,     // text=tag, children=Enumerators (kFlagHasBody)
  kEnumerator,   // text=name, int_value, children=[value expr]
  kTypedef,      // text=name, type, decl
  kVarDecl,      // text=name, type, decl, children=[initializer] (kFlagHasInit)
  kInclude,      // raw=header spelling, e.g. <klee/klee.h>
  kDefine,       // text=name, raw=body; int_value when kFlagIntegerMacro
  kOpaque,       // raw=verbatim source text of an unsupported region

  // Statements.
  kBlock,     // children=statements
  kIf,        // children=cond, then, [else]
  kWhile,     // children=cond, body
  kDoWhile,   // children=body, cond
  kFor,       // children=init, cond, step, body (missing parts are kEmpty)
  kReturn,    // children=[expr]
  kExprStmt,  // children=expr
  kBreak,
  kContinue,
  kEmpty,

  // Expressions.
  kCall,         // text=callee name when the callee is an identifier;
                 // children=callee, args...
  kBinaryOp,     // text=operator, children=lhs, rhs
  kAssign,       // text=operator (=, +=, ...), children=lhs, rhs
  kUnaryOp,      // text=operator (prefix), children=operand
  kPostfixOp,    // text=++ or --, children=operand
  kConditional,  // children=cond, then, else
  kMember,       // text=field, children=base (kFlagArrow for ->)
  kIndex,        // children=base, index
  kIdentifier,   // text=name
  kIntLiteral,   // text=spelling (macro name when kFlagFromMacro), int_value
  kStringLiteral,  // raw=spelling including quotes
  kCast,         // type, decl (abstract), children=operand
  kSizeofExpr,   // children=operand
  kSizeofType,   // type, decl (abstract)
  kInitList,     // children=elements
  kComma,        // children=lhs, rhs
};

std::string_view KindName(NodeKind kind);

inline constexpr std::uint32_t kFlagArrow = 1u << 0;
inline constexpr std::uint32_t kFlagHasElse = 1u << 1;
inline constexpr std::uint32_t kFlagPrototype = 1u << 2;
inline constexpr std::uint32_t kFlagVariadic = 1u << 3;
inline constexpr std::uint32_t kFlagUnion = 1u << 4;
inline constexpr std::uint32_t kFlagHasBody = 1u << 5;
inline constexpr std::uint32_t kFlagHasInit = 1u << 6;
inline constexpr std::uint32_t kFlagFromMacro = 1u << 7;
inline constexpr std::uint32_t kFlagVoidParams = 1u << 8;
inline constexpr std::uint32_t kFlagIntegerMacro = 1u << 9;

struct Node;

// Declaration specifiers: storage class, qualifiers and the base type.
struct TypeSpec {
  std::vector<std::string> specifiers;  // static, const, extern, ...
  std::string base;                     // "unsigned long", "struct foo", ...
  std::vector<Node> body;  // inline record/enum definition, at most one

  bool HasSpecifier(std::string_view s) const;
};

struct Declarator {
  std::string name;
  std::vector<std::string> pointer_quals;  // one entry per '*'
  std::vector<Node> dims;                  // array dimensions; kEmpty for []
  bool fn_ptr = false;                     // T (*name)(params)
  int fn_ptr_depth = 0;
  std::vector<Node> fn_params;
  bool fn_variadic = false;
  bool fn_void_params = false;

  int pointer_depth() const { return static_cast<int>(pointer_quals.size()); }
};

struct Node {
  NodeKind kind = NodeKind::kEmpty;
  SourceSpan span;
  std::string text;
  std::string raw;
  std::uint64_t int_value = 0;
  std::uint32_t flags = 0;
  TypeSpec type;
  Declarator decl;
  std::vector<Node> children;

  bool Has(std::uint32_t flag) const { return (flags & flag) != 0; }

  // kFunctionDef helpers.
  std::vector<const Node*> Params() const;
  const Node* Body() const;

  // kVarDecl / kParam helpers.
  const Node* Init() const {
    return Has(kFlagHasInit) && !children.empty() ? &children[0] : nullptr;
  }
};

struct TranslationUnit {
  std::string file_id;
  std::string source_text;
  std::vector<Node> items;
};

// Structural equality: ignores spans and source text, compares everything
// that the printer emits.
bool StructurallyEqual(const Node& a, const Node& b);
bool StructurallyEqual(const TranslationUnit& a, const TranslationUnit& b);

// Pre-order traversal. The visitor returns false to skip a node's children.
template <typename Visitor>
void Walk(const Node& node, Visitor&& visit) {
  if (!visit(node)) return;
  for (const Node& child : node.type.body) Walk(child, visit);
  for (const Node& dim : node.decl.dims) Walk(dim, visit);
  for (const Node& child : node.children) Walk(child, visit);
}

// Byte sizes for the fixed integer-width table: char=1, short=2, int=4,
// long=8, everything else 8.
std::uint64_t ScalarByteSize(std::string_view base);
bool IsSignedBase(std::string_view base);

// Text covered by `span` inside `source`.
std::string_view SpanText(std::string_view source, const SourceSpan& span);

}  // namespace symtee::cparse

#endif  // SYMTEE_CPARSE_AST_H_
