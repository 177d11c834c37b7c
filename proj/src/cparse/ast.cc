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


#include "symtee/cparse/ast.h"

#include <algorithm>
#include <string>

namespace symtee::cparse {

std::string_view KindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kFunctionDef: return "FunctionDef";
    case NodeKind::kParam: return "Param";
    case NodeKind::kRecordDecl: return "RecordDecl";
    case NodeKind::kEnumDecl: return "EnumDecl";
    case NodeKind::kEnumerator: return "Enumerator";
    case NodeKind::kTypedef: return "Typedef";
    case NodeKind::kVarDecl: return "VarDecl";
    case NodeKind::kInclude: return "Include";
    case NodeKind::kDefine: return "Define";
    case NodeKind::kOpaque: return "Opaque";
    case NodeKind::kBlock: return "Block";
    case NodeKind::kIf: return "If";
    case NodeKind::kWhile: return "While";
    case NodeKind::kDoWhile: return "DoWhile";
    case NodeKind::kFor: return "For";
    case NodeKind::kReturn: return "Return";
    case NodeKind::kExprStmt: return "ExprStmt";
    case NodeKind::kBreak: return "Break";
    case NodeKind::kContinue: return "Continue";
    case NodeKind::kEmpty: return "Empty";
    case NodeKind::kCall: return "Call";
    case NodeKind::kBinaryOp: return "BinaryOp";
    case NodeKind::kAssign: return "Assign";
    case NodeKind::kUnaryOp: return "UnaryOp";
    case NodeKind::kPostfixOp: return "PostfixOp";
    case NodeKind::kConditional: return "Conditional";
    case NodeKind::kMember: return "Member";
    case NodeKind::kIndex: return "Index";
    case NodeKind::kIdentifier: return "Identifier";
    case NodeKind::kIntLiteral: return "IntLiteral";
    case NodeKind::kStringLiteral: return "StringLiteral";
    case NodeKind::kCast: return "Cast";
    case NodeKind::kSizeofExpr: return "SizeofExpr";
    case NodeKind::kSizeofType: return "SizeofType";
    case NodeKind::kInitList: return "InitList";
    case NodeKind::kComma: return "Comma";
  }
  return "?";
}

bool TypeSpec::HasSpecifier(std::string_view s) const {
  return std::find(specifiers.begin(), specifiers.end(), s) != specifiers.end();
}

std::vector<const Node*> Node::Params() const {
  std::vector<const Node*> out;
  for (const Node& c : children) {
    if (c.kind == NodeKind::kParam) out.push_back(&c);
  }
  return out;
}

const Node* Node::Body() const {
  if (kind != NodeKind::kFunctionDef || Has(kFlagPrototype) || children.empty()) {
    return nullptr;
  }
  const Node& last = children.back();
  return last.kind == NodeKind::kBlock ? &last : nullptr;
}

namespace {

bool EqualLists(const std::vector<Node>& a, const std::vector<Node>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!StructurallyEqual(a[i], b[i])) return false;
  }
  return true;
}

bool EqualTypes(const TypeSpec& a, const TypeSpec& b) {
  return a.specifiers == b.specifiers && a.base == b.base &&
         EqualLists(a.body, b.body);
}

bool EqualDeclarators(const Declarator& a, const Declarator& b) {
  return a.name == b.name && a.pointer_quals == b.pointer_quals &&
         EqualLists(a.dims, b.dims) && a.fn_ptr == b.fn_ptr &&
         a.fn_ptr_depth == b.fn_ptr_depth && EqualLists(a.fn_params, b.fn_params) &&
         a.fn_variadic == b.fn_variadic && a.fn_void_params == b.fn_void_params;
}

}  // namespace

bool StructurallyEqual(const Node& a, const Node& b) {
  return a.kind == b.kind && a.text == b.text && a.raw == b.raw &&
         a.int_value == b.int_value && a.flags == b.flags &&
         EqualTypes(a.type, b.type) && EqualDeclarators(a.decl, b.decl) &&
         EqualLists(a.children, b.children);
}

bool StructurallyEqual(const TranslationUnit& a, const TranslationUnit& b) {
  return EqualLists(a.items, b.items);
}

namespace {

std::string StripQualifiers(std::string_view base) {
  std::string out;
  size_t i = 0;
  while (i < base.size()) {
    size_t j = base.find(' ', i);
    if (j == std::string_view::npos) j = base.size();
    std::string_view w = base.substr(i, j - i);
    if (!w.empty() && w != "const" && w != "volatile") {
      if (!out.empty()) out += ' ';
      out += w;
    }
    i = j + 1;
  }
  return out;
}

}  // namespace

std::uint64_t ScalarByteSize(std::string_view base_in) {
  std::string base = StripQualifiers(base_in);
  if (base.find("char") != std::string::npos) return 1;
  if (base.find("short") != std::string::npos) return 2;
  if (base.find("long") != std::string::npos) return 8;
  if (base == "int" || base == "unsigned" || base == "signed" ||
      base == "unsigned int" || base == "signed int") {
    return 4;
  }
  if (base == "uint8_t" || base == "int8_t" || base == "bool" || base == "_Bool") {
    return 1;
  }
  if (base == "uint16_t" || base == "int16_t") return 2;
  if (base == "uint32_t" || base == "int32_t" || base == "TEE_Result") return 4;
  return 8;
}

bool IsSignedBase(std::string_view base_in) {
  std::string base = StripQualifiers(base_in);
  if (base.find("unsigned") != std::string::npos) return false;
  if (base.rfind("int", 0) == 0 && base.size() > 3 && base != "intptr_t") {
    return true;  // intN_t
  }
  return base == "char" || base == "signed char" || base == "short" ||
         base == "int" || base == "long" || base == "long long" ||
         base == "signed" || base == "short int" || base == "long int" ||
         base == "ssize_t" || base == "intptr_t" || base == "ptrdiff_t" ||
         base == "signed int";
}

std::string_view SpanText(std::string_view source, const SourceSpan& span) {
  if (span.start_byte > source.size()) return {};
  size_t end = std::min<size_t>(span.end_byte, source.size());
  return source.substr(span.start_byte, end - span.start_byte);
}

}  // namespace symtee::cparse
