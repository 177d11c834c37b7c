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


#include <string>

#include "symtee/cparse/parser.h"

namespace symtee::cparse {
namespace {

constexpr int kIndentWidth = 4;

int BinaryPrec(const std::string& op) {
  if (op == "||") return 4;
  if (op == "&&") return 5;
  if (op == "|") return 6;
  if (op == "^") return 7;
  if (op == "&") return 8;
  if (op == "==" || op == "!=") return 9;
  if (op == "<" || op == ">" || op == "<=" || op == ">=") return 10;
  if (op == "<<" || op == ">>") return 11;
  if (op == "+" || op == "-") return 12;
  return 13;
}

int Prec(const Node& e) {
  switch (e.kind) {
    case NodeKind::kComma: return 1;
    case NodeKind::kAssign: return 2;
    case NodeKind::kConditional: return 3;
    case NodeKind::kBinaryOp: return BinaryPrec(e.text);
    case NodeKind::kUnaryOp:
    case NodeKind::kCast:
    case NodeKind::kSizeofExpr:
    case NodeKind::kSizeofType: return 14;
    case NodeKind::kPostfixOp:
    case NodeKind::kCall:
    case NodeKind::kIndex:
    case NodeKind::kMember: return 15;
    default: return 16;
  }
}

std::string Indent(int level) { return std::string(level * kIndentWidth, ' '); }

std::string Expr(const Node& e);
std::string Stmt(const Node& s, int level);

std::string ExprAtLeast(const Node& e, int min_prec) {
  std::string text = Expr(e);
  return Prec(e) < min_prec ? "(" + text + ")" : text;
}

std::string ParamList(const std::vector<const Node*>& params, bool variadic,
                      bool void_params);

std::string TypeText(const TypeSpec& t, int level);

// Renders a declarator around `inner` (the name, possibly empty).
std::string DeclaratorText(const Declarator& d) {
  std::string out;
  for (const std::string& q : d.pointer_quals) {
    out += "*";
    if (!q.empty()) out += q + " ";
  }
  if (d.fn_ptr) {
    std::vector<const Node*> params;
    for (const Node& p : d.fn_params) params.push_back(&p);
    out += "(" + std::string(d.fn_ptr_depth, '*') + d.name + ")" +
           ParamList(params, d.fn_variadic, d.fn_void_params);
  } else {
    out += d.name;
  }
  for (const Node& dim : d.dims) {
    out += dim.kind == NodeKind::kEmpty ? "[]" : "[" + ExprAtLeast(dim, 3) + "]";
  }
  return out;
}

std::string Declaration(const TypeSpec& t, const Declarator& d, int level) {
  std::string type = TypeText(t, level);
  std::string decl = DeclaratorText(d);
  if (decl.empty()) return type;
  return type + " " + decl;
}

std::string ParamList(const std::vector<const Node*>& params, bool variadic,
                      bool void_params) {
  if (void_params) return "(void)";
  std::string out = "(";
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += Declaration(params[i]->type, params[i]->decl, 0);
  }
  if (variadic) out += params.empty() ? "..." : ", ...";
  return out + ")";
}

std::string RecordBody(const Node& rec, int level) {
  std::string out = rec.Has(kFlagUnion) ? "union" : "struct";
  if (!rec.text.empty()) out += " " + rec.text;
  if (!rec.Has(kFlagHasBody)) return out;
  out += " {\n";
  for (const Node& f : rec.children) {
    out += Indent(level + 1) + Declaration(f.type, f.decl, level + 1) + ";\n";
  }
  return out + Indent(level) + "}";
}

std::string EnumBody(const Node& en, int level) {
  std::string out = "enum";
  if (!en.text.empty()) out += " " + en.text;
  if (!en.Has(kFlagHasBody)) return out;
  out += " {\n";
  for (const Node& e : en.children) {
    out += Indent(level + 1) + e.text;
    if (!e.children.empty()) out += " = " + ExprAtLeast(e.children[0], 3);
    out += ",\n";
  }
  return out + Indent(level) + "}";
}

std::string TypeText(const TypeSpec& t, int level) {
  std::string out;
  for (const std::string& s : t.specifiers) out += s + " ";
  if (!t.body.empty()) {
    const Node& b = t.body.front();
    out += b.kind == NodeKind::kEnumDecl ? EnumBody(b, level) : RecordBody(b, level);
  } else {
    out += t.base;
  }
  return out;
}

std::string InitText(const Node& e) {
  if (e.kind != NodeKind::kInitList) return ExprAtLeast(e, 2);
  std::string out = "{";
  for (size_t i = 0; i < e.children.size(); ++i) {
    if (i) out += ", ";
    const Node& el = e.children[i];
    if (el.kind == NodeKind::kAssign && el.children[0].kind == NodeKind::kMember &&
        el.children[0].children.empty()) {
      out += "." + el.children[0].text + " = " + InitText(el.children[1]);
    } else {
      out += InitText(el);
    }
  }
  return out + "}";
}

std::string Expr(const Node& e) {
  switch (e.kind) {
    case NodeKind::kIdentifier:
      return e.text;
    case NodeKind::kIntLiteral:
      return e.text;
    case NodeKind::kStringLiteral:
      return e.raw;
    case NodeKind::kComma:
      return ExprAtLeast(e.children[0], 1) + ", " + ExprAtLeast(e.children[1], 2);
    case NodeKind::kAssign:
      if (e.children[0].kind == NodeKind::kMember && e.children[0].children.empty()) {
        return "." + e.children[0].text + " = " + InitText(e.children[1]);
      }
      return ExprAtLeast(e.children[0], 14) + " " + e.text + " " +
             ExprAtLeast(e.children[1], 2);
    case NodeKind::kConditional:
      return ExprAtLeast(e.children[0], 4) + " ? " + ExprAtLeast(e.children[1], 1) +
             " : " + ExprAtLeast(e.children[2], 3);
    case NodeKind::kBinaryOp: {
      int p = BinaryPrec(e.text);
      return ExprAtLeast(e.children[0], p) + " " + e.text + " " +
             ExprAtLeast(e.children[1], p + 1);
    }
    case NodeKind::kUnaryOp: {
      const Node& op = e.children[0];
      std::string inner = op.kind == NodeKind::kUnaryOp ? "(" + Expr(op) + ")"
                                                        : ExprAtLeast(op, 14);
      return e.text + inner;
    }
    case NodeKind::kCast:
      return "(" + Declaration(e.type, e.decl, 0) + ")" + ExprAtLeast(e.children[0], 14);
    case NodeKind::kSizeofExpr:
      return "sizeof(" + Expr(e.children[0]) + ")";
    case NodeKind::kSizeofType:
      return "sizeof(" + Declaration(e.type, e.decl, 0) + ")";
    case NodeKind::kPostfixOp:
      return ExprAtLeast(e.children[0], 15) + e.text;
    case NodeKind::kCall: {
      std::string out = ExprAtLeast(e.children[0], 15) + "(";
      for (size_t i = 1; i < e.children.size(); ++i) {
        if (i > 1) out += ", ";
        out += ExprAtLeast(e.children[i], 2);
      }
      return out + ")";
    }
    case NodeKind::kIndex:
      return ExprAtLeast(e.children[0], 15) + "[" + Expr(e.children[1]) + "]";
    case NodeKind::kMember:
      if (e.children.empty()) return "." + e.text;
      return ExprAtLeast(e.children[0], 15) + (e.Has(kFlagArrow) ? "->" : ".") + e.text;
    case NodeKind::kInitList:
      return InitText(e);
    default:
      return "/* " + std::string(KindName(e.kind)) + " */";
  }
}

std::string VarDeclText(const Node& v, int level) {
  std::string out = Declaration(v.type, v.decl, level);
  if (const Node* init = v.Init()) out += " = " + InitText(*init);
  return out + ";";
}

// Body of a compound statement: a block stays on the same line, anything else
// goes on its own line one level deeper.
std::string SubStmt(const Node& s, int level) {
  if (s.kind == NodeKind::kBlock) return " " + Stmt(s, level);
  return "\n" + Indent(level + 1) + Stmt(s, level + 1);
}

// Returns the statement without leading indentation; nested lines are
// indented relative to `level`.
std::string Stmt(const Node& s, int level) {
  switch (s.kind) {
    case NodeKind::kBlock: {
      std::string out = "{\n";
      for (const Node& c : s.children) out += Indent(level + 1) + Stmt(c, level + 1) + "\n";
      return out + Indent(level) + "}";
    }
    case NodeKind::kVarDecl:
      return VarDeclText(s, level);
    case NodeKind::kRecordDecl:
      return RecordBody(s, level) + ";";
    case NodeKind::kEnumDecl:
      return EnumBody(s, level) + ";";
    case NodeKind::kIf: {
      std::string out = "if (" + Expr(s.children[0]) + ")" + SubStmt(s.children[1], level);
      if (s.children.size() > 2) {
        const Node& els = s.children[2];
        out += s.children[1].kind == NodeKind::kBlock ? " else" : "\n" + Indent(level) + "else";
        if (els.kind == NodeKind::kIf) {
          out += " " + Stmt(els, level);
        } else {
          out += SubStmt(els, level);
        }
      }
      return out;
    }
    case NodeKind::kWhile:
      return "while (" + Expr(s.children[0]) + ")" + SubStmt(s.children[1], level);
    case NodeKind::kDoWhile: {
      std::string out = "do" + SubStmt(s.children[0], level);
      out += s.children[0].kind == NodeKind::kBlock ? " " : "\n" + Indent(level);
      return out + "while (" + Expr(s.children[1]) + ");";
    }
    case NodeKind::kFor: {
      const Node& init = s.children[0];
      std::string out = "for (";
      if (init.kind == NodeKind::kEmpty) {
        out += ";";
      } else {
        out += Stmt(init, level);
      }
      if (s.children[1].kind != NodeKind::kEmpty) out += " " + Expr(s.children[1]);
      out += ";";
      if (s.children[2].kind != NodeKind::kEmpty) out += " " + Expr(s.children[2]);
      return out + ")" + SubStmt(s.children[3], level);
    }
    case NodeKind::kReturn:
      return s.children.empty() ? "return;" : "return " + Expr(s.children[0]) + ";";
    case NodeKind::kExprStmt:
      return Expr(s.children[0]) + ";";
    case NodeKind::kBreak:
      return "break;";
    case NodeKind::kContinue:
      return "continue;";
    case NodeKind::kEmpty:
      return ";";
    case NodeKind::kOpaque:
      return s.raw;
    default:
      return Expr(s) + ";";
  }
}

std::string Item(const Node& n) {
  switch (n.kind) {
    case NodeKind::kInclude:
      return "#include " + n.raw;
    case NodeKind::kDefine:
      return n.raw.empty() ? "#define " + n.text : "#define " + n.text + " " + n.raw;
    case NodeKind::kOpaque:
      return n.raw;
    case NodeKind::kTypedef:
      return "typedef " + Declaration(n.type, n.decl, 0) + ";";
    case NodeKind::kFunctionDef: {
      std::string out = Declaration(n.type, n.decl, 0) +
                        ParamList(n.Params(), n.Has(kFlagVariadic),
                                  n.Has(kFlagVoidParams));
      if (const Node* body = n.Body()) return out + " " + Stmt(*body, 0);
      return out + ";";
    }
    default:
      return Stmt(n, 0);
  }
}

}  // namespace

std::string PrettyPrint(const TranslationUnit& unit) {
  std::string out;
  for (size_t i = 0; i < unit.items.size(); ++i) {
    const Node& n = unit.items[i];
    if (i > 0 && (n.kind == NodeKind::kFunctionDef ||
                  unit.items[i - 1].kind == NodeKind::kFunctionDef)) {
      out += "\n";
    }
    out += Item(n) + "\n";
  }
  return out;
}

std::string PrintExpr(const Node& expr) { return Expr(expr); }

std::string PrintStatement(const Node& stmt, int indent) {
  return Indent(indent) + Stmt(stmt, indent);
}

}  // namespace symtee::cparse
