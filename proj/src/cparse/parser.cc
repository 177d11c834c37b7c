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

#include "symtee/cparse/parser.h"

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "symtee/cparse/lexer.h"

namespace symtee::cparse {
namespace {

const std::set<std::string, std::less<>>& WellKnownTypedefs() {
  static const std::set<std::string, std::less<>> kNames = {
      "size_t",          "ssize_t",           "ptrdiff_t",
      "uint8_t",         "uint16_t",          "uint32_t",
      "uint64_t",        "int8_t",            "int16_t",
      "int32_t",         "int64_t",           "uintptr_t",
      "intptr_t",        "bool",              "TEE_Result",
      "TEE_Param",       "TEE_ObjectHandle",  "TEE_OperationHandle",
      "TEE_TASessionHandle", "TEE_Attribute", "TEE_UUID",
      "TEE_ObjectInfo",  "TEE_Identity",      "TEE_Time",
      "TEE_PropSetHandle", "TEE_ObjectEnumHandle", "TEE_OperationInfo"};
  return kNames;
}

const std::set<std::string, std::less<>>& BaseTypeWords() {
  static const std::set<std::string, std::less<>> kWords = {
      "void",   "char",     "short", "int",   "long",
      "float",  "double",   "signed", "unsigned", "_Bool"};
  return kWords;
}

const std::set<std::string, std::less<>>& SpecifierWords() {
  static const std::set<std::string, std::less<>> kWords = {
      "const",    "volatile", "static", "extern",   "register", "inline",
      "auto",     "restrict", "__inline", "__inline__", "__restrict"};
  return kWords;
}

int BinaryPrecedence(std::string_view op) {
  static const std::map<std::string, int, std::less<>> kPrec = {
      {"||", 4}, {"&&", 5}, {"|", 6},   {"^", 7},   {"&", 8},
      {"==", 9}, {"!=", 9}, {"<", 10},  {">", 10},  {"<=", 10},
      {">=", 10}, {"<<", 11}, {">>", 11}, {"+", 12}, {"-", 12},
      {"*", 13}, {"/", 13}, {"%", 13}};
  auto it = kPrec.find(op);
  return it == kPrec.end() ? -1 : it->second;
}

bool IsAssignOp(std::string_view op) {
  return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" ||
         op == "%=" || op == "&=" || op == "|=" || op == "^=" || op == "<<=" ||
         op == ">>=";
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file_id)
      : toks_(std::move(toks)), file_id_(std::move(file_id)) {}

  std::vector<Node> ParseItems() {
    std::vector<Node> items;
    while (Peek().kind != TokenKind::kEnd) ParseItem(&items);
    return items;
  }

  Node ParseStandaloneExpression() {
    Node e = ParseExpr();
    if (Peek().kind != TokenKind::kEnd) Fail("end of expression", {"<end>"});
    return e;
  }

 private:
  // ---------------------------------------------------------------- tokens
  const Token& Peek(size_t ahead = 0) const {
    size_t i = p_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& Next() {
    const Token& t = Peek();
    if (p_ < toks_.size() - 1) ++p_;
    return t;
  }
  bool AcceptPunct(std::string_view p) {
    if (Peek().IsPunct(p)) {
      Next();
      return true;
    }
    return false;
  }
  bool AcceptKeyword(std::string_view k) {
    if (Peek().IsKeyword(k)) {
      Next();
      return true;
    }
    return false;
  }
  [[noreturn]] void Fail(const std::string& what,
                         std::vector<std::string> expected) const {
    const Token& t = Peek();
    std::string got = t.kind == TokenKind::kEnd ? "end of input" : "'" + t.text + "'";
    throw ParseError("expected " + what + ", got " + got, t.line, t.column,
                     std::move(expected));
  }
  void ExpectPunct(std::string_view p) {
    if (!AcceptPunct(p)) Fail("'" + std::string(p) + "'", {std::string(p)});
  }
  std::string ExpectIdentifier() {
    if (Peek().kind != TokenKind::kIdentifier) Fail("identifier", {"identifier"});
    return Next().text;
  }

  Node Make(NodeKind kind, size_t first) const {
    Node n;
    n.kind = kind;
    Finish(&n, first);
    return n;
  }
  void Finish(Node* n, size_t first) const {
    const Token& a = toks_[first];
    const Token& b = toks_[p_ > first ? p_ - 1 : first];
    n->span.file_id = file_id_;
    n->span.start_byte = a.start;
    n->span.end_byte = std::max(a.end, b.end);
    n->span.start_line = a.line;
    n->span.end_line = std::max(a.end_line, b.end_line);
  }

  // ------------------------------------------------------------ type names
  bool IsTypedefName(std::string_view name) const {
    return typedefs_.count(std::string(name)) || IsWellKnownTypedef(name);
  }

  bool IsTypeStartAt(size_t i) const {
    const Token& t = Peek(i);
    if (t.kind == TokenKind::kKeyword) {
      return BaseTypeWords().count(t.text) || SpecifierWords().count(t.text) ||
             t.text == "struct" || t.text == "union" || t.text == "enum";
    }
    return t.kind == TokenKind::kIdentifier && IsTypedefName(t.text);
  }

  // Declaration heuristics for statement position with unknown typedefs:
  // `T x`, `T *x =`, `T **x;`.
  bool LooksLikeDeclaration() {
    if (IsTypeStartAt(0)) return true;
    if (Peek().kind != TokenKind::kIdentifier) return false;
    if (Peek(1).kind == TokenKind::kIdentifier) {
      typedefs_.insert(Peek().text);
      return true;
    }
    size_t i = 1;
    while (Peek(i).IsPunct("*")) ++i;
    if (i > 1 && Peek(i).kind == TokenKind::kIdentifier) {
      const Token& after = Peek(i + 1);
      if (after.IsPunct("=") || after.IsPunct(";") || after.IsPunct(",") ||
          after.IsPunct("[")) {
        typedefs_.insert(Peek().text);
        return true;
      }
    }
    return false;
  }

  void SkipAttributes() {
    while (Peek().kind == TokenKind::kIdentifier &&
           (Peek().text == "__attribute__" || Peek().text == "__attribute")) {
      Next();
      ExpectPunct("(");
      int depth = 1;
      while (depth > 0) {
        if (Peek().kind == TokenKind::kEnd) Fail("')'", {")"});
        const Token& t = Next();
        if (t.IsPunct("(")) ++depth;
        if (t.IsPunct(")")) --depth;
      }
    }
  }

  TypeSpec ParseSpecifiers() {
    TypeSpec spec;
    std::vector<std::string> words;
    while (true) {
      SkipAttributes();
      const Token& t = Peek();
      if (t.kind == TokenKind::kKeyword && SpecifierWords().count(t.text)) {
        spec.specifiers.push_back(Next().text);
      } else if (t.kind == TokenKind::kKeyword && BaseTypeWords().count(t.text)) {
        if (!spec.base.empty() && words.empty()) break;
        words.push_back(Next().text);
      } else if (t.IsKeyword("struct") || t.IsKeyword("union") ||
                 t.IsKeyword("enum")) {
        if (!spec.base.empty() || !words.empty()) break;
        size_t first = p_;
        std::string which = Next().text;
        std::string tag;
        if (Peek().kind == TokenKind::kIdentifier) tag = Next().text;
        spec.base = tag.empty() ? which : which + " " + tag;
        if (Peek().IsPunct("{")) {
          spec.body.push_back(which == "enum" ? ParseEnumBody(first, tag)
                                              : ParseRecordBody(first, tag, which == "union"));
        }
      } else if (t.kind == TokenKind::kIdentifier && spec.base.empty() &&
                 words.empty() && IsTypedefName(t.text)) {
        spec.base = Next().text;
      } else {
        break;
      }
    }
    if (!words.empty()) {
      std::string joined;
      for (const auto& w : words) joined += (joined.empty() ? "" : " ") + w;
      spec.base = joined;
    }
    if (spec.base.empty()) Fail("type specifier", {"type"});
    return spec;
  }

  Node ParseRecordBody(size_t first, const std::string& tag, bool is_union) {
    ExpectPunct("{");
    Node rec;
    rec.kind = NodeKind::kRecordDecl;
    rec.text = tag;
    rec.flags = kFlagHasBody | (is_union ? kFlagUnion : 0);
    while (!AcceptPunct("}")) {
      size_t decl_first = p_;
      TypeSpec spec = ParseSpecifiers();
      size_t begin = rec.children.size();
      do {
        Node field;
        field.kind = NodeKind::kVarDecl;
        field.type = spec;
        field.decl = ParseDeclarator(false);
        field.text = field.decl.name;
        if (Peek().IsPunct(":")) Fail("non-bitfield member", {"member"});
        rec.children.push_back(std::move(field));
      } while (AcceptPunct(","));
      ExpectPunct(";");
      for (size_t i = begin; i < rec.children.size(); ++i) {
        Finish(&rec.children[i], decl_first);
      }
    }
    Finish(&rec, first);
    return rec;
  }

  Node ParseEnumBody(size_t first, const std::string& tag) {
    ExpectPunct("{");
    Node en;
    en.kind = NodeKind::kEnumDecl;
    en.text = tag;
    en.flags = kFlagHasBody;
    std::uint64_t next_value = 0;
    while (!AcceptPunct("}")) {
      size_t e_first = p_;
      Node item;
      item.kind = NodeKind::kEnumerator;
      item.text = ExpectIdentifier();
      if (AcceptPunct("=")) {
        item.children.push_back(ParseConditional());
        if (item.children.back().kind == NodeKind::kIntLiteral) {
          next_value = item.children.back().int_value;
        } else if (item.children.back().kind == NodeKind::kUnaryOp &&
                   item.children.back().text == "-" &&
                   item.children.back().children[0].kind == NodeKind::kIntLiteral) {
          next_value = 0 - item.children.back().children[0].int_value;
        }
      }
      item.int_value = next_value++;
      Finish(&item, e_first);
      en.children.push_back(std::move(item));
      if (!AcceptPunct(",")) {
        ExpectPunct("}");
        break;
      }
    }
    Finish(&en, first);
    return en;
  }

  // Parses pointers, the declared name (optional when `abstract_ok`),
  // function-pointer parentheses and array dimensions.
  Declarator ParseDeclarator(bool abstract_ok) {
    Declarator d;
    while (AcceptPunct("*")) {
      std::string quals;
      while (Peek().IsKeyword("const") || Peek().IsKeyword("volatile") ||
             Peek().IsKeyword("restrict") || Peek().IsKeyword("__restrict")) {
        quals += (quals.empty() ? "" : " ") + Next().text;
      }
      d.pointer_quals.push_back(quals);
    }
    SkipAttributes();
    if (Peek().IsPunct("(") && Peek(1).IsPunct("*")) {
      Next();
      while (AcceptPunct("*")) ++d.fn_ptr_depth;
      d.fn_ptr = true;
      if (Peek().kind == TokenKind::kIdentifier) d.name = Next().text;
      else if (!abstract_ok) Fail("declarator name", {"identifier"});
      ExpectPunct(")");
      ExpectPunct("(");
      ParseParamList(&d.fn_params, &d.fn_variadic, &d.fn_void_params);
    } else if (Peek().kind == TokenKind::kIdentifier) {
      d.name = Next().text;
    } else if (!abstract_ok) {
      Fail("declarator name", {"identifier"});
    }
    while (Peek().IsPunct("[")) {
      size_t first = p_;
      Next();
      if (AcceptPunct("]")) {
        d.dims.push_back(Make(NodeKind::kEmpty, first));
      } else {
        d.dims.push_back(ParseConditional());
        ExpectPunct("]");
      }
    }
    SkipAttributes();
    return d;
  }

  // After '(' has been consumed; consumes through ')'.
  void ParseParamList(std::vector<Node>* params, bool* variadic, bool* void_params) {
    if (AcceptPunct(")")) return;
    if (Peek().IsKeyword("void") && Peek(1).IsPunct(")")) {
      Next();
      Next();
      *void_params = true;
      return;
    }
    while (true) {
      if (AcceptPunct("...")) {
        *variadic = true;
        ExpectPunct(")");
        return;
      }
      size_t first = p_;
      Node param;
      param.kind = NodeKind::kParam;
      if (!IsTypeStartAt(0) && Peek().kind == TokenKind::kIdentifier) {
        typedefs_.insert(Peek().text);  // unknown typedef in a parameter list
      }
      param.type = ParseSpecifiers();
      param.decl = ParseDeclarator(true);
      param.text = param.decl.name;
      Finish(&param, first);
      params->push_back(std::move(param));
      if (AcceptPunct(")")) return;
      ExpectPunct(",");
    }
  }

  // ------------------------------------------------------------ top level
  void ParseItem(std::vector<Node>* items) {
    size_t first = p_;
    const Token& t = Peek();
    switch (t.kind) {
      case TokenKind::kInclude: {
        Node n = Make(NodeKind::kInclude, first);
        n.raw = t.text;
        Next();
        Finish(&n, first);
        items->push_back(std::move(n));
        return;
      }
      case TokenKind::kDefine: {
        Node n;
        n.kind = NodeKind::kDefine;
        n.text = t.text;
        n.raw = t.value;
        if (t.from_macro) {
          n.flags |= kFlagIntegerMacro;
          n.int_value = t.int_value;
        }
        Next();
        Finish(&n, first);
        items->push_back(std::move(n));
        return;
      }
      case TokenKind::kDirective:
      case TokenKind::kOpaqueRegion: {
        Node n;
        n.kind = NodeKind::kOpaque;
        n.raw = t.text;
        Next();
        Finish(&n, first);
        items->push_back(std::move(n));
        return;
      }
      default:
        break;
    }
    if (AcceptPunct(";")) return;
    if (AcceptKeyword("typedef")) {
      TypeSpec spec = ParseSpecifiers();
      size_t begin = items->size();
      do {
        Node td;
        td.kind = NodeKind::kTypedef;
        td.type = spec;
        td.decl = ParseDeclarator(false);
        td.text = td.decl.name;
        typedefs_.insert(td.text);
        items->push_back(std::move(td));
      } while (AcceptPunct(","));
      ExpectPunct(";");
      for (size_t i = begin; i < items->size(); ++i) Finish(&(*items)[i], first);
      return;
    }
    if (!IsTypeStartAt(0)) {
      if (Peek().kind == TokenKind::kIdentifier &&
          (Peek(1).kind == TokenKind::kIdentifier || Peek(1).IsPunct("*"))) {
        typedefs_.insert(Peek().text);
      } else {
        Fail("declaration", {"type", "typedef", "directive"});
      }
    }
    TypeSpec spec = ParseSpecifiers();
    if (AcceptPunct(";")) {
      if (spec.body.empty()) {
        // Forward declaration such as `struct foo;`.
        Node fwd;
        fwd.kind = spec.base.rfind("enum", 0) == 0 ? NodeKind::kEnumDecl
                                                   : NodeKind::kRecordDecl;
        fwd.text = spec.base.substr(spec.base.find(' ') + 1);
        if (spec.base.rfind("union", 0) == 0) fwd.flags |= kFlagUnion;
        Finish(&fwd, first);
        items->push_back(std::move(fwd));
      } else {
        Node body = std::move(spec.body.front());
        Finish(&body, first);
        items->push_back(std::move(body));
      }
      return;
    }
    Declarator d = ParseDeclarator(false);
    if (!d.fn_ptr && d.dims.empty() && Peek().IsPunct("(")) {
      Next();
      Node fn;
      fn.kind = NodeKind::kFunctionDef;
      fn.type = std::move(spec);
      fn.text = d.name;
      fn.decl = std::move(d);
      bool variadic = false;
      bool void_params = false;
      std::vector<Node> params;
      ParseParamList(&params, &variadic, &void_params);
      if (variadic) fn.flags |= kFlagVariadic;
      if (void_params) fn.flags |= kFlagVoidParams;
      fn.children = std::move(params);
      SkipAttributes();
      if (AcceptPunct(";")) {
        fn.flags |= kFlagPrototype;
      } else {
        if (!Peek().IsPunct("{")) Fail("'{' or ';'", {"{", ";"});
        fn.children.push_back(ParseBlock());
      }
      Finish(&fn, first);
      items->push_back(std::move(fn));
      return;
    }
    ParseVarDeclTail(std::move(spec), std::move(d), first, items);
  }

  void ParseVarDeclTail(TypeSpec spec, Declarator first_decl, size_t first,
                        std::vector<Node>* out) {
    size_t begin = out->size();
    Declarator d = std::move(first_decl);
    while (true) {
      Node var;
      var.kind = NodeKind::kVarDecl;
      var.text = d.name;
      var.type = spec;
      var.decl = std::move(d);
      if (AcceptPunct("=")) {
        var.flags |= kFlagHasInit;
        var.children.push_back(ParseInitializer());
      }
      out->push_back(std::move(var));
      if (!AcceptPunct(",")) break;
      d = ParseDeclarator(false);
    }
    ExpectPunct(";");
    for (size_t i = begin; i < out->size(); ++i) Finish(&(*out)[i], first);
    // Inline record bodies belong to the first declarator only.
    for (size_t i = begin + 1; i < out->size(); ++i) {
      if (!(*out)[i].type.body.empty()) {
        Node& rec = (*out)[i].type.body.front();
        if (!rec.text.empty()) (*out)[i].type.body.clear();
      }
    }
  }

  Node ParseInitializer() {
    if (!Peek().IsPunct("{")) return ParseAssign();
    size_t first = p_;
    Next();
    Node list;
    list.kind = NodeKind::kInitList;
    while (!AcceptPunct("}")) {
      size_t el_first = p_;
      if (Peek().IsPunct(".") && Peek(1).kind == TokenKind::kIdentifier) {
        Next();
        Node member = Make(NodeKind::kMember, el_first);
        member.text = Next().text;
        Finish(&member, el_first);
        ExpectPunct("=");
        Node assign;
        assign.kind = NodeKind::kAssign;
        assign.text = "=";
        assign.children.push_back(std::move(member));
        assign.children.push_back(ParseInitializer());
        Finish(&assign, el_first);
        list.children.push_back(std::move(assign));
      } else {
        list.children.push_back(ParseInitializer());
      }
      if (!AcceptPunct(",")) {
        ExpectPunct("}");
        break;
      }
    }
    Finish(&list, first);
    return list;
  }

  // ------------------------------------------------------------ statements
  Node ParseBlock() {
    size_t first = p_;
    ExpectPunct("{");
    Node block;
    block.kind = NodeKind::kBlock;
    while (!Peek().IsPunct("}")) {
      if (Peek().kind == TokenKind::kEnd) Fail("'}'", {"}"});
      ParseStatementInto(&block.children);
    }
    Next();
    Finish(&block, first);
    return block;
  }

  // Declarations may expand to several VarDecl siblings.
  void ParseStatementInto(std::vector<Node>* out) {
    size_t start = p_;
    size_t mark = out->size();
    try {
      if (LooksLikeDeclaration()) {
        TypeSpec spec = ParseSpecifiers();
        if (AcceptPunct(";")) {
          // A local record/enum definition without declarators.
          Node body = spec.body.empty() ? Make(NodeKind::kEmpty, start)
                                        : std::move(spec.body.front());
          Finish(&body, start);
          out->push_back(std::move(body));
          return;
        }
        Declarator d = ParseDeclarator(false);
        ParseVarDeclTail(std::move(spec), std::move(d), start, out);
        return;
      }
      out->push_back(ParseStatementStrict());
    } catch (const ParseError&) {
      out->resize(mark);
      p_ = start;
      out->push_back(ParseOpaqueStatement(start));
    }
  }

  Node ParseStatement() {
    std::vector<Node> tmp;
    ParseStatementInto(&tmp);
    if (tmp.size() == 1) return std::move(tmp.front());
    // Several declarators in an unbraced position: wrap them.
    Node block;
    block.kind = NodeKind::kBlock;
    block.span = tmp.front().span;
    block.children = std::move(tmp);
    return block;
  }

  Node ParseStatementStrict() {
    size_t first = p_;
    const Token& t = Peek();
    if (t.kind == TokenKind::kDirective || t.kind == TokenKind::kOpaqueRegion ||
        t.kind == TokenKind::kInclude || t.kind == TokenKind::kDefine) {
      Fail("statement", {"statement"});
    }
    if (t.IsPunct("{")) return ParseBlock();
    if (AcceptPunct(";")) return Make(NodeKind::kEmpty, first);
    if (AcceptKeyword("if")) {
      Node n;
      n.kind = NodeKind::kIf;
      ExpectPunct("(");
      n.children.push_back(ParseExpr());
      ExpectPunct(")");
      n.children.push_back(ParseStatement());
      if (AcceptKeyword("else")) {
        n.flags |= kFlagHasElse;
        n.children.push_back(ParseStatement());
      }
      Finish(&n, first);
      return n;
    }
    if (AcceptKeyword("while")) {
      Node n;
      n.kind = NodeKind::kWhile;
      ExpectPunct("(");
      n.children.push_back(ParseExpr());
      ExpectPunct(")");
      n.children.push_back(ParseStatement());
      Finish(&n, first);
      return n;
    }
    if (AcceptKeyword("do")) {
      Node n;
      n.kind = NodeKind::kDoWhile;
      n.children.push_back(ParseStatement());
      if (!AcceptKeyword("while")) Fail("'while'", {"while"});
      ExpectPunct("(");
      n.children.push_back(ParseExpr());
      ExpectPunct(")");
      ExpectPunct(";");
      Finish(&n, first);
      return n;
    }
    if (AcceptKeyword("for")) {
      Node n;
      n.kind = NodeKind::kFor;
      ExpectPunct("(");
      size_t init_first = p_;
      if (AcceptPunct(";")) {
        n.children.push_back(Make(NodeKind::kEmpty, init_first));
      } else if (LooksLikeDeclaration()) {
        std::vector<Node> decls;
        TypeSpec spec = ParseSpecifiers();
        Declarator d = ParseDeclarator(false);
        ParseVarDeclTail(std::move(spec), std::move(d), init_first, &decls);
        if (decls.size() != 1) Fail("single declaration", {"declaration"});
        n.children.push_back(std::move(decls.front()));
      } else {
        Node es;
        es.kind = NodeKind::kExprStmt;
        es.children.push_back(ParseExpr());
        ExpectPunct(";");
        Finish(&es, init_first);
        n.children.push_back(std::move(es));
      }
      size_t cond_first = p_;
      if (Peek().IsPunct(";")) {
        n.children.push_back(Make(NodeKind::kEmpty, cond_first));
      } else {
        n.children.push_back(ParseExpr());
      }
      ExpectPunct(";");
      size_t step_first = p_;
      if (Peek().IsPunct(")")) {
        n.children.push_back(Make(NodeKind::kEmpty, step_first));
      } else {
        n.children.push_back(ParseExpr());
      }
      ExpectPunct(")");
      n.children.push_back(ParseStatement());
      Finish(&n, first);
      return n;
    }
    if (AcceptKeyword("return")) {
      Node n;
      n.kind = NodeKind::kReturn;
      if (!Peek().IsPunct(";")) n.children.push_back(ParseExpr());
      ExpectPunct(";");
      Finish(&n, first);
      return n;
    }
    if (AcceptKeyword("break")) {
      ExpectPunct(";");
      return Make(NodeKind::kBreak, first);
    }
    if (AcceptKeyword("continue")) {
      ExpectPunct(";");
      return Make(NodeKind::kContinue, first);
    }
    if (t.kind == TokenKind::kKeyword &&
        (t.text == "switch" || t.text == "goto" || t.text == "case" ||
         t.text == "default" || t.text == "asm" || t.text == "__asm__")) {
      Fail("supported statement", {"statement"});
    }
    if (t.kind == TokenKind::kIdentifier && Peek(1).IsPunct(":")) {
      Fail("supported statement", {"statement"});  // labels
    }
    Node n;
    n.kind = NodeKind::kExprStmt;
    n.children.push_back(ParseExpr());
    ExpectPunct(";");
    Finish(&n, first);
    return n;
  }

  // Skips one unsupported statement: up to a ';' at nesting depth zero, or a
  // balanced brace group. Never crosses the enclosing block's '}'.
  Node ParseOpaqueStatement(size_t first) {
    p_ = first;
    const Token& head = Peek();
    if (head.kind == TokenKind::kDirective || head.kind == TokenKind::kOpaqueRegion ||
        head.kind == TokenKind::kInclude || head.kind == TokenKind::kDefine) {
      Next();
    } else {
      int depth = 0;
      bool saw_group = false;
      while (true) {
        const Token& t = Peek();
        if (t.kind == TokenKind::kEnd) Fail("end of statement", {";", "}"});
        if (t.IsPunct("(") || t.IsPunct("[") || t.IsPunct("{")) {
          if (t.IsPunct("{") && depth == 0) saw_group = true;
          ++depth;
        } else if (t.IsPunct(")") || t.IsPunct("]") || t.IsPunct("}")) {
          if (depth == 0) {
            if (p_ == first) Fail("statement", {"statement"});
            break;
          }
          --depth;
          if (depth == 0 && t.IsPunct("}") && saw_group && !Peek(1).IsPunct(";") &&
              !Peek(1).IsKeyword("else") && !Peek(1).IsKeyword("while")) {
            Next();
            break;
          }
        } else if (t.IsPunct(";") && depth == 0) {
          Next();
          break;
        }
        Next();
      }
    }
    Node n;
    n.kind = NodeKind::kOpaque;
    Finish(&n, first);
    n.raw = std::string(source_->substr(n.span.start_byte,
                                        n.span.end_byte - n.span.start_byte));
    return n;
  }

  // ----------------------------------------------------------- expressions
  Node ParseExpr() {
    size_t first = p_;
    Node lhs = ParseAssign();
    while (AcceptPunct(",")) {
      Node n;
      n.kind = NodeKind::kComma;
      n.children.push_back(std::move(lhs));
      n.children.push_back(ParseAssign());
      Finish(&n, first);
      lhs = std::move(n);
    }
    return lhs;
  }

  Node ParseAssign() {
    size_t first = p_;
    Node lhs = ParseConditional();
    if (Peek().kind == TokenKind::kPunct && IsAssignOp(Peek().text)) {
      Node n;
      n.kind = NodeKind::kAssign;
      n.text = Next().text;
      n.children.push_back(std::move(lhs));
      n.children.push_back(ParseAssign());
      Finish(&n, first);
      return n;
    }
    return lhs;
  }

  Node ParseConditional() {
    size_t first = p_;
    Node c = ParseBinary(4);
    if (AcceptPunct("?")) {
      Node n;
      n.kind = NodeKind::kConditional;
      n.children.push_back(std::move(c));
      n.children.push_back(ParseExpr());
      ExpectPunct(":");
      n.children.push_back(ParseConditional());
      Finish(&n, first);
      return n;
    }
    return c;
  }

  Node ParseBinary(int min_prec) {
    size_t first = p_;
    Node lhs = ParseCast();
    while (Peek().kind == TokenKind::kPunct) {
      int prec = BinaryPrecedence(Peek().text);
      if (prec < min_prec) break;
      Node n;
      n.kind = NodeKind::kBinaryOp;
      n.text = Next().text;
      n.children.push_back(std::move(lhs));
      n.children.push_back(ParseBinary(prec + 1));
      Finish(&n, first);
      lhs = std::move(n);
    }
    return lhs;
  }

  bool IsCastAhead() const {
    if (!Peek().IsPunct("(")) return false;
    if (IsTypeStartAt(1)) return true;
    // `(T *)` with an unknown typedef name.
    if (Peek(1).kind != TokenKind::kIdentifier) return false;
    size_t i = 2;
    if (!Peek(i).IsPunct("*")) return false;
    while (Peek(i).IsPunct("*")) ++i;
    return Peek(i).IsPunct(")");
  }

  Node ParseCast() {
    size_t first = p_;
    if (IsCastAhead()) {
      Next();
      Node n;
      n.kind = NodeKind::kCast;
      if (!IsTypeStartAt(0)) typedefs_.insert(Peek().text);
      n.type = ParseSpecifiers();
      n.decl = ParseDeclarator(true);
      ExpectPunct(")");
      if (Peek().IsPunct("{")) Fail("expression (compound literals unsupported)", {"expression"});
      n.children.push_back(ParseCast());
      Finish(&n, first);
      return n;
    }
    return ParseUnary();
  }

  Node ParseUnary() {
    size_t first = p_;
    const Token& t = Peek();
    if (t.kind == TokenKind::kPunct &&
        (t.text == "++" || t.text == "--" || t.text == "&" || t.text == "*" ||
         t.text == "+" || t.text == "-" || t.text == "!" || t.text == "~")) {
      Node n;
      n.kind = NodeKind::kUnaryOp;
      n.text = Next().text;
      n.children.push_back(n.text == "++" || n.text == "--" ? ParseUnary() : ParseCast());
      Finish(&n, first);
      return n;
    }
    if (AcceptKeyword("sizeof")) {
      if (Peek().IsPunct("(") && IsTypeStartAt(1)) {
        Next();
        Node n;
        n.kind = NodeKind::kSizeofType;
        n.type = ParseSpecifiers();
        n.decl = ParseDeclarator(true);
        ExpectPunct(")");
        Finish(&n, first);
        return n;
      }
      Node n;
      n.kind = NodeKind::kSizeofExpr;
      n.children.push_back(ParseUnary());
      Finish(&n, first);
      return n;
    }
    return ParsePostfix();
  }

  Node ParsePostfix() {
    size_t first = p_;
    Node e = ParsePrimary();
    while (true) {
      if (AcceptPunct("[")) {
        Node n;
        n.kind = NodeKind::kIndex;
        n.children.push_back(std::move(e));
        n.children.push_back(ParseExpr());
        ExpectPunct("]");
        Finish(&n, first);
        e = std::move(n);
      } else if (AcceptPunct("(")) {
        Node n;
        n.kind = NodeKind::kCall;
        if (e.kind == NodeKind::kIdentifier) n.text = e.text;
        n.children.push_back(std::move(e));
        if (!AcceptPunct(")")) {
          do {
            n.children.push_back(ParseAssign());
          } while (AcceptPunct(","));
          ExpectPunct(")");
        }
        Finish(&n, first);
        e = std::move(n);
      } else if (Peek().IsPunct(".") || Peek().IsPunct("->")) {
        bool arrow = Next().text == "->";
        Node n;
        n.kind = NodeKind::kMember;
        if (arrow) n.flags |= kFlagArrow;
        n.text = ExpectIdentifier();
        n.children.push_back(std::move(e));
        Finish(&n, first);
        e = std::move(n);
      } else if (Peek().IsPunct("++") || Peek().IsPunct("--")) {
        Node n;
        n.kind = NodeKind::kPostfixOp;
        n.text = Next().text;
        n.children.push_back(std::move(e));
        Finish(&n, first);
        e = std::move(n);
      } else {
        return e;
      }
    }
  }

  Node ParsePrimary() {
    size_t first = p_;
    const Token& t = Peek();
    switch (t.kind) {
      case TokenKind::kIdentifier: {
        Node n = Make(NodeKind::kIdentifier, first);
        n.text = Next().text;
        return n;
      }
      case TokenKind::kInt:
      case TokenKind::kChar: {
        Node n = Make(NodeKind::kIntLiteral, first);
        n.text = t.text;
        n.int_value = t.int_value;
        if (t.from_macro) n.flags |= kFlagFromMacro;
        Next();
        return n;
      }
      case TokenKind::kString: {
        Node n;
        n.kind = NodeKind::kStringLiteral;
        n.raw = Next().text;
        while (Peek().kind == TokenKind::kString) n.raw += " " + Next().text;
        Finish(&n, first);
        return n;
      }
      default:
        break;
    }
    if (AcceptPunct("(")) {
      Node inner = ParseExpr();
      ExpectPunct(")");
      return inner;
    }
    Fail("expression", {"identifier", "literal", "("});
  }

 public:
  const std::string_view* source_ = nullptr;

 private:
  std::vector<Token> toks_;
  size_t p_ = 0;
  std::string file_id_;
  std::set<std::string> typedefs_;
};

bool ValidUtf8(std::string_view s, size_t* bad_offset) {
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3
                 : (c >> 3) == 0x1e ? 4 : 0;
    if (len == 0 || i + len > s.size()) {
      *bad_offset = i;
      return false;
    }
    for (size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) {
        *bad_offset = i;
        return false;
      }
    }
    i += len;
  }
  return true;
}

}  // namespace

bool IsWellKnownTypedef(std::string_view name) {
  return WellKnownTypedefs().count(name) > 0;
}

TranslationUnit ParseUnit(std::string_view source, std::string file_id,
                          const ParseOptions& options) {
  if (source.size() > options.max_bytes) {
    throw ParseError("input exceeds " + std::to_string(options.max_bytes) + " bytes",
                     1, 1);
  }
  size_t bad = 0;
  if (!ValidUtf8(source, &bad)) {
    std::uint32_t line = 1;
    std::uint32_t col = 1;
    for (size_t i = 0; i < bad; ++i) {
      if (source[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("invalid UTF-8", line, col);
  }
  TranslationUnit unit;
  unit.file_id = file_id;
  unit.source_text = std::string(source);
  std::string_view text = unit.source_text;
  Parser parser(Tokenize(text), std::move(file_id));
  parser.source_ = &text;
  unit.items = parser.ParseItems();
  return unit;
}

Node ParseExpression(std::string_view text) {
  std::string_view view = text;
  Parser parser(Tokenize(view), "<expr>");
  parser.source_ = &view;
  return parser.ParseStandaloneExpression();
}

const Node* FindFunction(const TranslationUnit& unit, std::string_view name) {
  const Node* found = nullptr;
  for (const Node& item : unit.items) {
    if (item.kind != NodeKind::kFunctionDef || item.Has(kFlagPrototype)) continue;
    if (item.text != name) continue;
    if (found != nullptr) {
      throw DuplicateDefinition("function '" + std::string(name) +
                                "' is defined more than once");
    }
    found = &item;
  }
  return found;
}

}  // namespace symtee::cparse
