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


#include "symtee/slicer/slicer.h"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "symtee/cparse/parser.h"

namespace symtee::slicer {

using cparse::NodeKind;

namespace {

// Top-level declarations of a unit, by name.
struct UnitIndex {
  std::map<std::string, std::uint64_t> enumerators;
  std::map<std::string, const Node*> enumerator_owner;  // item declaring it
  std::map<std::string, const Node*> typedefs;
  std::map<std::string, const Node*> records;  // by tag
  std::map<std::string, const Node*> enums;    // by tag
  std::map<std::string, const Node*> globals;
  std::map<std::string, const Node*> defines;
  std::map<std::string, const Node*> functions;

  explicit UnitIndex(const TranslationUnit& unit) {
    for (const Node& item : unit.items) Add(item, item);
  }

 private:
  void AddBody(const Node& body, const Node& owner) {
    if (body.kind == NodeKind::kEnumDecl) {
      if (!body.text.empty() && body.Has(cparse::kFlagHasBody)) enums[body.text] = &owner;
      for (const Node& e : body.children) {
        enumerators[e.text] = e.int_value;
        enumerator_owner[e.text] = &owner;
      }
    } else if (body.kind == NodeKind::kRecordDecl) {
      if (!body.text.empty() && body.Has(cparse::kFlagHasBody)) records[body.text] = &owner;
    }
  }

  void Add(const Node& item, const Node& owner) {
    for (const Node& b : item.type.body) AddBody(b, owner);
    switch (item.kind) {
      case NodeKind::kEnumDecl:
      case NodeKind::kRecordDecl:
        AddBody(item, owner);
        break;
      case NodeKind::kTypedef:
        typedefs[item.text] = &owner;
        break;
      case NodeKind::kVarDecl:
        globals[item.text] = &owner;
        break;
      case NodeKind::kDefine:
        defines[item.text] = &owner;
        break;
      case NodeKind::kFunctionDef:
        if (!item.Has(cparse::kFlagPrototype)) functions[item.text] = &owner;
        break;
      default:
        break;
    }
  }
};

const Node& StripCasts(const Node& e) {
  const Node* n = &e;
  while (n->kind == NodeKind::kCast) n = &n->children[0];
  return *n;
}

// Declaration of local `name` visible at byte offset `before`: the closest
// preceding VarDecl in the function body.
const Node* FindLocalDecl(const Node& fn, const std::string& name,
                          std::uint32_t before) {
  const Node* found = nullptr;
  if (const Node* body = fn.Body()) {
    cparse::Walk(*body, [&](const Node& n) {
      if (n.kind == NodeKind::kVarDecl && n.text == name &&
          n.span.start_byte < before) {
        found = &n;
      }
      return true;
    });
  }
  return found;
}

int FindParam(const Node& fn, const std::string& name) {
  std::vector<const Node*> params = fn.Params();
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i]->text == name) return static_cast<int>(i);
  }
  return -1;
}

class Analyzer {
 public:
  Analyzer(const TranslationUnit& unit, const Node& fn)
      : unit_(unit), fn_(fn), index_(unit) {}

  const UnitIndex& index() const { return index_; }

  // Resolves a typedef chain down to a scalar or record base.
  std::string ResolveBase(const std::string& base, bool* is_pointer,
                          bool* has_dims) const {
    std::string cur = base;
    for (int guard = 0; guard < 16; ++guard) {
      auto it = index_.typedefs.find(cur);
      if (it == index_.typedefs.end()) break;
      const Node& td = *it->second;
      const Node* entry = nullptr;
      // A typedef item may declare several names; find ours.
      for (const Node& item : unit_.items) {
        if (item.kind == NodeKind::kTypedef && item.text == cur) entry = &item;
      }
      if (entry == nullptr) entry = &td;
      if (entry->decl.pointer_depth() > 0 || entry->decl.fn_ptr) *is_pointer = true;
      if (!entry->decl.dims.empty()) *has_dims = true;
      if (!entry->type.body.empty()) {
        const Node& body = entry->type.body.front();
        return body.kind == NodeKind::kEnumDecl ? "int" : "struct";
      }
      cur = entry->type.base;
    }
    return cur;
  }

  std::optional<std::uint64_t> SizeOfDecl(const cparse::TypeSpec& type,
                                          const cparse::Declarator& decl) const {
    if (decl.fn_ptr || decl.pointer_depth() > 0) return 8;
    bool ptr = false;
    bool dims = false;
    std::string base = ResolveBase(type.base, &ptr, &dims);
    if (ptr) return 8;
    if (dims) return std::nullopt;
    if (base.rfind("struct", 0) == 0 || base.rfind("union", 0) == 0 || base == "void") {
      return std::nullopt;
    }
    if (base.rfind("enum", 0) == 0) return 4;
    return cparse::ScalarByteSize(base);
  }

  // Byte capacity of a declared array, if statically evident.
  std::optional<std::uint64_t> ArrayBytes(const Node& decl) const {
    if (decl.decl.dims.empty() || decl.decl.fn_ptr) return std::nullopt;
    std::uint64_t count = 1;
    for (const Node& dim : decl.decl.dims) {
      if (dim.kind == NodeKind::kEmpty) return std::nullopt;
      auto v = EvalConst(dim, true);
      if (!v || *v == 0) return std::nullopt;
      count *= *v;
    }
    cparse::Declarator elem = decl.decl;
    elem.dims.clear();
    auto size = SizeOfDecl(decl.type, elem);
    if (!size) return std::nullopt;
    return count * *size;
  }

  const Node* LookupArrayDecl(const std::string& name, std::uint32_t before) const {
    if (const Node* local = FindLocalDecl(fn_, name, before)) return local;
    if (FindParam(fn_, name) >= 0) return nullptr;
    for (const Node& item : unit_.items) {
      if (item.kind == NodeKind::kVarDecl && item.text == name) return &item;
    }
    return nullptr;
  }

  std::optional<std::uint64_t> SizeOfExpr(const Node& e, std::uint32_t before) const {
    const Node& s = StripCasts(e);
    if (s.kind != NodeKind::kIdentifier) return std::nullopt;
    const Node* decl = LookupArrayDecl(s.text, before);
    if (decl == nullptr) return std::nullopt;
    if (!decl->decl.dims.empty()) return ArrayBytes(*decl);
    return SizeOfDecl(decl->type, decl->decl);
  }

  // Integer constant expressions. With `arithmetic` false only literals,
  // enumerators, sizeof and casts thereof are accepted.
  std::optional<std::uint64_t> EvalConst(const Node& e, bool arithmetic,
                                         std::uint32_t before = UINT32_MAX) const {
    switch (e.kind) {
      case NodeKind::kIntLiteral:
        return e.int_value;
      case NodeKind::kIdentifier: {
        auto it = index_.enumerators.find(e.text);
        if (it != index_.enumerators.end()) {
          if (FindLocalDecl(fn_, e.text, before) || FindParam(fn_, e.text) >= 0) {
            return std::nullopt;
          }
          return it->second;
        }
        // Local enums.
        std::optional<std::uint64_t> local;
        if (const Node* body = fn_.Body()) {
          cparse::Walk(*body, [&](const Node& n) {
            if (n.kind == NodeKind::kEnumerator && n.text == e.text) local = n.int_value;
            return true;
          });
        }
        return local;
      }
      case NodeKind::kCast: {
        auto v = EvalConst(e.children[0], arithmetic, before);
        if (!v) return std::nullopt;
        auto size = SizeOfDecl(e.type, e.decl);
        if (size && *size < 8) *v &= (std::uint64_t{1} << (*size * 8)) - 1;
        return v;
      }
      case NodeKind::kSizeofType:
        return SizeOfDecl(e.type, e.decl);
      case NodeKind::kSizeofExpr:
        return SizeOfExpr(e.children[0], before);
      case NodeKind::kBinaryOp: {
        if (!arithmetic) return std::nullopt;
        auto a = EvalConst(e.children[0], true, before);
        auto b = EvalConst(e.children[1], true, before);
        if (!a || !b) return std::nullopt;
        const std::string& op = e.text;
        if (op == "+") return *a + *b;
        if (op == "-") return *a - *b;
        if (op == "*") return *a * *b;
        if (op == "/" && *b != 0) return *a / *b;
        if (op == "%" && *b != 0) return *a % *b;
        if (op == "<<" && *b < 64) return *a << *b;
        if (op == ">>" && *b < 64) return *a >> *b;
        if (op == "|") return *a | *b;
        if (op == "&") return *a & *b;
        if (op == "^") return *a ^ *b;
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  // ------------------------------------------------------------- tracing
  struct Trace {
    enum class Kind { kConstant, kParam, kOpaque } kind = Kind::kOpaque;
    std::uint64_t value = 0;
    bool arithmetic = false;
    int param_position = -1;
    std::string param_name;
    std::optional<std::uint64_t> subscript;
    std::vector<std::string> field_path;
    const Node* root = nullptr;
    std::vector<AssignStep> chain;
    std::vector<std::string> vars;
  };

  static Trace Opaque() { return Trace{}; }

  // Member/index chain rooted at a parameter.
  bool TraceParamPath(const Node& e, Trace* out) const {
    std::vector<const Node*> path;
    const Node* n = &e;
    while (n->kind == NodeKind::kMember || n->kind == NodeKind::kIndex ||
           (n->kind == NodeKind::kUnaryOp && n->text == "*")) {
      path.push_back(n);
      if (n->children.empty()) return false;
      n = &n->children[0];
    }
    if (n->kind != NodeKind::kIdentifier) return false;
    int pos = FindParam(fn_, n->text);
    if (pos < 0 || FindLocalDecl(fn_, n->text, e.span.start_byte)) return false;
    std::reverse(path.begin(), path.end());
    out->kind = Trace::Kind::kParam;
    out->param_position = pos;
    out->param_name = n->text;
    out->root = &e;
    for (size_t i = 0; i < path.size(); ++i) {
      const Node* p = path[i];
      if (p->kind == NodeKind::kMember) {
        out->field_path.push_back(p->text);
      } else if (p->kind == NodeKind::kIndex) {
        auto idx = EvalConst(p->children[1], true);
        if (!idx) return false;
        if (i == 0) {
          out->subscript = *idx;
        } else {
          return false;  // indexing into a field is not modeled
        }
      }
    }
    return true;
  }

  // Definitions of local `name` that precede `before`. Returns false when the
  // variable is defined in a way that cannot be followed.
  bool LocalDefinitions(const std::string& name, std::uint32_t before,
                        std::vector<std::pair<const Node*, const Node*>>* defs) const {
    const Node* body = fn_.Body();
    if (body == nullptr) return false;
    bool ok = true;
    cparse::Walk(*body, [&](const Node& n) {
      switch (n.kind) {
        case NodeKind::kVarDecl:
          if (n.text == name && n.Init() && n.span.start_byte < before) {
            defs->push_back({&n, n.Init()});
          }
          break;
        case NodeKind::kAssign:
          if (StripCasts(n.children[0]).kind == NodeKind::kIdentifier &&
              n.children[0].text == name && n.span.start_byte < before) {
            if (n.text != "=") ok = false;
            defs->push_back({&n, &n.children[1]});
          }
          break;
        case NodeKind::kUnaryOp:
          if ((n.text == "&" || n.text == "++" || n.text == "--") &&
              n.children[0].kind == NodeKind::kIdentifier && n.children[0].text == name) {
            ok = false;
          }
          break;
        case NodeKind::kPostfixOp:
          if (n.children[0].kind == NodeKind::kIdentifier && n.children[0].text == name) {
            ok = false;
          }
          break;
        case NodeKind::kOpaque:
          if (MentionsToken(n.raw, name)) ok = false;
          break;
        default:
          break;
      }
      return true;
    });
    return ok;
  }

  static bool MentionsToken(const std::string& text, const std::string& name) {
    size_t pos = 0;
    auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    while ((pos = text.find(name, pos)) != std::string::npos) {
      bool left = pos == 0 || !ident(text[pos - 1]);
      bool right = pos + name.size() >= text.size() || !ident(text[pos + name.size()]);
      if (left && right) return true;
      pos += name.size();
    }
    return false;
  }

  Trace TraceExpr(const Node& e, std::uint32_t before, int depth) const {
    if (depth > 32) return Opaque();
    if (auto v = EvalConst(e, true, before)) {
      Trace t;
      t.kind = Trace::Kind::kConstant;
      t.value = *v;
      return t;
    }
    switch (e.kind) {
      case NodeKind::kCast:
        return TraceExpr(e.children[0], before, depth + 1);
      case NodeKind::kMember:
      case NodeKind::kIndex: {
        Trace t;
        if (TraceParamPath(e, &t)) return t;
        return Opaque();
      }
      case NodeKind::kIdentifier: {
        if (const Node* decl = FindLocalDecl(fn_, e.text, before)) {
          std::vector<std::pair<const Node*, const Node*>> defs;
          if (!LocalDefinitions(e.text, before, &defs) || defs.size() != 1) return Opaque();
          if (!decl->decl.dims.empty()) return Opaque();
          const Node* rhs = defs[0].second;
          if (rhs->kind == NodeKind::kInitList) return Opaque();
          Trace inner = TraceExpr(*rhs, defs[0].first->span.start_byte, depth + 1);
          if (inner.kind == Trace::Kind::kOpaque) return inner;
          AssignStep step;
          step.name = e.text;
          step.type_base = decl->type.base;
          step.is_pointer = decl->decl.pointer_depth() > 0;
          step.rhs = rhs;
          step.span = defs[0].first->span;
          inner.chain.push_back(step);
          inner.vars.push_back(e.text);
          return inner;
        }
        int pos = FindParam(fn_, e.text);
        if (pos >= 0) {
          const Node* param = fn_.Params()[pos];
          if (param->decl.pointer_depth() > 0 || !param->decl.dims.empty()) return Opaque();
          Trace t;
          t.kind = Trace::Kind::kParam;
          t.param_position = pos;
          t.param_name = e.text;
          t.root = &e;
          return t;
        }
        return Opaque();
      }
      case NodeKind::kBinaryOp: {
        const std::string& op = e.text;
        if (op != "+" && op != "-" && op != "*" && op != "<<") return Opaque();
        Trace a = TraceExpr(e.children[0], before, depth + 1);
        Trace b = TraceExpr(e.children[1], before, depth + 1);
        if (a.kind == Trace::Kind::kOpaque || b.kind == Trace::Kind::kOpaque) return Opaque();
        if (a.kind == Trace::Kind::kParam && b.kind == Trace::Kind::kParam) return Opaque();
        if ((op == "*" || op == "<<") && b.kind != Trace::Kind::kConstant) return Opaque();
        if (op == "-" && b.kind == Trace::Kind::kParam) return Opaque();
        Trace& var = a.kind == Trace::Kind::kParam ? a : b;
        Trace& other = a.kind == Trace::Kind::kParam ? b : a;
        if (var.kind == Trace::Kind::kConstant) {
          // Constant-only chains through locals.
          Trace t = a;
          t.chain.insert(t.chain.end(), b.chain.begin(), b.chain.end());
          t.vars.insert(t.vars.end(), b.vars.begin(), b.vars.end());
          t.arithmetic = true;
          return t;
        }
        Trace t = var;
        t.chain.insert(t.chain.begin(), other.chain.begin(), other.chain.end());
        t.vars.insert(t.vars.end(), other.vars.begin(), other.vars.end());
        t.arithmetic = true;
        return t;
      }
      default:
        return Opaque();
    }
  }

  // Names and printed expressions whose value equals `e`.
  void CollectAliases(const Node& e, std::uint32_t before, int depth,
                      std::vector<std::string>* out,
                      std::vector<std::pair<std::string, std::uint32_t>>* defined_at) const {
    if (depth > 32) return;
    const Node& s = StripCasts(e);
    out->push_back(cparse::PrintExpr(s));
    if (s.kind != NodeKind::kIdentifier) return;
    if (!FindLocalDecl(fn_, s.text, before)) return;
    std::vector<std::pair<const Node*, const Node*>> defs;
    if (!LocalDefinitions(s.text, before, &defs) || defs.size() != 1) return;
    defined_at->push_back({s.text, defs[0].first->span.end_byte});
    const Node& rhs = StripCasts(*defs[0].second);
    if (rhs.kind == NodeKind::kIdentifier || rhs.kind == NodeKind::kMember ||
        rhs.kind == NodeKind::kIndex) {
      CollectAliases(rhs, defs[0].first->span.start_byte, depth + 1, out, defined_at);
    }
  }

 private:
  const TranslationUnit& unit_;
  const Node& fn_;
  UnitIndex index_;
};

// ------------------------------------------------------------------- guards
enum class CmpDir { kLt, kLe, kGt, kGe, kEq, kNe };

std::optional<CmpDir> ParseCmp(const std::string& op) {
  if (op == "<") return CmpDir::kLt;
  if (op == "<=") return CmpDir::kLe;
  if (op == ">") return CmpDir::kGt;
  if (op == ">=") return CmpDir::kGe;
  if (op == "==") return CmpDir::kEq;
  if (op == "!=") return CmpDir::kNe;
  return std::nullopt;
}

CmpDir Flip(CmpDir d) {
  switch (d) {
    case CmpDir::kLt: return CmpDir::kGt;
    case CmpDir::kLe: return CmpDir::kGe;
    case CmpDir::kGt: return CmpDir::kLt;
    case CmpDir::kGe: return CmpDir::kLe;
    default: return d;
  }
}

struct GuardContext {
  const Analyzer* analyzer;
  const SinkCandidate* cand;
  std::vector<std::string> aliases;
  std::vector<std::pair<std::string, std::uint32_t>> defined_at;
  std::string dest_text;
};

bool IsAliasAt(const GuardContext& ctx, const Node& side, std::uint32_t at) {
  std::string text = cparse::PrintExpr(StripCasts(side));
  if (std::find(ctx.aliases.begin(), ctx.aliases.end(), text) == ctx.aliases.end()) {
    return false;
  }
  for (const auto& [name, end] : ctx.defined_at) {
    if (name == text && at < end) return false;
  }
  return true;
}

// Matches `alias op constant` (either orientation). Returns the direction
// with the alias on the left.
bool MatchComparison(const GuardContext& ctx, const Node& cmp, std::uint32_t at,
                     CmpDir* dir, std::uint64_t* bound, bool* against_capacity) {
  if (cmp.kind != NodeKind::kBinaryOp) return false;
  auto d = ParseCmp(cmp.text);
  if (!d) return false;
  const Node& lhs = cmp.children[0];
  const Node& rhs = cmp.children[1];
  auto constant = [&](const Node& n, bool* is_cap) -> std::optional<std::uint64_t> {
    const Node& s = StripCasts(n);
    if (s.kind == NodeKind::kSizeofExpr &&
        cparse::PrintExpr(StripCasts(s.children[0])) == ctx.dest_text) {
      *is_cap = true;
    }
    return ctx.analyzer->EvalConst(n, false, at);
  };
  bool is_cap = false;
  if (IsAliasAt(ctx, lhs, at)) {
    auto c = constant(rhs, &is_cap);
    if (!c) return false;
    *dir = *d;
    *bound = *c;
  } else if (IsAliasAt(ctx, rhs, at)) {
    auto c = constant(lhs, &is_cap);
    if (!c) return false;
    *dir = Flip(*d);
    *bound = *c;
  } else {
    return false;
  }
  *against_capacity = is_cap;
  return true;
}

bool BoundFits(const SinkCandidate& cand, std::uint64_t bound, bool exclusive) {
  if (!cand.capacity.fixed()) return true;
  std::uint64_t cap = cand.capacity.bytes;
  return exclusive ? bound <= cap + 1 : bound <= cap;
}

// Does `cond` being true imply the length is out of range (so an early exit on
// it rejects all overlong lengths)?
bool Rejects(const GuardContext& ctx, const Node& cond, std::uint32_t at, GuardInfo* info);
// Does `cond` being true imply the length fits?
bool Accepts(const GuardContext& ctx, const Node& cond, std::uint32_t at, GuardInfo* info);

void Record(const SinkCandidate& cand, std::uint64_t bound, bool against_capacity,
            GuardInfo* info) {
  info->bound = bound;
  info->compared_against =
      against_capacity || (cand.capacity.fixed() && bound == cand.capacity.bytes)
          ? GuardInfo::Against::kCapacity
          : GuardInfo::Against::kConstant;
}

bool Rejects(const GuardContext& ctx, const Node& cond, std::uint32_t at, GuardInfo* info) {
  if (cond.kind == NodeKind::kBinaryOp && cond.text == "||") {
    return Rejects(ctx, cond.children[0], at, info) || Rejects(ctx, cond.children[1], at, info);
  }
  if (cond.kind == NodeKind::kUnaryOp && cond.text == "!") {
    return Accepts(ctx, cond.children[0], at, info);
  }
  CmpDir dir;
  std::uint64_t bound = 0;
  bool cap = false;
  if (!MatchComparison(ctx, cond, at, &dir, &bound, &cap)) return false;
  bool ok = false;
  switch (dir) {
    case CmpDir::kGt: ok = BoundFits(*ctx.cand, bound, false); break;
    case CmpDir::kGe: ok = BoundFits(*ctx.cand, bound, true); break;
    case CmpDir::kNe: ok = BoundFits(*ctx.cand, bound, false); break;
    default: ok = false;
  }
  if (ok) Record(*ctx.cand, bound, cap, info);
  return ok;
}

bool Accepts(const GuardContext& ctx, const Node& cond, std::uint32_t at, GuardInfo* info) {
  if (cond.kind == NodeKind::kBinaryOp && cond.text == "&&") {
    return Accepts(ctx, cond.children[0], at, info) || Accepts(ctx, cond.children[1], at, info);
  }
  if (cond.kind == NodeKind::kUnaryOp && cond.text == "!") {
    return Rejects(ctx, cond.children[0], at, info);
  }
  CmpDir dir;
  std::uint64_t bound = 0;
  bool cap = false;
  if (!MatchComparison(ctx, cond, at, &dir, &bound, &cap)) return false;
  bool ok = false;
  switch (dir) {
    case CmpDir::kLe: ok = BoundFits(*ctx.cand, bound, false); break;
    case CmpDir::kLt: ok = BoundFits(*ctx.cand, bound, true); break;
    case CmpDir::kEq: ok = BoundFits(*ctx.cand, bound, false); break;
    default: ok = false;
  }
  if (ok) Record(*ctx.cand, bound, cap, info);
  return ok;
}

bool FindPath(const Node& node, const Node* target, std::vector<const Node*>* path) {
  path->push_back(&node);
  if (&node == target) return true;
  if (node.span.Contains(target->span)) {
    for (const Node& child : node.children) {
      if (FindPath(child, target, path)) return true;
    }
  }
  path->pop_back();
  return false;
}

bool IsAbortCall(const Node& stmt) {
  if (stmt.kind != NodeKind::kExprStmt) return false;
  const Node& e = stmt.children[0];
  return e.kind == NodeKind::kCall &&
         (e.text == "TEE_Panic" || e.text == "abort" || e.text == "exit" ||
          e.text == "panic");
}

bool IsTeeConstantName(std::string_view name) {
  if (name.rfind("TEE_", 0) != 0 || name.size() <= 4) return false;
  for (char c : name) {
    if (!(std::isupper(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string Slice::Text() const {
  std::string out;
  for (const std::string& d : required_decls) out += d + "\n";
  if (!required_decls.empty()) out += "\n";
  return out + function_text + "\n";
}

std::vector<SinkSpec> DefaultSinkSpecs() {
  return {{"TEE_MemMove", 0, 1, 2}, {"memcpy", 0, 1, 2}, {"memmove", 0, 1, 2}};
}

std::vector<SinkSpec> LoadSinkSpecs(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sink config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("sinks") || !doc["sinks"].is_array()) {
    throw ConfigError("sink config needs a \"sinks\" array");
  }
  std::vector<SinkSpec> specs;
  for (const auto& entry : doc["sinks"]) {
    SinkSpec s;
    try {
      s.api_name = entry.at("name").get<std::string>();
      s.dest_arg = entry.at("dest").get<int>();
      s.src_arg = entry.at("src").get<int>();
      s.len_arg = entry.at("len").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed sink entry: ") + e.what());
    }
    if (s.api_name.empty()) throw ConfigError("sink entry has an empty name");
    if (s.dest_arg < 0 || s.src_arg < 0 || s.len_arg < 0 || s.dest_arg == s.src_arg ||
        s.dest_arg == s.len_arg || s.src_arg == s.len_arg) {
      throw ConfigError("sink '" + s.api_name + "' needs distinct non-negative indices");
    }
    specs.push_back(std::move(s));
  }
  if (specs.empty()) throw ConfigError("sink config lists no sinks");
  return specs;
}

bool IsKnownExternal(std::string_view name) {
  return name == "NULL" || name == "true" || name == "false" || IsTeeConstantName(name);
}

std::vector<SinkCandidate> FindSinkCalls(const TranslationUnit& unit,
                                         const std::vector<SinkSpec>& specs) {
  std::vector<SinkCandidate> out;
  for (const Node& item : unit.items) {
    const Node* body = item.Body();
    if (item.kind != NodeKind::kFunctionDef || body == nullptr) continue;
    cparse::Walk(*body, [&](const Node& n) {
      if (n.kind != NodeKind::kCall || n.text.empty()) return true;
      for (const SinkSpec& spec : specs) {
        if (spec.api_name != n.text) continue;
        int arity = static_cast<int>(n.children.size()) - 1;
        if (std::max({spec.dest_arg, spec.src_arg, spec.len_arg}) >= arity) continue;
        SinkCandidate c;
        c.file_id = unit.file_id;
        c.function_name = item.text;
        c.function = &item;
        c.call = &n;
        c.call_span = n.span;
        c.spec = spec;
        out.push_back(std::move(c));
        break;
      }
      return true;
    });
  }
  std::stable_sort(out.begin(), out.end(), [](const SinkCandidate& a, const SinkCandidate& b) {
    return a.call_span.start_byte < b.call_span.start_byte;
  });
  return out;
}

CapacityInfo ResolveDestCapacity(const SinkCandidate& cand, const TranslationUnit& unit) {
  CapacityInfo info;
  Analyzer an(unit, *cand.function);
  const Node* dest = &StripCasts(cand.call->children[1 + cand.spec.dest_arg]);
  if (dest->kind == NodeKind::kUnaryOp && dest->text == "&") {
    const Node& inner = StripCasts(dest->children[0]);
    if (inner.kind == NodeKind::kIndex) {
      auto idx = an.EvalConst(inner.children[1], true);
      if (!idx || *idx != 0) return info;
      dest = &StripCasts(inner.children[0]);
    } else {
      dest = &inner;
    }
  }
  if (dest->kind != NodeKind::kIdentifier) return info;
  const Node* decl = an.LookupArrayDecl(dest->text, cand.call_span.start_byte);
  if (decl == nullptr || decl->decl.dims.empty()) return info;
  auto bytes = an.ArrayBytes(*decl);
  if (!bytes || *bytes == 0) return info;
  info.kind = CapacityInfo::Kind::kFixedArray;
  info.bytes = *bytes;
  info.decl_span = decl->span;
  info.dest_name = dest->text;
  return info;
}

LengthOrigin TraceLengthSource(const SinkCandidate& cand, const TranslationUnit& unit) {
  Analyzer an(unit, *cand.function);
  const Node& len = cand.call->children[1 + cand.spec.len_arg];
  LengthOrigin out;
  out.expr = &len;
  out.expr_span = len.span;
  out.expr_text = cparse::PrintExpr(len);
  Analyzer::Trace t = an.TraceExpr(len, cand.call_span.start_byte, 0);
  switch (t.kind) {
    case Analyzer::Trace::Kind::kOpaque:
      out.kind = LengthOrigin::Kind::kOpaque;
      break;
    case Analyzer::Trace::Kind::kConstant:
      out.kind = t.chain.empty() ? LengthOrigin::Kind::kConstant
                                 : LengthOrigin::Kind::kLocalDerived;
      out.value = t.value;
      break;
    case Analyzer::Trace::Kind::kParam:
      out.kind = t.chain.empty() && !t.arithmetic ? LengthOrigin::Kind::kParamField
                                                  : LengthOrigin::Kind::kLocalDerived;
      out.has_param_root = true;
      out.param_position = t.param_position;
      out.param_name = t.param_name;
      out.subscript = t.subscript;
      out.field_path = t.field_path;
      out.root = t.root;
      out.root_text = cparse::PrintExpr(*t.root);
      break;
  }
  out.chain = t.chain;
  out.chain_vars = t.vars;
  std::vector<std::pair<std::string, std::uint32_t>> defined_at;
  an.CollectAliases(len, cand.call_span.start_byte, 0, &out.aliases, &defined_at);
  if (!out.root_text.empty() &&
      std::find(out.aliases.begin(), out.aliases.end(), out.root_text) == out.aliases.end() &&
      !t.arithmetic) {
    out.aliases.push_back(out.root_text);
  }
  return out;
}

std::vector<const Node*> AncestorsOf(const Node& function, const Node& target) {
  std::vector<const Node*> path;
  const Node* body = function.Body();
  if (body == nullptr || !FindPath(*body, &target, &path)) return {};
  return path;
}

bool IsEarlyExit(const Node& stmt) {
  switch (stmt.kind) {
    case NodeKind::kReturn:
      return true;
    case NodeKind::kExprStmt:
      return IsAbortCall(stmt);
    case NodeKind::kBlock:
      for (const Node& c : stmt.children) {
        if (IsEarlyExit(c)) return true;
      }
      return false;
    case NodeKind::kIf:
      return stmt.children.size() == 3 && IsEarlyExit(stmt.children[1]) &&
             IsEarlyExit(stmt.children[2]);
    default:
      return false;
  }
}

bool MentionsAny(const Node& expr, const std::vector<std::string>& names) {
  bool found = false;
  cparse::Walk(expr, [&](const Node& n) {
    if (found) return false;
    if (n.kind == NodeKind::kIdentifier &&
        std::find(names.begin(), names.end(), n.text) != names.end()) {
      found = true;
    } else if (n.kind == NodeKind::kMember || n.kind == NodeKind::kIndex) {
      if (std::find(names.begin(), names.end(), cparse::PrintExpr(n)) != names.end()) {
        found = true;
      }
    }
    return !found;
  });
  return found;
}

GuardInfo HasDominatingGuard(const SinkCandidate& cand, const TranslationUnit& unit) {
  GuardInfo info;
  Analyzer an(unit, *cand.function);
  GuardContext ctx;
  ctx.analyzer = &an;
  ctx.cand = &cand;
  const Node& dest = StripCasts(cand.call->children[1 + cand.spec.dest_arg]);
  ctx.dest_text = cand.capacity.dest_name.empty() ? cparse::PrintExpr(dest)
                                                  : cand.capacity.dest_name;
  const Node& len = cand.call->children[1 + cand.spec.len_arg];
  an.CollectAliases(len, cand.call_span.start_byte, 0, &ctx.aliases, &ctx.defined_at);
  if (!cand.length.root_text.empty() && cand.length.kind == LengthOrigin::Kind::kParamField) {
    ctx.aliases.push_back(cand.length.root_text);
  }
  std::vector<const Node*> path = AncestorsOf(*cand.function, *cand.call);
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const Node& parent = *path[i];
    const Node& child = *path[i + 1];
    if (parent.kind == NodeKind::kBlock) {
      for (const Node& sib : parent.children) {
        if (&sib == &child) break;
        if (sib.kind != NodeKind::kIf) continue;
        std::uint32_t at = sib.span.start_byte;
        const Node& cond = sib.children[0];
        if (IsEarlyExit(sib.children[1]) && Rejects(ctx, cond, at, &info)) {
          info.status = GuardInfo::Status::kGuarded;
          info.guard_span = sib.span;
          return info;
        }
        if (sib.children.size() == 3 && IsEarlyExit(sib.children[2]) &&
            Accepts(ctx, cond, at, &info)) {
          info.status = GuardInfo::Status::kGuarded;
          info.guard_span = sib.span;
          return info;
        }
      }
    } else if (parent.kind == NodeKind::kIf && &child != &parent.children[0]) {
      std::uint32_t at = parent.span.start_byte;
      bool in_then = &child == &parent.children[1];
      bool ok = in_then ? Accepts(ctx, parent.children[0], at, &info)
                        : Rejects(ctx, parent.children[0], at, &info);
      if (ok) {
        info.status = GuardInfo::Status::kGuarded;
        info.guard_span = parent.span;
        return info;
      }
    }
  }
  info = GuardInfo{};
  return info;
}

namespace {

// Collects names a node depends on: identifiers, type names, record tags and
// macro names.
void CollectNames(const Node& root, std::set<std::string>* idents,
                  std::set<std::string>* types, std::set<std::string>* callees) {
  auto add_type = [&](const cparse::TypeSpec& t) {
    if (t.body.empty() && !t.base.empty()) types->insert(t.base);
  };
  cparse::Walk(root, [&](const Node& n) {
    add_type(n.type);
    for (const Node& p : n.decl.fn_params) CollectNames(p, idents, types, callees);
    switch (n.kind) {
      case NodeKind::kIdentifier:
        idents->insert(n.text);
        break;
      case NodeKind::kIntLiteral:
        if (n.Has(cparse::kFlagFromMacro)) idents->insert(n.text);
        break;
      case NodeKind::kCall:
        if (!n.text.empty()) callees->insert(n.text);
        break;
      default:
        break;
    }
    return true;
  });
}

bool IsBuiltinTypeWord(const std::string& base) {
  static const std::set<std::string> kWords = {
      "void", "char", "short", "int", "long", "float", "double", "signed",
      "unsigned", "_Bool"};
  size_t i = 0;
  while (i < base.size()) {
    size_t j = base.find(' ', i);
    if (j == std::string::npos) j = base.size();
    if (!kWords.count(base.substr(i, j - i))) return false;
    i = j + 1;
  }
  return true;
}

}  // namespace

Slice ExtractSlice(const SinkCandidate& cand, const TranslationUnit& unit) {
  UnitIndex index(unit);
  const Node& fn = *cand.function;
  Slice slice;
  slice.origin = cand;
  slice.function_text = std::string(cparse::SpanText(unit.source_text, fn.span));

  std::set<std::string> locals;
  for (const Node* p : fn.Params()) locals.insert(p->text);
  cparse::Walk(fn, [&](const Node& n) {
    if (n.kind == NodeKind::kVarDecl || n.kind == NodeKind::kEnumerator) locals.insert(n.text);
    if (n.kind == NodeKind::kRecordDecl && n.Has(cparse::kFlagHasBody)) {
      locals.insert("struct " + n.text);
    }
    return true;
  });

  std::set<const Node*> needed;
  std::vector<const Node*> work = {&fn};
  std::set<const Node*> visited;
  while (!work.empty()) {
    const Node* cur = work.back();
    work.pop_back();
    if (!visited.insert(cur).second) continue;
    std::set<std::string> idents, types, callees;
    CollectNames(*cur, &idents, &types, &callees);
    auto require = [&](const Node* item) {
      if (item != &fn && !needed.count(item)) {
        needed.insert(item);
        work.push_back(item);
      }
    };
    for (const std::string& t : types) {
      if (IsBuiltinTypeWord(t) || locals.count(t)) continue;
      std::string tag;
      if (t.rfind("struct ", 0) == 0) tag = t.substr(7);
      if (t.rfind("union ", 0) == 0) tag = t.substr(6);
      if (t.rfind("enum ", 0) == 0) {
        auto it = index.enums.find(t.substr(5));
        if (it != index.enums.end()) require(it->second);
        continue;  // enums are plain integers either way
      }
      if (!tag.empty()) {
        auto it = index.records.find(tag);
        if (it == index.records.end()) {
          throw SliceError("record '" + t + "' is not declared in the unit", t);
        }
        require(it->second);
        continue;
      }
      auto it = index.typedefs.find(t);
      if (it != index.typedefs.end()) {
        for (const Node& item : unit.items) {
          if (item.kind == NodeKind::kTypedef && item.text == t) require(&item);
        }
        continue;
      }
      if (cparse::IsWellKnownTypedef(t)) continue;
      throw SliceError("type '" + t + "' is not declared in the unit", t);
    }
    for (const std::string& id : idents) {
      if (locals.count(id) && cur == &fn) continue;
      if (auto it = index.enumerator_owner.find(id); it != index.enumerator_owner.end()) {
        require(it->second);
        continue;
      }
      if (auto it = index.defines.find(id); it != index.defines.end()) {
        require(it->second);
        continue;
      }
      if (auto it = index.globals.find(id); it != index.globals.end()) {
        require(it->second);
        continue;
      }
      if (index.functions.count(id) || callees.count(id) || IsKnownExternal(id)) continue;
      if (cur != &fn && cur->kind == NodeKind::kDefine) continue;
      // Identifiers that only name a function called elsewhere are fine;
      // anything else needs a declaration we do not have.
      bool is_param_of_fn_ptr = false;
      cparse::Walk(*cur, [&](const Node& n) {
        for (const Node& p : n.decl.fn_params) {
          if (p.text == id) is_param_of_fn_ptr = true;
        }
        return true;
      });
      if (is_param_of_fn_ptr) continue;
      if (cur != &fn && locals.count(id) == 0) {
        // Names local to an included declaration (enumerators handled above).
        bool declared_inside = false;
        cparse::Walk(*cur, [&](const Node& n) {
          if ((n.kind == NodeKind::kVarDecl || n.kind == NodeKind::kEnumerator) && n.text == id) {
            declared_inside = true;
          }
          return true;
        });
        if (declared_inside) continue;
      }
      throw SliceError("identifier '" + id + "' is not declared in the unit", id);
    }
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen_spans;
  for (const Node& item : unit.items) {
    if (!needed.count(&item)) continue;
    if (!seen_spans.insert({item.span.start_byte, item.span.end_byte}).second) continue;
    slice.required_decls.emplace_back(cparse::SpanText(unit.source_text, item.span));
  }
  return slice;
}

std::vector<SinkCandidate> AnalyzeUnit(const TranslationUnit& unit,
                                       const std::vector<SinkSpec>& specs) {
  std::vector<SinkCandidate> cands = FindSinkCalls(unit, specs);
  for (SinkCandidate& c : cands) {
    c.capacity = ResolveDestCapacity(c, unit);
    c.length = TraceLengthSource(c, unit);
    c.guard = HasDominatingGuard(c, unit);
  }
  return cands;
}

bool ShouldDrop(const SinkCandidate& cand) {
  return cand.guard.guarded() || cand.length.kind == LengthOrigin::Kind::kOpaque;
}

std::string InsertGuardBefore(const TranslationUnit& unit, const Node& call,
                              std::string_view guard_text) {
  const Node* fn = nullptr;
  for (const Node& item : unit.items) {
    if (item.kind == NodeKind::kFunctionDef && item.span.Contains(call.span)) fn = &item;
  }
  if (fn == nullptr) return unit.source_text;
  std::vector<const Node*> path = AncestorsOf(*fn, call);
  // Find the statement whose parent is a block or a control statement body.
  const Node* stmt = nullptr;
  const Node* parent = nullptr;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const Node& p = *path[i];
    const Node& c = *path[i + 1];
    bool body_slot = p.kind == NodeKind::kBlock ||
                     (p.kind == NodeKind::kIf && &c != &p.children[0]) ||
                     ((p.kind == NodeKind::kWhile) && &c == &p.children[1]) ||
                     (p.kind == NodeKind::kFor && &c == &p.children[3]) ||
                     (p.kind == NodeKind::kDoWhile && &c == &p.children[0]);
    if (body_slot) {
      stmt = &c;
      parent = &p;
    }
  }
  if (stmt == nullptr) return unit.source_text;
  const std::string& src = unit.source_text;
  std::uint32_t start = stmt->span.start_byte;
  size_t line_start = src.rfind('\n', start == 0 ? 0 : start - 1);
  line_start = line_start == std::string::npos ? 0 : line_start + 1;
  std::string indent;
  for (size_t i = line_start; i < start && (src[i] == ' ' || src[i] == '\t'); ++i) {
    indent += src[i];
  }
  if (parent->kind == NodeKind::kBlock) {
    return src.substr(0, start) + std::string(guard_text) + "\n" + indent + src.substr(start);
  }
  std::uint32_t end = stmt->span.end_byte;
  return src.substr(0, start) + "{ " + std::string(guard_text) + " " +
         src.substr(start, end - start) + " }" + src.substr(end);
}

}  // namespace symtee::slicer
