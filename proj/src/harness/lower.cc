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


#include "symtee/harness/lower.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>

#include "symtee/cparse/parser.h"
#include "type_names.h"

namespace symtee::harness {
namespace {

using cparse::Node;
using cparse::NodeKind;
using ir::CmpOp;
using ir::Cond;
using ir::Int;
using ir::LinExpr;
using ir::Stmt;
using internal::IsIntegerWords;
using internal::StripQualifiers;

// ---------------------------------------------------------------- C types

struct CType;
using TypeRef = std::shared_ptr<const CType>;

struct CType {
  enum class Kind { kVoid, kInt, kPtr, kArray, kRecord, kFunc, kOther };
  Kind kind = Kind::kOther;
  int width = 32;
  bool is_signed = true;
  bool is_bool = false;
  TypeRef elem;             // kPtr, kArray
  std::uint64_t count = 0;  // kArray
  std::string tag;          // kRecord key, kOther spelling

  bool IsInt() const { return kind == Kind::kInt; }
  bool IsPtr() const { return kind == Kind::kPtr; }
  bool IsScalar() const { return kind == Kind::kInt || kind == Kind::kPtr; }
};

TypeRef Make(CType t) { return std::make_shared<const CType>(std::move(t)); }

TypeRef IntOf(int width, bool is_signed, bool is_bool = false) {
  CType t;
  t.kind = CType::Kind::kInt;
  t.width = width;
  t.is_signed = is_signed;
  t.is_bool = is_bool;
  return Make(t);
}

TypeRef IntT() {
  static const TypeRef t = IntOf(32, true);
  return t;
}

TypeRef ULongT() {
  static const TypeRef t = IntOf(64, false);
  return t;
}

TypeRef LongT() {
  static const TypeRef t = IntOf(64, true);
  return t;
}

TypeRef VoidT() {
  static const TypeRef t = [] {
    CType c;
    c.kind = CType::Kind::kVoid;
    return Make(c);
  }();
  return t;
}

TypeRef OtherT(const std::string& spelling) {
  CType t;
  t.kind = CType::Kind::kOther;
  t.tag = spelling;
  return Make(t);
}

TypeRef PtrTo(TypeRef elem) {
  CType t;
  t.kind = CType::Kind::kPtr;
  t.width = 64;
  t.is_signed = false;
  t.elem = std::move(elem);
  return Make(t);
}

TypeRef ArrayOf(TypeRef elem, std::uint64_t count) {
  CType t;
  t.kind = CType::Kind::kArray;
  t.elem = std::move(elem);
  t.count = count;
  return Make(t);
}

TypeRef FuncT() {
  static const TypeRef t = [] {
    CType c;
    c.kind = CType::Kind::kFunc;
    return Make(c);
  }();
  return t;
}

std::optional<TypeRef> WellKnownType(const std::string& name) {
  if (name == "bool") return IntOf(8, false, true);
  if (auto t = internal::WellKnownIntType(name)) return IntOf(t->first, t->second);
  if (internal::IsTeeHandleType(name)) return PtrTo(VoidT());
  return std::nullopt;
}

// C rules for the type of an integer constant.
TypeRef LiteralType(std::string_view spelling, std::uint64_t value) {
  if (!spelling.empty() && spelling.front() == '\'') return IntT();
  bool u = false;
  int l = 0;
  size_t end = spelling.size();
  while (end > 0) {
    char c = spelling[end - 1];
    if (c == 'u' || c == 'U') {
      u = true;
    } else if (c == 'l' || c == 'L') {
      ++l;
    } else {
      break;
    }
    --end;
  }
  bool decimal = !(spelling.size() > 1 && spelling[0] == '0');
  struct Candidate {
    int width;
    bool is_signed;
  };
  std::vector<Candidate> order;
  if (u) {
    if (l == 0) order.push_back({32, false});
    order.push_back({64, false});
  } else if (decimal) {
    if (l == 0) order.push_back({32, true});
    order.push_back({64, true});
  } else {
    if (l == 0) {
      order.push_back({32, true});
      order.push_back({32, false});
    }
    order.push_back({64, true});
    order.push_back({64, false});
  }
  for (const Candidate& c : order) {
    if (static_cast<Int>(value) <= ir::MaxOf(c.width, c.is_signed)) {
      return IntOf(c.width, c.is_signed);
    }
  }
  return ULongT();
}

std::string Unquote(const std::string& raw) {
  std::string out;
  for (size_t i = 1; i + 1 < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 2 < raw.size()) {
      ++i;
      switch (raw[i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: out += raw[i];
      }
    } else {
      out += raw[i];
    }
  }
  return out;
}

// ---------------------------------------------------------------- program

struct NeedDecision {
  Cond cond;
  cparse::SourceSpan span;
  std::string text;
  int site = -1;
};

struct PathEnd {};

class Program {
 public:
  Program(const cparse::TranslationUnit& unit, const LoweringConfig& config)
      : unit_(unit), config_(config) {
    for (const std::string& s : config.sink_names) sinks_.insert(s);
    for (const Node& item : unit.items) Register(item, true);
    for (const Node& item : unit.items) {
      if (item.kind == NodeKind::kFunctionDef && item.Body()) {
        cparse::Walk(*item.Body(), [&](const Node& n) {
          if (n.kind == NodeKind::kTypedef || n.kind == NodeKind::kRecordDecl ||
              n.kind == NodeKind::kEnumDecl) {
            Register(n, false);
          }
          if (n.kind == NodeKind::kVarDecl) RegisterInlineBodies(n.type);
          if (n.kind == NodeKind::kCall && n.text == "klee_assert") {
            assert_sites_[&n] = static_cast<int>(assert_text_.size());
            assert_text_.push_back("line " + std::to_string(n.span.start_line) + ": " +
                                   std::string(cparse::SpanText(unit_.source_text, n.span)));
          }
          return true;
        });
      }
    }
    if (!functions_.count("main")) throw LoweringError("harness has no main function");
    if (assert_text_.empty()) throw LoweringError("no oracle: harness has no klee_assert");
  }

  const cparse::TranslationUnit& unit() const { return unit_; }
  const LoweringConfig& config() const { return config_; }
  const std::vector<std::string>& assert_text() const { return assert_text_; }
  const std::vector<const Node*>& globals() const { return globals_; }

  const Node* Function(const std::string& name) const {
    auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : it->second;
  }
  const Node* Prototype(const std::string& name) const {
    auto it = prototypes_.find(name);
    return it == prototypes_.end() ? nullptr : it->second;
  }
  bool IsSink(const std::string& name) const { return sinks_.count(name) > 0; }
  int AssertSite(const Node* call) const {
    auto it = assert_sites_.find(call);
    return it == assert_sites_.end() ? -1 : it->second;
  }
  std::optional<Int> Enumerator(const std::string& name) const {
    auto it = enumerators_.find(name);
    if (it == enumerators_.end()) return std::nullopt;
    return it->second;
  }
  const Node* ExprDefine(const std::string& name) const {
    auto it = expr_defines_.find(name);
    return it == expr_defines_.end() ? nullptr : &it->second;
  }
  const Node* Global(const std::string& name) const {
    auto it = global_by_name_.find(name);
    return it == global_by_name_.end() ? nullptr : it->second;
  }
  std::string IntSpelling(const Node& lit) const {
    if (!lit.Has(cparse::kFlagFromMacro)) return lit.text;
    auto it = int_define_spelling_.find(lit.text);
    return it == int_define_spelling_.end() ? std::string() : it->second;
  }
  std::string Text(const cparse::SourceSpan& span) const {
    return std::string(cparse::SpanText(unit_.source_text, span));
  }

  TypeRef Resolve(const cparse::TypeSpec& ts, const cparse::Declarator& d,
                  bool as_param = false) const {
    TypeRef t = ResolveBase(ts);
    if (d.fn_ptr) {
      t = PtrTo(FuncT());
      for (int i = 1; i < d.fn_ptr_depth; ++i) t = PtrTo(t);
      return t;
    }
    for (int i = 0; i < d.pointer_depth(); ++i) t = PtrTo(t);
    for (size_t i = d.dims.size(); i-- > 0;) {
      std::uint64_t n = 0;
      if (d.dims[i].kind != NodeKind::kEmpty) n = static_cast<std::uint64_t>(ConstEval(d.dims[i]));
      if (as_param && i == 0) {
        t = PtrTo(t);
      } else {
        t = ArrayOf(t, n);
      }
    }
    return t;
  }

  const std::vector<std::pair<std::string, TypeRef>>& Fields(const CType& rec) const {
    auto cached = fields_.find(rec.tag);
    if (cached != fields_.end()) return cached->second;
    auto it = records_.find(rec.tag);
    if (it == records_.end()) throw LoweringError("incomplete type '" + rec.tag + "'");
    std::vector<std::pair<std::string, TypeRef>> fields;
    for (const Node& f : it->second->children) {
      if (f.kind != NodeKind::kVarDecl) continue;
      fields.emplace_back(f.text, Resolve(f.type, f.decl));
    }
    return fields_.emplace(rec.tag, std::move(fields)).first->second;
  }

  bool IsUnion(const CType& rec) const {
    auto it = records_.find(rec.tag);
    return it != records_.end() && it->second->Has(cparse::kFlagUnion);
  }

  std::uint64_t AlignOf(const TypeRef& t) const {
    switch (t->kind) {
      case CType::Kind::kInt: return static_cast<std::uint64_t>(t->width / 8);
      case CType::Kind::kPtr: return 8;
      case CType::Kind::kArray: return AlignOf(t->elem);
      case CType::Kind::kRecord: {
        std::uint64_t a = 1;
        for (const auto& [name, ft] : Fields(*t)) a = std::max(a, AlignOf(ft));
        return a;
      }
      default: return 1;
    }
  }

  std::uint64_t SizeOf(const TypeRef& t) const {
    switch (t->kind) {
      case CType::Kind::kInt: return static_cast<std::uint64_t>(t->width / 8);
      case CType::Kind::kPtr: return 8;
      case CType::Kind::kVoid: return 1;
      case CType::Kind::kArray: return t->count * SizeOf(t->elem);
      case CType::Kind::kRecord: {
        std::uint64_t size = 0;
        bool is_union = IsUnion(*t);
        for (const auto& [name, ft] : Fields(*t)) {
          std::uint64_t a = AlignOf(ft);
          std::uint64_t s = SizeOf(ft);
          if (is_union) {
            size = std::max(size, s);
          } else {
            size = (size + a - 1) / a * a + s;
          }
        }
        std::uint64_t a = AlignOf(t);
        return (size + a - 1) / a * a;
      }
      default:
        throw LoweringError("size of unmodeled type '" + t->tag + "'");
    }
  }

  // Integer constant expressions in array bounds and enumerators.
  Int ConstEval(const Node& n) const {
    switch (n.kind) {
      case NodeKind::kIntLiteral: return static_cast<Int>(n.int_value);
      case NodeKind::kIdentifier:
        if (auto v = Enumerator(n.text)) return *v;
        break;
      case NodeKind::kSizeofType: return static_cast<Int>(SizeOf(Resolve(n.type, n.decl)));
      case NodeKind::kCast: return ConstEval(n.children[0]);
      case NodeKind::kUnaryOp:
        if (n.text == "-") return -ConstEval(n.children[0]);
        if (n.text == "+") return ConstEval(n.children[0]);
        if (n.text == "~") return ~ConstEval(n.children[0]);
        break;
      case NodeKind::kBinaryOp: {
        Int a = ConstEval(n.children[0]);
        Int b = ConstEval(n.children[1]);
        if (n.text == "+") return a + b;
        if (n.text == "-") return a - b;
        if (n.text == "*") return a * b;
        if ((n.text == "/" || n.text == "%") && b == 0) break;
        if (n.text == "/") return a / b;
        if (n.text == "%") return a % b;
        if (n.text == "<<") return a << static_cast<int>(b);
        if (n.text == ">>") return a >> static_cast<int>(b);
        if (n.text == "&") return a & b;
        if (n.text == "|") return a | b;
        if (n.text == "^") return a ^ b;
        break;
      }
      default: break;
    }
    throw LoweringError("not an integer constant expression: " + Text(n.span),
                        n.span.start_line);
  }

 private:
  TypeRef ResolveBase(const cparse::TypeSpec& ts) const {
    if (!ts.body.empty() && ts.body[0].kind == NodeKind::kRecordDecl) {
      CType t;
      t.kind = CType::Kind::kRecord;
      t.tag = RecordKey(ts, ts.body[0]);
      return Make(t);
    }
    std::string base = StripQualifiers(ts.base);
    if (base.rfind("enum", 0) == 0) return IntT();
    if (base.rfind("struct ", 0) == 0 || base.rfind("union ", 0) == 0) {
      CType t;
      t.kind = CType::Kind::kRecord;
      t.tag = base;
      return Make(t);
    }
    if (base == "void") return VoidT();
    if (base == "_Bool") return IntOf(8, false, true);
    if (IsIntegerWords(base)) {
      return IntOf(static_cast<int>(cparse::ScalarByteSize(base) * 8), cparse::IsSignedBase(base));
    }
    if (auto it = typedefs_.find(base); it != typedefs_.end()) {
      if (resolving_.count(base)) throw LoweringError("recursive typedef '" + base + "'");
      resolving_.insert(base);
      TypeRef t = Resolve(it->second->type, it->second->decl);
      resolving_.erase(base);
      return t;
    }
    if (auto t = WellKnownType(base)) return *t;
    return OtherT(base);
  }

  std::string RecordKey(const cparse::TypeSpec& ts, const Node& body) const {
    std::string base = StripQualifiers(ts.base);
    if (!body.text.empty()) return base;
    return "anonymous@" + std::to_string(reinterpret_cast<std::uintptr_t>(&body));
  }

  void RegisterInlineBodies(const cparse::TypeSpec& ts) {
    if (ts.body.empty()) return;
    const Node& body = ts.body[0];
    if (body.kind == NodeKind::kRecordDecl) {
      records_[RecordKey(ts, body)] = &body;
      for (const Node& f : body.children) RegisterInlineBodies(f.type);
    } else if (body.kind == NodeKind::kEnumDecl) {
      Register(body, false);
    }
  }

  void Register(const Node& item, bool file_scope) {
    switch (item.kind) {
      case NodeKind::kFunctionDef:
        if (item.Has(cparse::kFlagPrototype)) {
          prototypes_[item.text] = &item;
        } else {
          functions_[item.text] = &item;
        }
        RegisterInlineBodies(item.type);
        break;
      case NodeKind::kTypedef:
        typedefs_[item.text] = &item;
        RegisterInlineBodies(item.type);
        break;
      case NodeKind::kRecordDecl:
        if (item.Has(cparse::kFlagHasBody)) {
          records_[std::string(item.Has(cparse::kFlagUnion) ? "union " : "struct ") +
                   item.text] = &item;
          for (const Node& f : item.children) RegisterInlineBodies(f.type);
        }
        break;
      case NodeKind::kEnumDecl: {
        Int next = 0;
        for (const Node& e : item.children) {
          if (e.kind != NodeKind::kEnumerator) continue;
          if (!e.children.empty()) next = ConstEval(e.children[0]);
          enumerators_[e.text] = next++;
        }
        break;
      }
      case NodeKind::kVarDecl:
        RegisterInlineBodies(item.type);
        if (file_scope) {
          globals_.push_back(&item);
          global_by_name_[item.text] = &item;
        }
        break;
      case NodeKind::kDefine:
        if (item.Has(cparse::kFlagIntegerMacro)) {
          std::string body = item.raw;
          while (body.size() >= 2 && body.front() == '(' && body.back() == ')') {
            body = body.substr(1, body.size() - 2);
          }
          int_define_spelling_[item.text] = body;
        } else if (!item.raw.empty()) {
          try {
            expr_defines_[item.text] = cparse::ParseExpression(item.raw);
          } catch (const std::exception&) {
            // Not an expression; using it is an error reported at the use.
          }
        }
        break;
      default:
        break;
    }
  }

  const cparse::TranslationUnit& unit_;
  const LoweringConfig& config_;
  std::set<std::string> sinks_;
  std::map<std::string, const Node*> functions_;
  std::map<std::string, const Node*> prototypes_;
  std::map<std::string, const Node*> typedefs_;
  std::map<std::string, const Node*> records_;
  std::map<std::string, Int> enumerators_;
  std::map<std::string, std::string> int_define_spelling_;
  std::map<std::string, Node> expr_defines_;
  std::vector<const Node*> globals_;
  std::map<std::string, const Node*> global_by_name_;
  std::map<const Node*, int> assert_sites_;
  std::vector<std::string> assert_text_;
  mutable std::map<std::string, std::vector<std::pair<std::string, TypeRef>>> fields_;
  mutable std::set<std::string> resolving_;
};

// ---------------------------------------------------------------- values

struct Value {
  enum class Kind { kUnknown, kInt, kCond, kPtr, kAggregate, kFunc };
  Kind kind = Kind::kUnknown;
  TypeRef type;
  LinExpr e;          // kInt
  Cond cond;          // kCond
  std::string base;   // kPtr: object path, empty for null; kAggregate: source; kFunc: name
  bool array = false; // kPtr: base names an array
  LinExpr offset;     // kPtr, in elements

  static Value Unknown(TypeRef t) {
    Value v;
    v.type = std::move(t);
    return v;
  }
  static Value Integer(LinExpr e, TypeRef t) {
    Value v;
    v.kind = Kind::kInt;
    v.e = std::move(e);
    v.type = std::move(t);
    return v;
  }
  static Value Null(TypeRef t) {
    Value v;
    v.kind = Kind::kPtr;
    v.type = std::move(t);
    return v;
  }
  bool IsNull() const { return kind == Kind::kPtr && base.empty() && offset.IsConstant(); }
};

struct Loc {
  std::string path;
  TypeRef type;
  std::string havoc_root;  // set when the index is symbolic
};

enum class Flow { kNext, kBreak, kContinue, kReturn };

class Interp {
 public:
  Interp(const Program& prog, const std::vector<bool>& prefix)
      : prog_(prog), cfg_(prog.config()), prefix_(prefix) {}

  std::vector<Stmt> out;
  std::vector<ir::SymDecl> decls;

  void Run() {
    InitGlobals();
    try {
      const Node* main_fn = prog_.Function("main");
      Inline(*main_fn, {}, *main_fn);
    } catch (const PathEnd&) {
    }
  }

 private:
  struct Frame {
    std::vector<std::map<std::string, std::string>> scopes;
    std::optional<Value> ret;
    TypeRef ret_type;
    const Node* fn = nullptr;
  };

  struct Object {
    TypeRef type;
    bool zero = false;
  };

  // ------------------------------------------------------------ errors
  [[noreturn]] void Fail(const std::string& msg, const Node& where) const {
    throw LoweringError(msg, where.span.start_line);
  }

  // ------------------------------------------------------------ objects
  static std::string RootOf(const std::string& path) {
    size_t i = path.find_first_of(".[");
    return i == std::string::npos ? path : path.substr(0, i);
  }

  static bool UnderPrefix(const std::string& path, const std::string& prefix) {
    return path.size() > prefix.size() && path.compare(0, prefix.size(), prefix) == 0 &&
           (path[prefix.size()] == '.' || path[prefix.size()] == '[');
  }

  Value Zero(const TypeRef& t) const {
    if (t->IsInt()) return Value::Integer(LinExpr::Const(0), t);
    if (t->IsPtr()) return Value::Null(t);
    return Value::Unknown(t);
  }

  void Havoc(const std::string& prefix) {
    for (auto it = store_.begin(); it != store_.end();) {
      if (it->first == prefix || UnderPrefix(it->first, prefix)) {
        it = store_.erase(it);
      } else {
        ++it;
      }
    }
    havoc_.insert(prefix);
  }

  void Leaves(const TypeRef& t, const std::string& suffix, std::vector<std::pair<std::string, TypeRef>>* out) const {
    if (out->size() > 65536) throw LoweringError("object too large to model");
    switch (t->kind) {
      case CType::Kind::kInt:
      case CType::Kind::kPtr:
        out->emplace_back(suffix, t);
        break;
      case CType::Kind::kArray:
        for (std::uint64_t i = 0; i < t->count; ++i) {
          Leaves(t->elem, suffix + "[" + std::to_string(i) + "]", out);
        }
        break;
      case CType::Kind::kRecord:
        for (const auto& [name, ft] : prog_.Fields(*t)) Leaves(ft, suffix + "." + name, out);
        break;
      default:
        break;
    }
  }

  Value Read(const Loc& loc) {
    const TypeRef& t = loc.type;
    if (t->kind == CType::Kind::kArray) {
      if (!loc.havoc_root.empty()) return Value::Unknown(PtrTo(t->elem));
      Value v;
      v.kind = Value::Kind::kPtr;
      v.type = PtrTo(t->elem);
      v.base = loc.path;
      v.array = true;
      return v;
    }
    if (t->kind == CType::Kind::kRecord) {
      Value v;
      v.kind = loc.havoc_root.empty() ? Value::Kind::kAggregate : Value::Kind::kUnknown;
      v.type = t;
      v.base = loc.path;
      return v;
    }
    if (!t->IsScalar() || !loc.havoc_root.empty()) return Value::Unknown(t);
    if (auto it = store_.find(loc.path); it != store_.end()) return it->second;
    for (const std::string& h : havoc_) {
      if (loc.path == h || UnderPrefix(loc.path, h)) return Value::Unknown(t);
    }
    auto obj = objects_.find(RootOf(loc.path));
    if (obj != objects_.end() && obj->second.zero) return Zero(t);
    return Value::Unknown(t);
  }

  void Write(const Loc& loc, const Value& v, const Node& where) {
    if (!loc.havoc_root.empty()) {
      Havoc(loc.havoc_root);
      return;
    }
    const TypeRef& t = loc.type;
    if (t->kind == CType::Kind::kRecord || t->kind == CType::Kind::kArray) {
      if (v.kind != Value::Kind::kAggregate) {
        Havoc(loc.path);
        return;
      }
      std::vector<std::pair<std::string, TypeRef>> leaves;
      Leaves(t, "", &leaves);
      std::vector<std::pair<std::string, Value>> values;
      for (const auto& [suffix, lt] : leaves) {
        values.emplace_back(suffix, Read(Loc{v.base + suffix, lt, {}}));
      }
      for (auto& [suffix, lv] : values) {
        store_[loc.path + suffix] = std::move(lv);
      }
      return;
    }
    store_[loc.path] = v;
    if (!initializing_ && global_ints_.count(loc.path)) {
      if (v.kind != Value::Kind::kInt) Fail("unmodeled value stored to global '" + loc.path + "'", where);
      if (v.e == LinExpr::Const(1)) {
        out.push_back(Stmt::SetFlag(loc.path));
      } else {
        out.push_back(Stmt::Assign(loc.path, v.e, t->width, t->is_signed));
      }
      out.back().span = where.span;
    }
  }

  Loc NewObject(const std::string& name, TypeRef t, bool zero) {
    std::string path = name + "#" + std::to_string(++next_object_);
    objects_[path] = Object{t, zero};
    frames_.back().scopes.back()[name] = path;
    return Loc{path, std::move(t), {}};
  }

  void ZeroFill(const Loc& loc) {
    if (loc.path == RootOf(loc.path)) {
      Havoc(loc.path);
      havoc_.erase(loc.path);
      objects_[loc.path].zero = true;
      return;
    }
    std::vector<std::pair<std::string, TypeRef>> leaves;
    Leaves(loc.type, "", &leaves);
    for (const auto& [suffix, lt] : leaves) store_[loc.path + suffix] = Zero(lt);
  }

  void ApplyInit(const Loc& loc, const Node& init) {
    if (init.kind == NodeKind::kInitList) {
      ZeroFill(loc);
      const TypeRef& t = loc.type;
      size_t index = 0;
      for (const Node& el : init.children) {
        if (el.kind == NodeKind::kAssign && el.children[0].kind == NodeKind::kMember &&
            el.children[0].children.empty()) {
          if (t->kind != CType::Kind::kRecord) Fail("designator on a non-record", el);
          const auto& fields = prog_.Fields(*t);
          std::string f = el.children[0].text;
          size_t k = 0;
          while (k < fields.size() && fields[k].first != f) ++k;
          if (k == fields.size()) Fail("no field '" + f + "'", el);
          ApplyInit(Loc{loc.path + "." + f, fields[k].second, {}}, el.children[1]);
          index = k + 1;
          continue;
        }
        if (t->kind == CType::Kind::kArray) {
          ApplyInit(Loc{loc.path + "[" + std::to_string(index) + "]", t->elem, {}}, el);
        } else if (t->kind == CType::Kind::kRecord) {
          const auto& fields = prog_.Fields(*t);
          if (index >= fields.size()) Fail("too many initializers", el);
          ApplyInit(Loc{loc.path + "." + fields[index].first, fields[index].second, {}}, el);
        } else if (index == 0) {
          ApplyInit(loc, el);
        }
        ++index;
      }
      return;
    }
    if (loc.type->kind == CType::Kind::kArray && init.kind == NodeKind::kStringLiteral) {
      ZeroFill(loc);
      return;
    }
    if (loc.type->kind == CType::Kind::kRecord || loc.type->kind == CType::Kind::kArray) {
      Value v = Eval(init);
      if (v.kind != Value::Kind::kAggregate) {
        // Brace elision: a scalar initializes the first scalar member.
        std::vector<std::pair<std::string, TypeRef>> leaves;
        Leaves(loc.type, "", &leaves);
        if (leaves.empty()) Fail("cannot initialize an empty aggregate", init);
        Write(Loc{loc.path + leaves[0].first, leaves[0].second, {}},
              Convert(v, leaves[0].second, init), init);
        return;
      }
      Write(loc, v, init);
      return;
    }
    Write(loc, Convert(Eval(init), loc.type, init), init);
  }

  void InitGlobals() {
    frames_.push_back(Frame{});
    frames_.back().scopes.emplace_back();
    initializing_ = true;
    for (const Node* g : prog_.globals()) {
      TypeRef t = prog_.Resolve(g->type, g->decl);
      objects_[g->text] = Object{t, true};
      if (t->IsInt()) global_ints_.insert(g->text);
      if (const Node* init = g->Init()) ApplyInit(Loc{g->text, t, {}}, *init);
    }
    initializing_ = false;
    for (const Node* g : prog_.globals()) {
      if (!global_ints_.count(g->text)) continue;
      Value v = Read(Loc{g->text, objects_[g->text].type, {}});
      if (v.kind != Value::Kind::kInt || !v.e.IsConstant()) {
        Fail("global '" + g->text + "' needs a constant initializer", *g);
      }
      out.push_back(Stmt::Assign(g->text, v.e, v.type->width, v.type->is_signed));
      out.back().span = g->span;
    }
    frames_.pop_back();
  }

  // ------------------------------------------------------------ decisions
  bool Decide(const Value& v, const Node& where) {
    Cond c;
    switch (v.kind) {
      case Value::Kind::kInt:
        if (v.e.IsConstant()) return v.e.constant != 0;
        c = Cond::Cmp(v.e, CmpOp::kNe, LinExpr::Const(0));
        break;
      case Value::Kind::kCond:
        c = v.cond;
        break;
      case Value::Kind::kPtr:
        if (v.base.empty()) {
          if (!v.offset.IsConstant()) Fail("branch on a symbolic pointer", where);
          return v.offset.constant != 0;
        }
        return true;
      case Value::Kind::kFunc:
        return true;
      default:
        Fail("branch on an uninitialized or unmodeled value: " + prog_.Text(where.span), where);
    }
    if (decision_ < prefix_.size()) return prefix_[decision_++];
    throw NeedDecision{c, where.span, prog_.Text(where.span),
                       static_cast<int>(where.span.start_line)};
  }

  // ------------------------------------------------------------ integers
  Value Materialize(const LinExpr& e, const TypeRef& t) {
    if (e.IsConstant()) return Value::Integer(LinExpr::Const(ir::Wrap(e.constant, t->width, t->is_signed)), t);
    std::string name = "%t" + std::to_string(++next_temp_);
    out.push_back(Stmt::Assign(name, e, t->width, t->is_signed));
    return Value::Integer(LinExpr::Var(name), t);
  }

  static bool Fits(const CType& from, const CType& to) {
    if (from.is_signed == to.is_signed) return to.width >= from.width;
    return !from.is_signed && to.is_signed && to.width > from.width;
  }

  Value ConvertInt(const Value& v, const TypeRef& to) {
    if (v.e.IsConstant() || !Fits(*v.type, *to)) return Materialize(v.e, to);
    return Value::Integer(v.e, to);
  }

  Value Convert(const Value& v, const TypeRef& to, const Node& where) {
    switch (to->kind) {
      case CType::Kind::kVoid:
        return Value::Unknown(to);
      case CType::Kind::kInt: {
        if (v.kind == Value::Kind::kUnknown) return Value::Unknown(to);
        if (to->is_bool || v.kind == Value::Kind::kCond) {
          bool b = Decide(v, where);
          return Value::Integer(LinExpr::Const(b ? 1 : 0), to);
        }
        if (v.kind == Value::Kind::kInt) return ConvertInt(v, to);
        if (v.kind == Value::Kind::kPtr && v.IsNull()) {
          return Value::Integer(LinExpr::Const(v.offset.constant), to);
        }
        Fail("pointer or aggregate used as an integer", where);
      }
      case CType::Kind::kPtr: {
        if (v.kind == Value::Kind::kPtr || v.kind == Value::Kind::kFunc) {
          Value out_v = v;
          if (v.kind == Value::Kind::kPtr) out_v.type = to;
          return out_v;
        }
        if (v.kind == Value::Kind::kInt && v.e.IsConstant()) {
          Value p = Value::Null(to);
          p.offset = LinExpr::Const(v.e.constant);
          return p;
        }
        if (v.kind == Value::Kind::kUnknown) return Value::Unknown(to);
        Fail("integer converted to a pointer", where);
      }
      case CType::Kind::kRecord:
      case CType::Kind::kArray:
        return v;
      default:
        return Value::Unknown(to);
    }
  }

  Value Promote(const Value& v) {
    if (v.type->width < 32) return ConvertInt(v, IntT());
    return v;
  }

  static TypeRef Common(const CType& a, const CType& b) {
    if (a.is_signed == b.is_signed) return IntOf(std::max(a.width, b.width), a.is_signed);
    const CType& u = a.is_signed ? b : a;
    const CType& s = a.is_signed ? a : b;
    if (u.width >= s.width) return IntOf(u.width, false);
    return IntOf(s.width, true);
  }

  // Cond and other scalar forms as an arithmetic integer.
  Value AsInt(const Value& v, const Node& where) {
    if (v.kind == Value::Kind::kCond) {
      return Value::Integer(LinExpr::Const(Decide(v, where) ? 1 : 0), IntT());
    }
    return v;
  }

  Value BoolValue(bool b) { return Value::Integer(LinExpr::Const(b ? 1 : 0), IntT()); }

  static std::optional<CmpOp> CmpOf(const std::string& op) {
    if (op == "<") return CmpOp::kLt;
    if (op == "<=") return CmpOp::kLe;
    if (op == ">") return CmpOp::kGt;
    if (op == ">=") return CmpOp::kGe;
    if (op == "==") return CmpOp::kEq;
    if (op == "!=") return CmpOp::kNe;
    return std::nullopt;
  }

  Value PtrAdd(const Value& p, const Value& i, Int sign, const Node& where) {
    if (i.kind != Value::Kind::kInt) {
      if (i.kind == Value::Kind::kUnknown) return Value::Unknown(p.type);
      Fail("pointer offset is not an integer", where);
    }
    Value r = p;
    r.offset += i.e * sign;
    return r;
  }

  Value BinOp(const std::string& op, Value a, Value b, const Node& where) {
    a = AsInt(a, where);
    b = AsInt(b, where);
    std::optional<CmpOp> cmp = CmpOf(op);
    if (a.kind == Value::Kind::kPtr || b.kind == Value::Kind::kPtr ||
        a.kind == Value::Kind::kFunc || b.kind == Value::Kind::kFunc) {
      return PtrBinOp(op, a, b, where);
    }
    if (a.kind == Value::Kind::kUnknown || b.kind == Value::Kind::kUnknown) {
      return Value::Unknown(IntT());
    }
    if (a.kind != Value::Kind::kInt || b.kind != Value::Kind::kInt) {
      Fail("operator '" + op + "' on a non-scalar operand", where);
    }
    a = Promote(a);
    b = Promote(b);
    if (op == "<<" || op == ">>") {
      if (!b.e.IsConstant() || b.e.constant < 0 || b.e.constant >= a.type->width) {
        Fail("shift by a non-constant or out-of-range amount", where);
      }
      int k = static_cast<int>(b.e.constant);
      if (op == "<<") return Materialize(a.e * (Int{1} << k), a.type);
      if (a.e.IsConstant()) return Materialize(LinExpr::Const(a.e.constant >> k), a.type);
      if (k == 0) return a;
      Fail("right shift of a symbolic value", where);
    }
    TypeRef t = Common(*a.type, *b.type);
    a = ConvertInt(a, t);
    b = ConvertInt(b, t);
    if (cmp) {
      if (a.e.IsConstant() && b.e.IsConstant()) {
        return BoolValue(ir::EvalCmp(a.e.constant, *cmp, b.e.constant));
      }
      Value v;
      v.kind = Value::Kind::kCond;
      v.type = IntT();
      v.cond = Cond::Cmp(a.e, *cmp, b.e);
      return v;
    }
    if (op == "+") return Materialize(a.e + b.e, t);
    if (op == "-") return Materialize(a.e - b.e, t);
    if (op == "*") {
      if (a.e.IsConstant()) return Materialize(b.e * a.e.constant, t);
      if (b.e.IsConstant()) return Materialize(a.e * b.e.constant, t);
      Fail("product of two symbolic values", where);
    }
    if (!a.e.IsConstant() || !b.e.IsConstant()) {
      if ((op == "/") && b.e == LinExpr::Const(1)) return a;
      Fail("operator '" + op + "' on a symbolic value", where);
    }
    Int x = a.e.constant;
    Int y = b.e.constant;
    if ((op == "/" || op == "%") && y == 0) Fail("division by zero", where);
    if (op == "/") return Materialize(LinExpr::Const(x / y), t);
    if (op == "%") return Materialize(LinExpr::Const(x % y), t);
    if (op == "&") return Materialize(LinExpr::Const(x & y), t);
    if (op == "|") return Materialize(LinExpr::Const(x | y), t);
    if (op == "^") return Materialize(LinExpr::Const(x ^ y), t);
    Fail("unsupported operator '" + op + "'", where);
  }

  Value PtrBinOp(const std::string& op, const Value& a, const Value& b, const Node& where) {
    std::optional<CmpOp> cmp = CmpOf(op);
    if (op == "+" && a.kind == Value::Kind::kPtr) return PtrAdd(a, b, 1, where);
    if (op == "+" && b.kind == Value::Kind::kPtr) return PtrAdd(b, a, 1, where);
    if (op == "-" && a.kind == Value::Kind::kPtr && b.kind == Value::Kind::kInt) {
      return PtrAdd(a, b, -1, where);
    }
    auto as_ptr = [&](const Value& v) {
      if (v.kind == Value::Kind::kInt && v.e.IsConstant()) {
        Value p = Value::Null(PtrTo(VoidT()));
        p.offset = LinExpr::Const(v.e.constant);
        return p;
      }
      return v;
    };
    Value pa = as_ptr(a);
    Value pb = as_ptr(b);
    if (pa.kind == Value::Kind::kUnknown || pb.kind == Value::Kind::kUnknown) {
      return Value::Unknown(IntT());
    }
    if (pa.kind == Value::Kind::kFunc || pb.kind == Value::Kind::kFunc) {
      if (op == "==" || op == "!=") {
        bool same = pa.kind == pb.kind && pa.base == pb.base;
        return BoolValue((op == "==") == same);
      }
      Fail("unsupported operation on a function", where);
    }
    if (pa.kind != Value::Kind::kPtr || pb.kind != Value::Kind::kPtr) {
      Fail("unsupported pointer operation '" + op + "'", where);
    }
    LinExpr diff = pa.offset - pb.offset;
    if (op == "-") {
      if (pa.base != pb.base) Fail("difference of unrelated pointers", where);
      return Materialize(diff, LongT());
    }
    if (cmp) {
      if (pa.base != pb.base) {
        if (*cmp == CmpOp::kEq) return BoolValue(false);
        if (*cmp == CmpOp::kNe) return BoolValue(true);
        Fail("ordering of unrelated pointers", where);
      }
      if (diff.IsConstant()) return BoolValue(ir::EvalCmp(diff.constant, *cmp, 0));
      Value v;
      v.kind = Value::Kind::kCond;
      v.type = IntT();
      v.cond = Cond::Cmp(pa.offset, *cmp, pb.offset);
      return v;
    }
    Fail("unsupported pointer operation '" + op + "'", where);
  }

  // ------------------------------------------------------------ lvalues
  Loc Deref(const Value& p, const Node& where) {
    if (p.kind != Value::Kind::kPtr) {
      Fail("dereference of an unmodeled pointer: " + prog_.Text(where.span), where);
    }
    if (p.base.empty()) Fail("null pointer dereference: " + prog_.Text(where.span), where);
    TypeRef elem = p.type->elem ? p.type->elem : VoidT();
    if (p.array) {
      if (!p.offset.IsConstant()) return Loc{"", elem, p.base};
      return Loc{p.base + "[" + ir::IntToString(p.offset.constant) + "]", elem, {}};
    }
    if (!(p.offset == LinExpr::Const(0))) {
      Fail("pointer arithmetic outside an array: " + prog_.Text(where.span), where);
    }
    return Loc{p.base, elem, {}};
  }

  Value AddrOf(const Loc& loc, const Node& where) {
    if (!loc.havoc_root.empty()) {
      Value v;
      v.kind = Value::Kind::kPtr;
      v.type = PtrTo(loc.type);
      v.base = loc.havoc_root;
      v.array = true;
      v.offset = LinExpr::Var("%unknown");
      Fail("address of a symbolically indexed element", where);
    }
    Value v;
    v.kind = Value::Kind::kPtr;
    v.type = PtrTo(loc.type);
    if (!loc.path.empty() && loc.path.back() == ']') {
      size_t open = loc.path.rfind('[');
      std::string idx = loc.path.substr(open + 1, loc.path.size() - open - 2);
      v.base = loc.path.substr(0, open);
      v.array = true;
      v.offset = LinExpr::Const(std::stoll(idx));
      return v;
    }
    v.base = loc.path;
    return v;
  }

  std::optional<Loc> LookupVar(const std::string& name) {
    for (auto it = frames_.back().scopes.rbegin(); it != frames_.back().scopes.rend(); ++it) {
      if (auto f = it->find(name); f != it->end()) {
        return Loc{f->second, objects_.at(RootOf(f->second)).type, {}};
      }
    }
    if (prog_.Global(name)) return Loc{name, objects_.at(name).type, {}};
    return std::nullopt;
  }

  Loc FieldOf(const Loc& base, const std::string& field, const Node& where) {
    if (base.type->kind != CType::Kind::kRecord) {
      Fail("member access on a non-record: " + prog_.Text(where.span), where);
    }
    for (const auto& [name, ft] : prog_.Fields(*base.type)) {
      if (name == field) {
        if (!base.havoc_root.empty()) return Loc{"", ft, base.havoc_root};
        return Loc{base.path + "." + field, ft, {}};
      }
    }
    Fail("no field '" + field + "'", where);
  }

  Loc EvalLoc(const Node& n) {
    switch (n.kind) {
      case NodeKind::kIdentifier: {
        if (auto loc = LookupVar(n.text)) return *loc;
        Fail("undeclared identifier '" + n.text + "'", n);
      }
      case NodeKind::kMember: {
        if (n.Has(cparse::kFlagArrow)) {
          return FieldOf(Deref(Eval(n.children[0]), n), n.text, n);
        }
        return FieldOf(EvalLoc(n.children[0]), n.text, n);
      }
      case NodeKind::kIndex: {
        Value base = Eval(n.children[0]);
        Value idx = AsInt(Eval(n.children[1]), n);
        if (base.kind == Value::Kind::kInt && idx.kind == Value::Kind::kPtr) std::swap(base, idx);
        if (base.kind != Value::Kind::kPtr) {
          Fail("subscript of an unmodeled value: " + prog_.Text(n.span), n);
        }
        return Deref(PtrAdd(base, idx, 1, n), n);
      }
      case NodeKind::kUnaryOp:
        if (n.text == "*") return Deref(Eval(n.children[0]), n);
        break;
      default:
        break;
    }
    Fail("expression is not an lvalue: " + prog_.Text(n.span), n);
  }

  TypeRef StaticType(const Node& n) {
    switch (n.kind) {
      case NodeKind::kIdentifier:
        if (auto loc = LookupVar(n.text)) return loc->type;
        return IntT();
      case NodeKind::kMember: {
        TypeRef t = StaticType(n.children[0]);
        if (n.Has(cparse::kFlagArrow)) t = t->elem;
        if (!t || t->kind != CType::Kind::kRecord) Fail("member of a non-record", n);
        for (const auto& [name, ft] : prog_.Fields(*t)) {
          if (name == n.text) return ft;
        }
        Fail("no field '" + n.text + "'", n);
      }
      case NodeKind::kIndex: {
        TypeRef t = StaticType(n.children[0]);
        if (!t->elem) Fail("subscript of a non-array", n);
        return t->elem;
      }
      case NodeKind::kUnaryOp: {
        TypeRef t = StaticType(n.children[0]);
        if (n.text == "*") {
          if (!t->elem) Fail("dereference of a non-pointer", n);
          return t->elem;
        }
        if (n.text == "&") return PtrTo(t);
        return t->IsInt() && t->width < 32 ? IntT() : t;
      }
      case NodeKind::kCast:
        return prog_.Resolve(n.type, n.decl);
      case NodeKind::kIntLiteral:
        return LiteralType(prog_.IntSpelling(n), n.int_value);
      case NodeKind::kStringLiteral:
        return ArrayOf(IntOf(8, true), Unquote(n.raw).size() + 1);
      case NodeKind::kSizeofExpr:
      case NodeKind::kSizeofType:
        return ULongT();
      case NodeKind::kCall:
        if (const Node* f = prog_.Function(n.text)) return prog_.Resolve(f->type, f->decl);
        return IntT();
      default:
        return IntT();
    }
  }

  // ------------------------------------------------------------ rvalues
  Value Eval(const Node& n) {
    switch (n.kind) {
      case NodeKind::kIntLiteral:
        return Value::Integer(LinExpr::Const(static_cast<Int>(n.int_value)),
                              LiteralType(prog_.IntSpelling(n), n.int_value));
      case NodeKind::kStringLiteral: {
        Value v;
        v.kind = Value::Kind::kPtr;
        v.type = PtrTo(IntOf(8, true));
        v.base = "\"string@" + std::to_string(n.span.start_byte) + "\"";
        v.array = true;
        return v;
      }
      case NodeKind::kIdentifier:
        return EvalIdentifier(n);
      case NodeKind::kMember:
      case NodeKind::kIndex:
        return Read(EvalLoc(n));
      case NodeKind::kUnaryOp:
        return EvalUnary(n);
      case NodeKind::kPostfixOp: {
        Loc loc = EvalLoc(n.children[0]);
        return IncDec(loc, n.text == "++" ? 1 : -1, true, n);
      }
      case NodeKind::kBinaryOp: {
        if (n.text == "&&" || n.text == "||") {
          bool lhs = Decide(Eval(n.children[0]), n.children[0]);
          if (n.text == "&&" && !lhs) return BoolValue(false);
          if (n.text == "||" && lhs) return BoolValue(true);
          return BoolValue(Decide(Eval(n.children[1]), n.children[1]));
        }
        Value a = Eval(n.children[0]);
        Value b = Eval(n.children[1]);
        return BinOp(n.text, a, b, n);
      }
      case NodeKind::kAssign:
        return EvalAssign(n);
      case NodeKind::kConditional:
        return Decide(Eval(n.children[0]), n.children[0]) ? Eval(n.children[1])
                                                           : Eval(n.children[2]);
      case NodeKind::kCast: {
        TypeRef t = prog_.Resolve(n.type, n.decl);
        if (t->kind == CType::Kind::kVoid) return Value::Unknown(t);
        return Convert(Eval(n.children[0]), t, n);
      }
      case NodeKind::kSizeofExpr:
        return Value::Integer(LinExpr::Const(static_cast<Int>(prog_.SizeOf(StaticType(n.children[0])))),
                              ULongT());
      case NodeKind::kSizeofType:
        return Value::Integer(
            LinExpr::Const(static_cast<Int>(prog_.SizeOf(prog_.Resolve(n.type, n.decl)))), ULongT());
      case NodeKind::kCall:
        return EvalCall(n);
      case NodeKind::kComma:
        Eval(n.children[0]);
        return Eval(n.children[1]);
      default:
        Fail("unsupported expression: " + prog_.Text(n.span), n);
    }
  }

  Value EvalIdentifier(const Node& n) {
    if (auto loc = LookupVar(n.text)) {
      if (assert_context_ && global_ints_.count(loc->path) && loc->path == n.text) {
        return Value::Integer(LinExpr::Var(n.text), loc->type);
      }
      return Read(*loc);
    }
    if (prog_.Function(n.text) || prog_.Prototype(n.text)) {
      Value v;
      v.kind = Value::Kind::kFunc;
      v.type = PtrTo(FuncT());
      v.base = n.text;
      return v;
    }
    if (auto e = prog_.Enumerator(n.text)) return Value::Integer(LinExpr::Const(*e), IntT());
    if (const Node* body = prog_.ExprDefine(n.text)) {
      if (expanding_.count(n.text)) Fail("recursive macro '" + n.text + "'", n);
      expanding_.insert(n.text);
      Value v = Eval(*body);
      expanding_.erase(n.text);
      return v;
    }
    if (n.text == "NULL") return Value::Null(PtrTo(VoidT()));
    if (n.text == "true") return BoolValue(true);
    if (n.text == "false") return BoolValue(false);
    Fail("undeclared identifier '" + n.text + "'", n);
  }

  Value EvalUnary(const Node& n) {
    const std::string& op = n.text;
    if (op == "&") {
      const Node& operand = n.children[0];
      if (operand.kind == NodeKind::kIdentifier && !LookupVar(operand.text) &&
          (prog_.Function(operand.text) || prog_.Prototype(operand.text))) {
        return EvalIdentifier(operand);
      }
      return AddrOf(EvalLoc(operand), n);
    }
    if (op == "*") return Read(EvalLoc(n));
    if (op == "++" || op == "--") {
      return IncDec(EvalLoc(n.children[0]), op == "++" ? 1 : -1, false, n);
    }
    Value v = Eval(n.children[0]);
    if (op == "!") {
      if (v.kind == Value::Kind::kCond) {
        Value r = v;
        r.cond = Cond::Not(v.cond);
        return r;
      }
      if (v.kind == Value::Kind::kInt && !v.e.IsConstant()) {
        Value r;
        r.kind = Value::Kind::kCond;
        r.type = IntT();
        r.cond = Cond::Cmp(v.e, CmpOp::kEq, LinExpr::Const(0));
        return r;
      }
      if (v.kind == Value::Kind::kUnknown) return Value::Unknown(IntT());
      return BoolValue(!Decide(v, n));
    }
    v = AsInt(v, n);
    if (v.kind == Value::Kind::kUnknown) return Value::Unknown(IntT());
    if (v.kind != Value::Kind::kInt) Fail("operator '" + op + "' on a non-integer", n);
    v = Promote(v);
    if (op == "-") return Materialize(v.e * -1, v.type);
    if (op == "+") return v;
    if (op == "~") return Materialize(v.e * -1 - LinExpr::Const(1), v.type);
    Fail("unsupported operator '" + op + "'", n);
  }

  Value IncDec(const Loc& loc, int delta, bool post, const Node& where) {
    Value old = Read(loc);
    Value one = Value::Integer(LinExpr::Const(delta), IntT());
    Value next = old.kind == Value::Kind::kPtr ? PtrAdd(old, one, 1, where)
                                               : BinOp("+", old, one, where);
    next = Convert(next, loc.type, where);
    Write(loc, next, where);
    return post ? old : next;
  }

  Value EvalAssign(const Node& n) {
    Loc loc = EvalLoc(n.children[0]);
    Value rhs = Eval(n.children[1]);
    if (n.text != "=") {
      std::string op = n.text.substr(0, n.text.size() - 1);
      Value old = Read(loc);
      if (old.kind == Value::Kind::kPtr && (op == "+" || op == "-")) {
        rhs = PtrAdd(old, AsInt(rhs, n), op == "+" ? 1 : -1, n);
      } else {
        rhs = BinOp(op, old, rhs, n);
      }
    }
    Value v = Convert(rhs, loc.type, n);
    Write(loc, v, n);
    return v;
  }

  // Condition of klee_assume/klee_assert, built without forking.
  Cond EvalCond(const Node& n) {
    if (n.kind == NodeKind::kBinaryOp && (n.text == "&&" || n.text == "||")) {
      std::vector<Cond> parts = {EvalCond(n.children[0]), EvalCond(n.children[1])};
      return n.text == "&&" ? Cond::And(std::move(parts)) : Cond::Or(std::move(parts));
    }
    if (n.kind == NodeKind::kUnaryOp && n.text == "!") return Cond::Not(EvalCond(n.children[0]));
    if (n.kind == NodeKind::kStringLiteral) return Cond::True();
    Value v = Eval(n);
    switch (v.kind) {
      case Value::Kind::kCond:
        return v.cond;
      case Value::Kind::kInt:
        return Cond::Cmp(v.e, CmpOp::kNe, LinExpr::Const(0));
      case Value::Kind::kPtr:
        if (v.base.empty() && v.offset.IsConstant()) {
          return Cond::Cmp(LinExpr::Const(v.offset.constant), CmpOp::kNe, LinExpr::Const(0));
        }
        return Cond::True();
      default:
        Fail("condition over an unmodeled value: " + prog_.Text(n.span), n);
    }
  }

  static bool ConstantTruth(const Cond& c, bool* value) {
    switch (c.kind) {
      case Cond::Kind::kCmp:
        if (!c.lhs.IsConstant() || !c.rhs.IsConstant()) return false;
        *value = ir::EvalCmp(c.lhs.constant, c.op, c.rhs.constant);
        return true;
      case Cond::Kind::kNot: {
        bool inner;
        if (!ConstantTruth(c.operands[0], &inner)) return false;
        *value = !inner;
        return true;
      }
      case Cond::Kind::kAnd: {
        bool all = true;
        for (const Cond& o : c.operands) {
          bool v;
          if (!ConstantTruth(o, &v)) return false;
          all = all && v;
        }
        *value = all;
        return true;
      }
    }
    return false;
  }

  // ------------------------------------------------------------ calls
  Value EvalCall(const Node& n) {
    std::string name = n.text;
    if (name.empty() || LookupVar(name)) {
      Value callee = Eval(n.children[0]);
      if (callee.kind != Value::Kind::kFunc) Fail("call through an unmodeled pointer", n);
      name = callee.base;
    }
    std::vector<const Node*> args;
    for (size_t i = 1; i < n.children.size(); ++i) args.push_back(&n.children[i]);

    if (name == "klee_make_symbolic") return MakeSymbolic(n, args);
    if (name == "klee_assume") {
      if (args.size() != 1) Fail("klee_assume takes one argument", n);
      Cond c = EvalCond(*args[0]);
      bool value;
      if (ConstantTruth(c, &value)) {
        if (!value) throw PathEnd{};
        return Value::Unknown(VoidT());
      }
      out.push_back(Stmt::Assume(std::move(c)));
      out.back().span = n.span;
      out.back().text = prog_.Text(n.span);
      return Value::Unknown(VoidT());
    }
    if (name == "klee_assert") {
      if (args.size() != 1) Fail("klee_assert takes one argument", n);
      assert_context_ = true;
      Cond c = EvalCond(*args[0]);
      assert_context_ = false;
      std::string message;
      cparse::Walk(*args[0], [&](const Node& x) {
        if (x.kind == NodeKind::kStringLiteral && message.empty()) message = Unquote(x.raw);
        return true;
      });
      if (message.empty()) message = prog_.Text(args[0]->span);
      out.push_back(Stmt::Assert(std::move(c), prog_.AssertSite(&n), message));
      out.back().span = n.span;
      out.back().text = prog_.Text(n.span);
      return Value::Unknown(VoidT());
    }
    if (name == "klee_silent_exit" || name == "abort" || name == "exit" || name == "_exit") {
      throw PathEnd{};
    }
    if (prog_.IsSink(name)) {
      out.push_back(Stmt::NoOp(prog_.Text(n.span)));
      out.back().span = n.span;
      out.back().text = name;
      return Value::Unknown(PtrTo(VoidT()));
    }
    if (const Node* fn = prog_.Function(name)) {
      std::vector<Value> values;
      for (const Node* a : args) values.push_back(Eval(*a));
      return Inline(*fn, std::move(values), n);
    }
    if (name == "TEE_Panic") throw PathEnd{};
    // Undefined function: behaves like a stub that returns zero.
    if (const Node* proto = prog_.Prototype(name)) {
      return Zero(prog_.Resolve(proto->type, proto->decl));
    }
    return Value::Integer(LinExpr::Const(0), IntT());
  }

  Value MakeSymbolic(const Node& n, const std::vector<const Node*>& args) {
    if (args.size() != 3) Fail("klee_make_symbolic takes three arguments", n);
    Value p = Eval(*args[0]);
    if (p.kind != Value::Kind::kPtr || p.base.empty()) {
      Fail("klee_make_symbolic needs the address of an object", n);
    }
    Loc loc = Deref(p, n);
    if (!loc.type->IsInt() || !loc.havoc_root.empty()) {
      Fail("klee_make_symbolic on a non-scalar object is not modeled", n);
    }
    if (args[2]->kind != NodeKind::kStringLiteral) {
      Fail("klee_make_symbolic needs a string literal name", n);
    }
    std::string name;
    for (char c : Unquote(args[2]->raw)) {
      name += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    }
    if (name.empty()) name = "sym";
    for (const ir::SymDecl& d : decls) {
      if (d.name == name) Fail("symbol '" + name + "' declared twice", n);
    }
    if (global_ints_.count(name)) Fail("symbol '" + name + "' shadows a global", n);
    decls.push_back({name, loc.type->width});
    Value raw = Value::Integer(LinExpr::Var(name), IntOf(loc.type->width, false));
    Write(loc, ConvertInt(raw, loc.type), n);
    return Value::Unknown(VoidT());
  }

  Value Inline(const Node& fn, std::vector<Value> args, const Node& call) {
    if (static_cast<int>(frames_.size()) >= cfg_.max_call_depth) {
      Fail("call depth exceeds " + std::to_string(cfg_.max_call_depth), call);
    }
    Frame frame;
    frame.fn = &fn;
    frame.ret_type = prog_.Resolve(fn.type, fn.decl);
    frame.scopes.emplace_back();
    frames_.push_back(std::move(frame));
    std::vector<const Node*> params = fn.Params();
    for (size_t i = 0; i < params.size(); ++i) {
      const Node& p = *params[i];
      TypeRef t = prog_.Resolve(p.type, p.decl, true);
      if (t->kind == CType::Kind::kVoid) continue;
      Loc loc = NewObject(p.text.empty() ? "arg" + std::to_string(i) : p.text, t, false);
      if (i < args.size()) Write(loc, Convert(args[i], t, call), call);
    }
    ExecStmt(*fn.Body());
    Value result = frames_.back().ret.value_or(Value::Unknown(frames_.back().ret_type));
    bool called_from_main = frames_.size() == 2;
    frames_.pop_back();
    if (called_from_main && result.kind == Value::Kind::kInt) {
      out.push_back(Stmt::Return(result.e));
      out.back().span = call.span;
    }
    return result;
  }

  // ------------------------------------------------------------ statements
  void DeclareLocal(const Node& d) {
    TypeRef t = prog_.Resolve(d.type, d.decl);
    if (d.type.HasSpecifier("extern")) return;
    if (d.type.HasSpecifier("static")) {
      std::string path = "static:" + frames_.back().fn->text + "::" + d.text;
      bool fresh = !objects_.count(path);
      if (fresh) objects_[path] = Object{t, true};
      frames_.back().scopes.back()[d.text] = path;
      if (fresh && d.Init()) ApplyInit(Loc{path, t, {}}, *d.Init());
      return;
    }
    if (t->kind == CType::Kind::kArray && t->count == 0 && d.Init() &&
        d.Init()->kind == NodeKind::kInitList) {
      t = ArrayOf(t->elem, d.Init()->children.size());
    }
    Loc loc = NewObject(d.text, t, false);
    if (const Node* init = d.Init()) ApplyInit(loc, *init);
  }

  void CountIteration(int* iterations, const Node& loop) {
    if (++*iterations > cfg_.unroll_limit) {
      Fail("loop not unrollable within " + std::to_string(cfg_.unroll_limit) + " iterations",
           loop);
    }
  }

  Flow ExecLoopBody(const Node& body) {
    Flow f = ExecStmt(body);
    return f;
  }

  Flow ExecStmt(const Node& s) {
    switch (s.kind) {
      case NodeKind::kBlock: {
        frames_.back().scopes.emplace_back();
        for (const Node& c : s.children) {
          Flow f = ExecStmt(c);
          if (f != Flow::kNext) {
            frames_.back().scopes.pop_back();
            return f;
          }
        }
        frames_.back().scopes.pop_back();
        return Flow::kNext;
      }
      case NodeKind::kVarDecl:
        DeclareLocal(s);
        return Flow::kNext;
      case NodeKind::kTypedef:
      case NodeKind::kRecordDecl:
      case NodeKind::kEnumDecl:
      case NodeKind::kEmpty:
        return Flow::kNext;
      case NodeKind::kExprStmt:
        Eval(s.children[0]);
        return Flow::kNext;
      case NodeKind::kIf: {
        bool taken = Decide(Eval(s.children[0]), s.children[0]);
        if (taken) return ExecStmt(s.children[1]);
        if (s.children.size() > 2) return ExecStmt(s.children[2]);
        return Flow::kNext;
      }
      case NodeKind::kWhile: {
        int iterations = 0;
        while (Decide(Eval(s.children[0]), s.children[0])) {
          CountIteration(&iterations, s);
          Flow f = ExecLoopBody(s.children[1]);
          if (f == Flow::kBreak) break;
          if (f == Flow::kReturn) return f;
        }
        return Flow::kNext;
      }
      case NodeKind::kDoWhile: {
        int iterations = 0;
        do {
          CountIteration(&iterations, s);
          Flow f = ExecLoopBody(s.children[0]);
          if (f == Flow::kBreak) break;
          if (f == Flow::kReturn) return f;
        } while (Decide(Eval(s.children[1]), s.children[1]));
        return Flow::kNext;
      }
      case NodeKind::kFor: {
        frames_.back().scopes.emplace_back();
        const Node& init = s.children[0];
        if (init.kind == NodeKind::kVarDecl) {
          DeclareLocal(init);
        } else if (init.kind == NodeKind::kBlock) {
          for (const Node& c : init.children) ExecStmt(c);
        } else if (init.kind == NodeKind::kExprStmt) {
          ExecStmt(init);
        } else if (init.kind != NodeKind::kEmpty) {
          Eval(init);
        }
        int iterations = 0;
        Flow result = Flow::kNext;
        while (true) {
          const Node& cond = s.children[1];
          if (cond.kind != NodeKind::kEmpty && !Decide(Eval(cond), cond)) break;
          CountIteration(&iterations, s);
          Flow f = ExecLoopBody(s.children[3]);
          if (f == Flow::kBreak) break;
          if (f == Flow::kReturn) {
            result = f;
            break;
          }
          const Node& step = s.children[2];
          if (step.kind == NodeKind::kExprStmt) {
            ExecStmt(step);
          } else if (step.kind != NodeKind::kEmpty) {
            Eval(step);
          }
        }
        frames_.back().scopes.pop_back();
        return result;
      }
      case NodeKind::kReturn: {
        Frame& fr = frames_.back();
        if (!s.children.empty()) {
          Value v = Eval(s.children[0]);
          fr.ret = fr.ret_type->kind == CType::Kind::kVoid ? Value::Unknown(fr.ret_type)
                                                             : Convert(v, fr.ret_type, s);
        }
        return Flow::kReturn;
      }
      case NodeKind::kBreak:
        return Flow::kBreak;
      case NodeKind::kContinue:
        return Flow::kContinue;
      case NodeKind::kOpaque: {
        std::string first = s.raw.substr(0, s.raw.find('\n'));
        Fail("unsupported construct '" + first + "'", s);
      }
      default:
        Fail("unsupported statement: " + prog_.Text(s.span), s);
    }
  }

  const Program& prog_;
  const LoweringConfig& cfg_;
  const std::vector<bool>& prefix_;
  size_t decision_ = 0;
  int next_object_ = 0;
  int next_temp_ = 0;
  bool initializing_ = false;
  bool assert_context_ = false;
  std::map<std::string, Object> objects_;
  std::map<std::string, Value> store_;
  std::set<std::string> havoc_;
  std::set<std::string> global_ints_;
  std::set<std::string> expanding_;
  std::vector<Frame> frames_;
};

class TreeBuilder {
 public:
  explicit TreeBuilder(const Program& prog) : prog_(prog) {}

  std::vector<Stmt> Build(std::vector<bool>* prefix, size_t skip) {
    Interp interp(prog_, *prefix);
    try {
      interp.Run();
    } catch (NeedDecision& d) {
      Merge(interp.decls);
      std::vector<Stmt> out(interp.out.begin() + static_cast<std::ptrdiff_t>(skip),
                            interp.out.end());
      size_t n = interp.out.size();
      prefix->push_back(true);
      std::vector<Stmt> then_body = Build(prefix, n);
      prefix->back() = false;
      std::vector<Stmt> else_body = Build(prefix, n);
      prefix->pop_back();
      Stmt s = Stmt::If(std::move(d.cond), std::move(then_body), std::move(else_body));
      s.span = d.span;
      s.text = d.text;
      s.site = d.site;
      out.push_back(std::move(s));
      return out;
    }
    if (++leaves_ > prog_.config().max_paths) {
      throw LoweringError("harness has more than " + std::to_string(prog_.config().max_paths) +
                          " paths");
    }
    Merge(interp.decls);
    return std::vector<Stmt>(interp.out.begin() + static_cast<std::ptrdiff_t>(skip),
                             interp.out.end());
  }

  std::vector<ir::SymDecl> decls;

 private:
  void Merge(const std::vector<ir::SymDecl>& found) {
    for (const ir::SymDecl& d : found) {
      auto it = std::find_if(decls.begin(), decls.end(),
                             [&](const ir::SymDecl& x) { return x.name == d.name; });
      if (it == decls.end()) {
        decls.push_back(d);
      } else if (it->width != d.width) {
        throw LoweringError("symbol '" + d.name + "' declared with two widths");
      }
    }
  }

  const Program& prog_;
  std::size_t leaves_ = 0;
};

}  // namespace

ir::HarnessIR LowerUnit(const cparse::TranslationUnit& unit, const LoweringConfig& config) {
  Program prog(unit, config);
  TreeBuilder builder(prog);
  std::vector<bool> prefix;
  ir::HarnessIR ir;
  ir.body = builder.Build(&prefix, 0);
  ir.decls = builder.decls;
  ir.assert_sites = prog.assert_text();
  try {
    ir::Validate(ir);
  } catch (const ir::ValidationError& e) {
    throw LoweringError(std::string("lowered IR is invalid: ") + e.what());
  }
  return ir;
}

ir::HarnessIR LiftSourceToHir(std::string_view harness_source, const LoweringConfig& config) {
  cparse::TranslationUnit unit = cparse::ParseUnit(harness_source, "harness.c");
  return LowerUnit(unit, config);
}

}  // namespace symtee::harness
