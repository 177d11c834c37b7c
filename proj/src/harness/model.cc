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


#include "symtee/harness/harness.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>

#include "symtee/cparse/parser.h"
#include "type_names.h"

namespace symtee::harness {
namespace {

using cparse::Node;
using cparse::NodeKind;
using internal::IsIntegerWords;
using internal::StripQualifiers;
using slicer::LengthOrigin;

constexpr char kIndent[] = "    ";

std::string U(std::uint64_t v) { return std::to_string(v) + "UL"; }

bool Contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Picks `base`, or `base_in`, `base_in2`, ... avoiding `taken`.
std::string Fresh(const std::string& base, std::set<std::string>* taken) {
  std::string name = base;
  for (int i = 1; taken->count(name); ++i) {
    name = base + "_in" + (i > 1 ? std::to_string(i) : "");
  }
  taken->insert(name);
  return name;
}

// ------------------------------------------------------------ stub tables

const std::vector<std::pair<std::string, std::string>>& TypeStubTable() {
  static const std::vector<std::pair<std::string, std::string>> kTable = {
      {"TEE_Result", "typedef uint32_t TEE_Result;"},
      {"TEE_Param",
       "typedef union {\n"
       "    struct {\n"
       "        void *buffer;\n"
       "        unsigned long size;\n"
       "    } memref;\n"
       "    struct {\n"
       "        unsigned int a;\n"
       "        unsigned int b;\n"
       "    } value;\n"
       "} TEE_Param;"},
      {"TEE_ObjectHandle", "typedef void *TEE_ObjectHandle;"},
      {"TEE_OperationHandle", "typedef void *TEE_OperationHandle;"},
      {"TEE_TASessionHandle", "typedef void *TEE_TASessionHandle;"},
      {"TEE_PropSetHandle", "typedef void *TEE_PropSetHandle;"},
      {"TEE_ObjectEnumHandle", "typedef void *TEE_ObjectEnumHandle;"},
      {"TEE_UUID",
       "typedef struct {\n"
       "    uint32_t timeLow;\n"
       "    uint16_t timeMid;\n"
       "    uint16_t timeHiAndVersion;\n"
       "    uint8_t clockSeqAndNode[8];\n"
       "} TEE_UUID;"},
      {"TEE_Identity",
       "typedef struct {\n"
       "    uint32_t login;\n"
       "    TEE_UUID uuid;\n"
       "} TEE_Identity;"},
      {"TEE_Time",
       "typedef struct {\n"
       "    uint32_t seconds;\n"
       "    uint32_t millis;\n"
       "} TEE_Time;"},
      {"TEE_Attribute",
       "typedef struct {\n"
       "    uint32_t attributeID;\n"
       "    union {\n"
       "        struct {\n"
       "            void *buffer;\n"
       "            uint32_t length;\n"
       "        } ref;\n"
       "        struct {\n"
       "            uint32_t a;\n"
       "            uint32_t b;\n"
       "        } value;\n"
       "    } content;\n"
       "} TEE_Attribute;"},
      {"TEE_ObjectInfo",
       "typedef struct {\n"
       "    uint32_t objectType;\n"
       "    uint32_t objectSize;\n"
       "    uint32_t maxObjectSize;\n"
       "    uint32_t objectUsage;\n"
       "    uint32_t dataSize;\n"
       "    uint32_t dataPosition;\n"
       "    uint32_t handleFlags;\n"
       "} TEE_ObjectInfo;"},
      {"TEE_OperationInfo",
       "typedef struct {\n"
       "    uint32_t algorithm;\n"
       "    uint32_t operationClass;\n"
       "    uint32_t mode;\n"
       "    uint32_t digestLength;\n"
       "    uint32_t maxKeySize;\n"
       "    uint32_t keySize;\n"
       "    uint32_t requiredKeyUsage;\n"
       "    uint32_t handleState;\n"
       "} TEE_OperationInfo;"},
      {"ssize_t", "typedef long ssize_t;"},
  };
  return kTable;
}

std::string FunctionStubText(const std::string& name) {
  static const std::map<std::string, std::string> kKnown = {
      {"TEE_MemMove",
       "void TEE_MemMove(void *dest, const void *src, size_t n) {\n"
       "    (void)dest;\n"
       "    (void)src;\n"
       "    (void)n;\n"
       "    /* no-op: buffer contents are not modeled */\n"
       "}"},
      {"memcpy",
       "void *memcpy(void *dest, const void *src, size_t n) {\n"
       "    (void)src;\n"
       "    (void)n;\n"
       "    return dest;\n"
       "}"},
      {"memmove",
       "void *memmove(void *dest, const void *src, size_t n) {\n"
       "    (void)src;\n"
       "    (void)n;\n"
       "    return dest;\n"
       "}"},
      {"memset",
       "void *memset(void *dest, int c, size_t n) {\n"
       "    (void)c;\n"
       "    (void)n;\n"
       "    return dest;\n"
       "}"},
      {"TEE_MemFill",
       "void TEE_MemFill(void *buffer, uint32_t x, size_t size) {\n"
       "    (void)buffer;\n"
       "    (void)x;\n"
       "    (void)size;\n"
       "}"},
      {"TEE_MemCompare",
       "int32_t TEE_MemCompare(const void *a, const void *b, size_t size) {\n"
       "    (void)a;\n"
       "    (void)b;\n"
       "    (void)size;\n"
       "    return 0;\n"
       "}"},
      {"TEE_Malloc",
       "void *TEE_Malloc(size_t size, uint32_t hint) {\n"
       "    static char pool[4096];\n"
       "    (void)size;\n"
       "    (void)hint;\n"
       "    return pool;\n"
       "}"},
      {"TEE_Free",
       "void TEE_Free(void *buffer) {\n"
       "    (void)buffer;\n"
       "}"},
      {"TEE_Panic",
       "void TEE_Panic(TEE_Result code) {\n"
       "    (void)code;\n"
       "    klee_silent_exit(0);\n"
       "}"},
      {"TEE_PARAM_TYPES",
       "uint32_t TEE_PARAM_TYPES(uint32_t t0, uint32_t t1, uint32_t t2, uint32_t t3) {\n"
       "    (void)t0;\n"
       "    (void)t1;\n"
       "    (void)t2;\n"
       "    (void)t3;\n"
       "    return 0;\n"
       "}"},
      {"TEE_PARAM_TYPE_GET",
       "uint32_t TEE_PARAM_TYPE_GET(uint32_t t, uint32_t i) {\n"
       "    (void)t;\n"
       "    (void)i;\n"
       "    return 0;\n"
       "}"},
  };
  if (auto it = kKnown.find(name); it != kKnown.end()) return it->second;
  return "int " + name + "() {\n    return 0;\n}";
}

// Types a stub body mentions, so that they get stubbed as well.
std::vector<std::string> StubTypeDependencies(const std::string& name) {
  if (name == "TEE_Panic") return {"TEE_Result"};
  if (name == "TEE_Identity") return {"TEE_UUID"};
  return {};
}

bool IsEngineIntrinsic(const std::string& name) {
  return name == "klee_make_symbolic" || name == "klee_assume" || name == "klee_assert" ||
         name == "klee_silent_exit" || name == "__assert_fail";
}

bool IsBuiltinTypeName(const std::string& base) {
  return base.empty() || base == "void" || base == "float" || base == "double" ||
         base == "long double" || IsIntegerWords(base) || base == "struct" ||
         base == "union" || base.rfind("struct ", 0) == 0 || base.rfind("union ", 0) == 0 ||
         base.rfind("enum", 0) == 0;
}

// Names visible without a stub through the standard headers the harness
// includes.
bool ProvidedByHeaders(const std::string& name) {
  return name == "NULL" || name == "true" || name == "false" || name == "bool" ||
         (name != "ssize_t" && internal::WellKnownIntType(name).has_value() &&
          name != "TEE_Result");
}

// ------------------------------------------------------------ slice facts

struct SliceNames {
  std::set<std::string> defined;    // file-scope names in the slice
  std::set<std::string> locals;     // parameters and locals of the function
  std::set<std::string> callees;    // called identifiers
  std::set<std::string> values;     // identifiers used as values
  std::set<std::string> types;      // base type spellings
  std::map<std::string, const Node*> typedefs;
};

void CollectTypes(const Node& n, std::set<std::string>* types) {
  cparse::Walk(n, [&](const Node& x) {
    if (!x.type.base.empty()) types->insert(StripQualifiers(x.type.base));
    for (const Node& p : x.decl.fn_params) CollectTypes(p, types);
    return true;
  });
}

SliceNames CollectSliceNames(const cparse::TranslationUnit& unit) {
  SliceNames names;
  for (const Node& item : unit.items) {
    switch (item.kind) {
      case NodeKind::kTypedef:
        names.defined.insert(item.text);
        names.typedefs[item.text] = &item;
        break;
      case NodeKind::kDefine:
      case NodeKind::kVarDecl:
        names.defined.insert(item.text);
        break;
      case NodeKind::kFunctionDef:
        names.defined.insert(item.text);
        if (item.Body()) {
          for (const Node* p : item.Params()) names.locals.insert(p->text);
          cparse::Walk(*item.Body(), [&](const Node& x) {
            if (x.kind == NodeKind::kVarDecl) names.locals.insert(x.text);
            return true;
          });
        }
        break;
      default:
        break;
    }
    cparse::Walk(item, [&](const Node& x) {
      if (x.kind == NodeKind::kEnumerator) names.defined.insert(x.text);
      if (x.kind == NodeKind::kCall && !x.text.empty()) names.callees.insert(x.text);
      return true;
    });
    CollectTypes(item, &names.types);
  }
  for (const Node& item : unit.items) {
    cparse::Walk(item, [&](const Node& x) {
      if (x.kind == NodeKind::kCall && !x.text.empty()) {
        // The callee identifier is the first child; arguments are visited
        // on their own.
        for (size_t i = 1; i < x.children.size(); ++i) {
          cparse::Walk(x.children[i], [&](const Node& y) {
            if (y.kind == NodeKind::kIdentifier) names.values.insert(y.text);
            return true;
          });
        }
        return false;
      }
      if (x.kind == NodeKind::kIdentifier) names.values.insert(x.text);
      return true;
    });
  }
  return names;
}

// Integer width/signedness of a base type spelling, following the slice's
// typedefs.
std::optional<std::pair<int, bool>> IntTypeOf(const std::string& spelled,
                                              const SliceNames& names, int depth = 0) {
  std::string base = StripQualifiers(spelled);
  if (base == "_Bool") return std::make_pair(8, false);
  if (IsIntegerWords(base)) {
    return std::make_pair(static_cast<int>(cparse::ScalarByteSize(base) * 8),
                          cparse::IsSignedBase(base));
  }
  if (base.rfind("enum", 0) == 0) return std::make_pair(32, true);
  if (auto it = names.typedefs.find(base); it != names.typedefs.end() && depth < 16) {
    const Node& td = *it->second;
    if (td.decl.pointer_depth() > 0 || !td.decl.dims.empty() || td.decl.fn_ptr) return std::nullopt;
    if (!td.type.body.empty()) {
      if (td.type.body[0].kind == NodeKind::kEnumDecl) return std::make_pair(32, true);
      return std::nullopt;
    }
    return IntTypeOf(td.type.base, names, depth + 1);
  }
  return internal::WellKnownIntType(base);
}

bool IsPointerLikeTypedef(const std::string& spelled, const SliceNames& names) {
  std::string base = StripQualifiers(spelled);
  if (internal::IsTeeHandleType(base)) return true;
  auto it = names.typedefs.find(base);
  return it != names.typedefs.end() && it->second->decl.pointer_depth() > 0;
}

bool IsByteLike(const std::string& spelled, const SliceNames& names) {
  std::string base = StripQualifiers(spelled);
  if (base == "void") return true;
  auto t = IntTypeOf(base, names);
  return t && t->first == 8;
}

// Declaration text "T name[dims]" for a parameter-derived local.
std::string DeclText(const cparse::TypeSpec& type, cparse::Declarator decl,
                     const std::string& name) {
  Node v;
  v.kind = NodeKind::kVarDecl;
  v.text = name;
  v.type = type;
  v.type.specifiers.erase(
      std::remove_if(v.type.specifiers.begin(), v.type.specifiers.end(),
                     [](const std::string& s) {
                       return s == "const" || s == "static" || s == "extern" ||
                              s == "register" || s == "inline";
                     }),
      v.type.specifiers.end());
  v.type.base = StripQualifiers(v.type.base);
  for (std::string& q : decl.pointer_quals) q.clear();
  decl.name = name;
  v.decl = std::move(decl);
  std::string text = cparse::PrintStatement(v);
  if (!text.empty() && text.back() == ';') text.pop_back();
  return text;
}

Node IntLiteral(std::uint64_t v) {
  Node n;
  n.kind = NodeKind::kIntLiteral;
  n.text = std::to_string(v);
  n.int_value = v;
  return n;
}

// Statement-level nodes for instrumentation placement.
bool IsStatement(const Node& n) {
  switch (n.kind) {
    case NodeKind::kBlock:
    case NodeKind::kIf:
    case NodeKind::kWhile:
    case NodeKind::kDoWhile:
    case NodeKind::kFor:
    case NodeKind::kReturn:
    case NodeKind::kExprStmt:
    case NodeKind::kVarDecl:
      return true;
    default:
      return false;
  }
}

// Text of a constant-looking returned expression, e.g. TEE_ERROR_SHORT_BUFFER.
std::optional<std::string> ReturnedConstant(const Node& stmt) {
  std::optional<std::string> found;
  cparse::Walk(stmt, [&](const Node& n) {
    if (found) return false;
    if (n.kind == NodeKind::kReturn && !n.children.empty()) {
      const Node& e = n.children[0];
      if (e.kind == NodeKind::kIdentifier ||
          (e.kind == NodeKind::kIntLiteral && e.Has(cparse::kFlagFromMacro))) {
        found = e.text;
      }
    }
    return true;
  });
  return found;
}

bool IsErrorName(const std::string& s) { return s.rfind("TEE_ERROR_", 0) == 0; }

struct Edit {
  std::uint32_t offset;
  std::string text;
};

std::string ApplyEdits(std::string text, std::vector<Edit> edits, std::uint32_t base) {
  std::stable_sort(edits.begin(), edits.end(),
                   [](const Edit& a, const Edit& b) { return a.offset > b.offset; });
  for (const Edit& e : edits) {
    std::uint32_t at = e.offset - base;
    if (e.offset < base || at > text.size()) continue;
    text.insert(at, e.text);
  }
  return text;
}

// Inserts `code` in front of statement `s`, bracing it when its parent is
// not a block.
void InsertBefore(const Node& s, const Node* parent, const std::string& code,
                  std::vector<Edit>* edits) {
  if (parent != nullptr && parent->kind != NodeKind::kBlock) {
    edits->push_back({s.span.start_byte, "{ " + code + " "});
    edits->push_back({s.span.end_byte, " }"});
  } else {
    edits->push_back({s.span.start_byte, code + " "});
  }
}

// Makes `branch` set the flag before it exits.
void InstrumentBranch(const Node& branch, std::vector<Edit>* edits) {
  std::string code = std::string(kFlagName) + " = 1;";
  if (branch.kind == NodeKind::kBlock) {
    edits->push_back({branch.span.start_byte + 1, " " + code});
  } else {
    edits->push_back({branch.span.start_byte, "{ " + code + " "});
    edits->push_back({branch.span.end_byte, " }"});
  }
}

}  // namespace

std::string StubKindName(StubKind kind) {
  switch (kind) {
    case StubKind::kNoOpFunction: return "NoOpFunction";
    case StubKind::kTypeDecl: return "TypeDecl";
    case StubKind::kFlagGlobal: return "FlagGlobal";
    case StubKind::kConstantMacro: return "ConstantMacro";
  }
  return "?";
}

std::string OracleKindName(OracleSpec::Kind kind) {
  return kind == OracleSpec::Kind::kReturnValue ? "return_value" : "flag";
}

bool OracleSpec::uses_copy_length() const { return trigger_lhs == kCopyLengthName; }

const Stub* HarnessModel::FindStub(const std::string& name) const {
  for (const Stub& s : stubs) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const std::vector<std::pair<std::string, std::uint32_t>>& TeeErrorConstants() {
  static const std::vector<std::pair<std::string, std::uint32_t>> kTable = {
      {"TEE_SUCCESS", 0x00000000},
      {"TEE_ERROR_GENERIC", 0xFFFF0000},
      {"TEE_ERROR_ACCESS_DENIED", 0xFFFF0001},
      {"TEE_ERROR_CANCEL", 0xFFFF0002},
      {"TEE_ERROR_ACCESS_CONFLICT", 0xFFFF0003},
      {"TEE_ERROR_EXCESS_DATA", 0xFFFF0004},
      {"TEE_ERROR_BAD_FORMAT", 0xFFFF0005},
      {"TEE_ERROR_BAD_PARAMETERS", 0xFFFF0006},
      {"TEE_ERROR_BAD_STATE", 0xFFFF0007},
      {"TEE_ERROR_ITEM_NOT_FOUND", 0xFFFF0008},
      {"TEE_ERROR_NOT_IMPLEMENTED", 0xFFFF0009},
      {"TEE_ERROR_NOT_SUPPORTED", 0xFFFF000A},
      {"TEE_ERROR_NO_DATA", 0xFFFF000B},
      {"TEE_ERROR_OUT_OF_MEMORY", 0xFFFF000C},
      {"TEE_ERROR_BUSY", 0xFFFF000D},
      {"TEE_ERROR_COMMUNICATION", 0xFFFF000E},
      {"TEE_ERROR_SECURITY", 0xFFFF000F},
      {"TEE_ERROR_SHORT_BUFFER", 0xFFFF0010},
      {"TEE_ERROR_OVERFLOW", 0xFFFF300F},
  };
  return kTable;
}

HarnessModel BuildModel(const slicer::Slice& slice, const HarnessConfig& config) {
  HarnessModel m;
  m.slice = slice;
  m.domain_bound = config.domain_bound;
  m.unroll_limit = config.unroll_limit;
  const slicer::SinkCandidate& cand = slice.origin;
  const Node& fn = *cand.function;
  const Node& call = *cand.call;
  const LengthOrigin& len = cand.length;
  m.function_name = fn.text;
  m.capacity_bytes = cand.capacity.fixed() ? cand.capacity.bytes : config.default_capacity;

  m.sink_names = {"TEE_MemMove", "memcpy", "memmove"};
  if (!Contains(m.sink_names, cand.spec.api_name)) m.sink_names.push_back(cand.spec.api_name);

  cparse::TranslationUnit sunit = cparse::ParseUnit(slice.Text(), "slice.c");
  SliceNames names = CollectSliceNames(sunit);

  std::set<std::string> taken = names.defined;
  taken.insert(names.locals.begin(), names.locals.end());
  taken.insert(names.values.begin(), names.values.end());
  taken.insert(names.callees.begin(), names.callees.end());
  for (const char* r : {"main", kFlagName, kCopyLengthName}) taken.insert(r);

  // ---------------------------------------------------------- length input
  std::vector<std::string> length_names = len.aliases;
  for (const std::string& v : len.chain_vars) length_names.push_back(v);
  if (!len.root_text.empty()) length_names.push_back(len.root_text);
  if (!len.expr_text.empty()) length_names.push_back(len.expr_text);

  bool from_param = len.has_param_root && (len.kind == LengthOrigin::Kind::kParamField ||
                                           len.kind == LengthOrigin::Kind::kLocalDerived);
  bool direct = len.kind == LengthOrigin::Kind::kParamField ||
                (len.kind == LengthOrigin::Kind::kLocalDerived && len.has_param_root &&
                 Contains(len.aliases, len.root_text));
  std::vector<const Node*> params = fn.Params();
  const Node* root_param = nullptr;
  if (from_param && len.param_position >= 0 &&
      len.param_position < static_cast<int>(params.size())) {
    root_param = params[static_cast<size_t>(len.param_position)];
  }
  bool scalar_root = root_param != nullptr && len.field_path.empty();

  SymbolicInput sym;
  if (root_param != nullptr) {
    if (scalar_root) {
      sym.name = root_param->text;
      sym.c_type = StripQualifiers(root_param->type.base);
      auto it = IntTypeOf(root_param->type.base, names);
      if (!it || root_param->decl.pointer_depth() > 0) {
        root_param = nullptr;  // not an integer; fall back to the copy length
        direct = false;
      } else {
        sym.width_bits = it->first;
        sym.is_signed = it->second;
      }
    } else {
      sym.name = Fresh(len.field_path.back(), &taken);
      sym.c_type = "unsigned long";
      sym.width_bits = 64;
      sym.is_signed = false;
    }
  }
  if (root_param != nullptr) {
    std::uint64_t max = sym.width_bits >= 64 ? UINT64_MAX : (std::uint64_t{1} << sym.width_bits) - 1;
    if (sym.is_signed) max >>= 1;
    sym.domain_upper_bound = std::min<std::uint64_t>(config.domain_bound, max);
    if (sym.is_signed) {
      m.assumptions.push_back({sym.name, ">=", 0, sym.name + " >= 0"});
      m.assumptions.push_back({sym.name, "<=", config.domain_bound,
                               sym.name + " <= " + std::to_string(config.domain_bound)});
    } else {
      m.assumptions.push_back({sym.name, "<=", config.domain_bound,
                               sym.name + " <= " + U(config.domain_bound)});
    }
    m.symbolic_inputs.push_back(sym);
  }

  // ---------------------------------------------------------- trigger
  std::vector<Edit> edits;
  m.oracle.capacity = m.capacity_bytes;
  if (len.kind == LengthOrigin::Kind::kConstant) {
    m.oracle.trigger_lhs = U(len.value);
    m.oracle.trigger = U(len.value) + " > " + U(m.capacity_bytes);
  } else if (direct && root_param != nullptr) {
    m.oracle.trigger_lhs = sym.name;
    m.oracle.trigger = sym.name + " > " +
                       (sym.is_signed ? std::to_string(m.capacity_bytes) : U(m.capacity_bytes));
  } else {
    m.oracle.trigger_lhs = kCopyLengthName;
    m.oracle.trigger = std::string(kCopyLengthName) + " > " + U(m.capacity_bytes);
    std::vector<const Node*> path = slicer::AncestorsOf(fn, call);
    size_t j = path.size();
    for (size_t i = 0; i < path.size(); ++i) {
      if (IsStatement(*path[i]) && path[i] != fn.Body()) j = i;
    }
    if (j < path.size()) {
      const Node* parent = j > 0 ? path[j - 1] : nullptr;
      InsertBefore(*path[j], parent,
                   std::string(kCopyLengthName) + " = (unsigned long)(" +
                       cparse::PrintExpr(call.children[1 + cand.spec.len_arg]) + ");",
                   &edits);
    }
    m.stubs.push_back({kCopyLengthName, StubKind::kFlagGlobal,
                       std::string("unsigned long ") + kCopyLengthName + " = 0;"});
  }

  // ---------------------------------------------------------- oracle
  bool returns_status = StripQualifiers(fn.type.base) == "TEE_Result" &&
                        fn.decl.pointer_depth() == 0;
  bool has_error_return = false;
  cparse::Walk(*fn.Body(), [&](const Node& n) {
    if (n.kind == NodeKind::kReturn) {
      if (auto c = ReturnedConstant(n); c && IsErrorName(*c)) has_error_return = true;
    }
    return true;
  });
  std::optional<std::string> expected;
  bool error_after_sink = false;
  std::vector<const Node*> flag_points;
  if (!length_names.empty() && len.kind != LengthOrigin::Kind::kConstant) {
    cparse::Walk(*fn.Body(), [&](const Node& n) {
      if (n.kind != NodeKind::kIf || !slicer::MentionsAny(n.children[0], length_names)) {
        return true;
      }
      bool before = n.span.start_byte < call.span.start_byte;
      for (size_t b = 1; b < n.children.size(); ++b) {
        const Node& branch = n.children[b];
        if (!slicer::IsEarlyExit(branch) || branch.span.Contains(call.span)) continue;
        std::optional<std::string> c = ReturnedConstant(branch);
        if (before) {
          flag_points.push_back(&branch);
          if (!expected && c && c != "TEE_SUCCESS") expected = c;
        } else if (c && IsErrorName(*c)) {
          error_after_sink = true;
        }
      }
      return true;
    });
  }
  if (returns_status && has_error_return && !error_after_sink) {
    m.oracle.kind = OracleSpec::Kind::kReturnValue;
    m.oracle.expected_error = expected.value_or("TEE_ERROR_BAD_PARAMETERS");
  } else {
    m.oracle.kind = OracleSpec::Kind::kFlag;
    m.oracle.flag_name = kFlagName;
    for (const Node* b : flag_points) InstrumentBranch(*b, &edits);
    m.stubs.push_back({kFlagName, StubKind::kFlagGlobal,
                       std::string("volatile int ") + kFlagName + " = 0;"});
  }
  m.instrumented_function = ApplyEdits(slice.function_text, edits, fn.span.start_byte);

  // ---------------------------------------------------------- main body
  std::set<std::string> main_taken = taken;
  for (const Node* p : params) main_taken.insert(p->text);
  std::string buf_name;
  std::vector<std::string> buffer_decls;
  std::vector<std::string> memref_setup;
  for (size_t i = 0; i < params.size(); ++i) {
    const Node& p = *params[i];
    std::string name = p.text.empty() ? Fresh("arg" + std::to_string(i), &main_taken) : p.text;
    const cparse::Declarator& d = p.decl;
    std::string base = StripQualifiers(p.type.base);
    if (d.fn_ptr) {
      m.call_args.push_back("0");
      continue;
    }
    m.call_args.push_back(name);
    if (scalar_root && &p == root_param) {
      m.main_decls.push_back(DeclText(p.type, d, name) + ";");
      continue;
    }
    cparse::Declarator local = d;
    std::string init = " = {0}";
    if (base == "TEE_Param" && (d.pointer_depth() > 0 || !d.dims.empty())) {
      local.pointer_quals.clear();
      local.dims.clear();
      local.dims.push_back(IntLiteral(4));
      // Memory references the function reads get a backing buffer. Sizes
      // other than the symbolic one stay zero like every other input.
      std::set<std::uint64_t> memrefs;
      cparse::Walk(*fn.Body(), [&](const Node& n) {
        if (n.kind == NodeKind::kMember && n.text == "memref" && !n.children.empty() &&
            n.children[0].kind == NodeKind::kIndex &&
            n.children[0].children[0].kind == NodeKind::kIdentifier &&
            n.children[0].children[0].text == p.text &&
            n.children[0].children[1].kind == NodeKind::kIntLiteral) {
          memrefs.insert(n.children[0].children[1].int_value);
        }
        return true;
      });
      for (std::uint64_t k : memrefs) {
        if (k >= 4) continue;
        std::string ref = name + "[" + std::to_string(k) + "].memref";
        bool is_root = &p == root_param && len.subscript == k &&
                       len.field_path == std::vector<std::string>{"memref", "size"};
        if (is_root) {
          buf_name = Fresh("buf", &main_taken);
          buffer_decls.push_back("char " + buf_name + "[" + std::to_string(config.domain_bound) + "];");
          memref_setup.push_back(ref + ".buffer = " + buf_name + ";");
        } else {
          std::string b = Fresh("buf" + std::to_string(k), &main_taken);
          buffer_decls.push_back("char " + b + "[" + std::to_string(config.domain_bound) + "];");
          memref_setup.push_back(ref + ".buffer = " + b + ";");
        }
      }
    } else if (d.pointer_depth() > 0) {
      local.pointer_quals.pop_back();
      std::uint64_t count = 16;
      cparse::TypeSpec type = p.type;
      if (local.pointer_quals.empty() && IsByteLike(p.type.base, names)) {
        count = config.domain_bound;
        if (base == "void") type.base = "char";
      }
      local.dims.insert(local.dims.begin(), IntLiteral(count));
      m.main_decls.push_back(DeclText(type, local, name) + init + ";");
      continue;
    } else if (!d.dims.empty()) {
      if (d.dims[0].kind == NodeKind::kEmpty) {
        local.dims[0] = IntLiteral(IsByteLike(p.type.base, names) ? config.domain_bound : 16);
      }
    } else if (IntTypeOf(p.type.base, names) || IsPointerLikeTypedef(p.type.base, names)) {
      init = " = 0";
    }
    m.main_decls.push_back(DeclText(p.type, local, name) + init + ";");
  }
  for (const std::string& b : buffer_decls) m.main_decls.push_back(b);
  m.result_name = Fresh("ret", &main_taken);
  if (root_param != nullptr && !scalar_root) {
    m.main_decls.push_back(sym.c_type + " " + sym.name + ";");
  }
  for (const std::string& s : memref_setup) m.main_setup.push_back(s);
  if (root_param != nullptr && !scalar_root) {
    m.main_setup.push_back(len.root_text + " = " + sym.name + ";");
  }

  // ---------------------------------------------------------- stubs
  std::set<std::string> stubbed;
  for (const Stub& s : m.stubs) stubbed.insert(s.name);
  std::set<std::string> need_types;
  for (const std::string& t : names.types) {
    if (IsBuiltinTypeName(t) || names.defined.count(t) || ProvidedByHeaders(t)) continue;
    need_types.insert(t);
  }
  if (m.oracle.kind == OracleSpec::Kind::kReturnValue && !names.defined.count("TEE_Result")) {
    need_types.insert("TEE_Result");
  }
  std::vector<Stub> functions;
  std::vector<Stub> macros;
  for (const std::string& c : names.callees) {
    if (names.defined.count(c) || IsEngineIntrinsic(c) || names.locals.count(c)) continue;
    for (const std::string& dep : StubTypeDependencies(c)) {
      if (!names.defined.count(dep)) need_types.insert(dep);
    }
    functions.push_back({c, StubKind::kNoOpFunction, FunctionStubText(c)});
  }
  std::set<std::string> referenced = names.values;
  if (m.oracle.kind == OracleSpec::Kind::kReturnValue) referenced.insert(m.oracle.expected_error);
  for (const std::string& v : referenced) {
    if (names.defined.count(v) || names.locals.count(v) || names.callees.count(v) ||
        ProvidedByHeaders(v) || stubbed.count(v)) {
      continue;
    }
    if (v.rfind("TEE_", 0) == 0) {
      std::uint64_t value = 0;
      for (const auto& [n, code] : TeeErrorConstants()) {
        if (n == v) value = code;
      }
      char hex[16];
      std::snprintf(hex, sizeof(hex), "0x%08llX", static_cast<unsigned long long>(value));
      macros.push_back({v, StubKind::kConstantMacro, "#define " + v + " " + hex});
    }
  }
  for (const std::string& t : std::set<std::string>(need_types)) {
    for (const std::string& dep : StubTypeDependencies(t)) {
      if (!names.defined.count(dep)) need_types.insert(dep);
    }
  }
  std::vector<Stub> types;
  for (const auto& [name, text] : TypeStubTable()) {
    if (need_types.count(name)) {
      types.push_back({name, StubKind::kTypeDecl, text});
      need_types.erase(name);
    }
  }
  for (const std::string& t : need_types) {
    types.push_back({t, StubKind::kTypeDecl, "typedef unsigned long " + t + ";"});
  }
  std::vector<Stub> ordered = macros;
  ordered.insert(ordered.end(), types.begin(), types.end());
  ordered.insert(ordered.end(), m.stubs.begin(), m.stubs.end());
  ordered.insert(ordered.end(), functions.begin(), functions.end());
  m.stubs = std::move(ordered);
  return m;
}

std::string RenderSource(const HarnessModel& m) {
  std::string out;
  out += "#include <klee/klee.h>\n";
  out += "#include <stdbool.h>\n";
  out += "#include <stddef.h>\n";
  out += "#include <stdint.h>\n";
  auto section = [&](StubKind kind, const char* sep) {
    bool any = false;
    for (const Stub& s : m.stubs) {
      if (s.kind != kind) continue;
      out += any ? sep : "\n";
      out += s.text + "\n";
      any = true;
    }
  };
  section(StubKind::kConstantMacro, "");
  section(StubKind::kTypeDecl, "");
  if (!m.slice.required_decls.empty()) {
    out += "\n";
    for (const std::string& d : m.slice.required_decls) out += d + "\n";
  }
  section(StubKind::kFlagGlobal, "");
  section(StubKind::kNoOpFunction, "\n");
  out += "\n" + m.instrumented_function + "\n";

  out += "\nint main(void) {\n";
  for (const std::string& d : m.main_decls) out += std::string(kIndent) + d + "\n";
  for (const SymbolicInput& s : m.symbolic_inputs) {
    out += std::string(kIndent) + "klee_make_symbolic(&" + s.name + ", sizeof(" + s.name +
           "), \"" + s.name + "\");\n";
  }
  for (const Assumption& a : m.assumptions) {
    out += std::string(kIndent) + "klee_assume(" + a.text + ");\n";
  }
  if (!m.main_setup.empty()) out += "\n";
  for (const std::string& s : m.main_setup) out += std::string(kIndent) + s + "\n";
  out += "\n";
  std::string call = m.function_name + "(";
  for (size_t i = 0; i < m.call_args.size(); ++i) {
    if (i) call += ", ";
    call += m.call_args[i];
  }
  call += ")";
  std::string check;
  if (m.oracle.kind == OracleSpec::Kind::kReturnValue) {
    out += std::string(kIndent) + "TEE_Result " + m.result_name + " = " + call + ";\n";
    check = m.result_name + " == " + m.oracle.expected_error;
  } else {
    out += std::string(kIndent) + call + ";\n";
    check = m.oracle.flag_name;
  }
  out += "\n";
  out += std::string(kIndent) + "if (" + m.oracle.trigger + ") {\n";
  out += std::string(kIndent) + kIndent + "klee_assert(" + check + " && \"" + kOracleMessage +
         "\");\n";
  out += std::string(kIndent) + "}\n";
  out += std::string(kIndent) + "return 0;\n}\n";
  return out;
}

LoweringConfig LoweringConfigFor(const HarnessModel& model) {
  LoweringConfig config;
  config.unroll_limit = model.unroll_limit;
  config.sink_names = model.sink_names;
  return config;
}

ir::HarnessIR RenderHir(const HarnessModel& model) {
  return LiftSourceToHir(RenderSource(model), LoweringConfigFor(model));
}

}  // namespace symtee::harness
