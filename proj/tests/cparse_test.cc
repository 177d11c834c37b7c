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


#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "symtee/cparse/lexer.h"
#include "symtee/cparse/parser.h"

namespace symtee::cparse {
namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ExpectRoundTrip(const std::string& source) {
  TranslationUnit first = ParseUnit(source, "a.c");
  std::string printed = PrettyPrint(first);
  TranslationUnit second = ParseUnit(printed, "b.c");
  EXPECT_TRUE(StructurallyEqual(first, second)) << printed;
  EXPECT_EQ(PrettyPrint(second), printed);
}

void ExpectSpansNested(const Node& node) {
  EXPECT_LE(node.span.start_byte, node.span.end_byte);
  EXPECT_LE(node.span.start_line, node.span.end_line);
  for (const Node& child : node.children) {
    EXPECT_TRUE(node.span.Contains(child.span))
        << KindName(node.kind) << " does not contain " << KindName(child.kind);
    ExpectSpansNested(child);
  }
}

TEST(ParseUnitTest, EmptyInputHasNoItems) {
  TranslationUnit unit = ParseUnit("", "empty.c");
  EXPECT_TRUE(unit.items.empty());
  EXPECT_EQ(PrettyPrint(unit), "");
}

TEST(ParseUnitTest, HarnessExampleHasExpectedItems) {
  TranslationUnit unit =
      ParseUnit(ReadFile("tests/testdata/produce_harness.c"), "produce.c");
  std::vector<std::string> functions;
  int typedefs = 0;
  for (const Node& item : unit.items) {
    if (item.kind == NodeKind::kFunctionDef) functions.push_back(item.text);
    if (item.kind == NodeKind::kTypedef) ++typedefs;
  }
  EXPECT_EQ(functions,
            (std::vector<std::string>{"TEE_MemMove", "produce", "main"}));
  EXPECT_EQ(typedefs, 2);
  EXPECT_EQ(unit.items.front().kind, NodeKind::kInclude);
  EXPECT_EQ(unit.items.front().raw, "<klee/klee.h>");
  for (const Node& item : unit.items) ExpectSpansNested(item);
}

TEST(ParseUnitTest, HarnessExampleRoundTrips) {
  ExpectRoundTrip(ReadFile("tests/testdata/produce_harness.c"));
}

TEST(ParseUnitTest, SinkCallRecordsCalleeAndArguments) {
  TranslationUnit unit =
      ParseUnit(ReadFile("tests/testdata/produce_harness.c"), "produce.c");
  const Node* produce = FindFunction(unit, "produce");
  ASSERT_NE(produce, nullptr);
  const Node* body = produce->Body();
  ASSERT_NE(body, nullptr);
  ASSERT_EQ(body->children.size(), 2u);
  const Node& decl = body->children[0];
  EXPECT_EQ(decl.kind, NodeKind::kVarDecl);
  ASSERT_EQ(decl.decl.dims.size(), 1u);
  EXPECT_EQ(decl.decl.dims[0].int_value, 512u);
  const Node& call = body->children[1].children[0];
  EXPECT_EQ(call.kind, NodeKind::kCall);
  EXPECT_EQ(call.text, "TEE_MemMove");
  ASSERT_EQ(call.children.size(), 4u);
  EXPECT_EQ(PrintExpr(call.children[3]), "params[0].memref.size");
  EXPECT_EQ(SpanText(unit.source_text, call.span),
            "TEE_MemMove(str, params[0].memref.buffer, params[0].memref.size)");
  EXPECT_EQ(call.span.start_line, 14u);
}

TEST(ParseUnitTest, NormalizesSimpleFunction) {
  TranslationUnit unit = ParseUnit("int f(void){return 0;}", "f.c");
  EXPECT_EQ(PrettyPrint(unit), "int f(void) {\n    return 0;\n}\n");
}

TEST(ParseUnitTest, IntegerMacroIsExpandedButKeepsItsName) {
  TranslationUnit unit = ParseUnit(
      "#define BUF_LEN 0x40\nchar g[BUF_LEN];\n", "m.c");
  ASSERT_EQ(unit.items.size(), 2u);
  EXPECT_EQ(unit.items[0].kind, NodeKind::kDefine);
  EXPECT_TRUE(unit.items[0].Has(kFlagIntegerMacro));
  EXPECT_EQ(unit.items[0].int_value, 64u);
  const Node& dim = unit.items[1].decl.dims[0];
  EXPECT_EQ(dim.int_value, 64u);
  EXPECT_TRUE(dim.Has(kFlagFromMacro));
  EXPECT_EQ(PrettyPrint(unit), "#define BUF_LEN 0x40\nchar g[BUF_LEN];\n");
}

TEST(ParseUnitTest, ConditionalDirectivesBecomeOpaque) {
  std::string src =
      "#ifdef DEBUG\nint x;\n#endif\n"
      "void f(void) {\n#if 0\nTEE_MemMove(a, b, c);\n#endif\n}\n";
  TranslationUnit unit = ParseUnit(src, "o.c");
  ASSERT_EQ(unit.items.size(), 2u);
  EXPECT_EQ(unit.items[0].kind, NodeKind::kOpaque);
  const Node* body = unit.items[1].Body();
  ASSERT_EQ(body->children.size(), 1u);
  EXPECT_EQ(body->children[0].kind, NodeKind::kOpaque);
  ExpectRoundTrip(src);
}

TEST(ParseUnitTest, UnsupportedStatementsBecomeOpaque) {
  std::string src =
      "int f(int k) {\n"
      "    int r = 0;\n"
      "    __asm__ volatile(\"nop\");\n"
      "    switch (k) { case 1: r = 2; break; default: break; }\n"
      "    return r;\n"
      "}\n";
  TranslationUnit unit = ParseUnit(src, "s.c");
  const Node* body = unit.items[0].Body();
  ASSERT_EQ(body->children.size(), 4u);
  EXPECT_EQ(body->children[1].kind, NodeKind::kOpaque);
  EXPECT_EQ(body->children[1].raw, "__asm__ volatile(\"nop\");");
  EXPECT_EQ(body->children[2].kind, NodeKind::kOpaque);
  EXPECT_EQ(body->children[3].kind, NodeKind::kReturn);
  ExpectRoundTrip(src);
}

TEST(ParseUnitTest, TopLevelSyntaxErrorReportsPosition) {
  try {
    ParseUnit("int x;\nint f( {\n", "bad.c");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_FALSE(e.expected().empty());
  }
  EXPECT_THROW(ParseUnit("void f(void) {", "bad.c"), ParseError);
  EXPECT_THROW(ParseUnit("+;", "bad.c"), ParseError);
}

TEST(ParseUnitTest, RejectsInvalidUtf8AndOversizedInput) {
  EXPECT_THROW(ParseUnit(std::string("int \xff;"), "u.c"), ParseError);
  ParseOptions small;
  small.max_bytes = 4;
  EXPECT_THROW(ParseUnit("int x;", "big.c", small), ParseError);
}

TEST(ParseUnitTest, MultipleDeclaratorsAndUnknownTypedefs) {
  std::string src =
      "static TEE_Result run(uint32_t pt, TEE_Param params[4]) {\n"
      "    uint8_t a[16], *p = a, b;\n"
      "    MyHandle h;\n"
      "    Ctx *ctx = (Ctx *)params[1].memref.buffer;\n"
      "    for (uint32_t i = 0; i < 4; i++) a[i] = (uint8_t)i;\n"
      "    return h ? TEE_SUCCESS : (TEE_Result)ctx->code;\n"
      "}\n";
  TranslationUnit unit = ParseUnit(src, "t.c");
  const Node* body = unit.items[0].Body();
  ASSERT_GE(body->children.size(), 3u);
  EXPECT_EQ(body->children[0].text, "a");
  EXPECT_EQ(body->children[1].text, "p");
  EXPECT_EQ(body->children[1].decl.pointer_depth(), 1);
  EXPECT_EQ(body->children[2].text, "b");
  EXPECT_EQ(body->children[3].type.base, "MyHandle");
  ExpectRoundTrip(src);
}

TEST(ParseUnitTest, RecordsEnumsAndInitializers) {
  std::string src =
      "struct key { uint32_t len; uint8_t data[32]; };\n"
      "enum { KEY_MAX = 32, IV_LEN = 16, TAG };\n"
      "typedef void (*cb_t)(void *, size_t);\n"
      "static const struct key k0 = { .len = 4, .data = { 1, 2 } };\n"
      "int g(int x) { return -(-x) + sizeof(struct key) - sizeof(k0.data) * (x << 2); }\n";
  TranslationUnit unit = ParseUnit(src, "r.c");
  ASSERT_EQ(unit.items.size(), 5u);
  EXPECT_EQ(unit.items[0].kind, NodeKind::kRecordDecl);
  EXPECT_EQ(unit.items[1].kind, NodeKind::kEnumDecl);
  EXPECT_EQ(unit.items[1].children[2].int_value, 17u);
  EXPECT_TRUE(unit.items[2].decl.fn_ptr);
  ExpectRoundTrip(src);
}

TEST(FindFunctionTest, FindsUniqueDefinition) {
  TranslationUnit unit =
      ParseUnit(ReadFile("tests/testdata/produce_harness.c"), "produce.c");
  const Node* fn = FindFunction(unit, "produce");
  ASSERT_NE(fn, nullptr);
  EXPECT_EQ(fn->text, "produce");
}

TEST(FindFunctionTest, MissingNameIsNotFound) {
  EXPECT_EQ(FindFunction(ParseUnit("", "e.c"), "x"), nullptr);
  EXPECT_EQ(FindFunction(ParseUnit("int x(void);", "p.c"), "x"), nullptr);
}

TEST(FindFunctionTest, DuplicateDefinitionThrows) {
  TranslationUnit unit =
      ParseUnit("int f(void) { return 0; }\nint f(void) { return 1; }\n", "d.c");
  EXPECT_THROW(FindFunction(unit, "f"), DuplicateDefinition);
}

TEST(LexerTest, IntegerSpellings) {
  std::uint64_t v = 0;
  EXPECT_TRUE(ParseIntegerSpelling("4096UL", &v));
  EXPECT_EQ(v, 4096u);
  EXPECT_TRUE(ParseIntegerSpelling("0xFFFF0006", &v));
  EXPECT_EQ(v, 0xFFFF0006u);
  EXPECT_TRUE(ParseIntegerSpelling("017", &v));
  EXPECT_EQ(v, 15u);
  EXPECT_TRUE(ParseIntegerSpelling("'A'", &v));
  EXPECT_EQ(v, 65u);
  EXPECT_FALSE(ParseIntegerSpelling("12abc", &v));
}

TEST(ParseUnitTest, DeterministicTrees) {
  std::string src = ReadFile("tests/testdata/produce_harness.c");
  TranslationUnit a = ParseUnit(src, "x.c");
  TranslationUnit b = ParseUnit(src, "x.c");
  EXPECT_TRUE(StructurallyEqual(a, b));
  ASSERT_EQ(a.items.size(), b.items.size());
  for (size_t i = 0; i < a.items.size(); ++i) {
    EXPECT_EQ(a.items[i].span, b.items[i].span);
  }
}

// Random expression trees printed with minimal parentheses must re-parse to
// the same tree.
class ExprGen {
 public:
  explicit ExprGen(std::uint32_t seed) : rng_(seed) {}

  std::string Gen(int depth) {
    int choice = depth <= 0 ? Pick(3) : Pick(11);
    switch (choice) {
      case 0: return Leaf();
      case 1: return std::to_string(Pick(1000));
      case 2: return "p->f";
      case 3: {
        static const char* kOps[] = {"+", "-", "*", "/", "%", "<<", ">>", "<",
                                     "<=", ">", ">=", "==", "!=", "&", "^",
                                     "|", "&&", "||"};
        return "(" + Gen(depth - 1) + " " + kOps[Pick(18)] + " " + Gen(depth - 1) + ")";
      }
      case 4: {
        static const char* kUn[] = {"-", "!", "~", "*", "&"};
        return std::string(kUn[Pick(5)]) + "(" + Gen(depth - 1) + ")";
      }
      case 5: return "(" + Gen(depth - 1) + " ? " + Gen(depth - 1) + " : " + Gen(depth - 1) + ")";
      case 6: return "(uint32_t)(" + Gen(depth - 1) + ")";
      case 7: return "f(" + Gen(depth - 1) + ", " + Gen(depth - 1) + ")";
      case 8: return "a[" + Gen(depth - 1) + "]";
      case 9: return "(" + Leaf() + " = " + Gen(depth - 1) + ")";
      default: return "sizeof(" + Gen(depth - 1) + ")";
    }
  }

 private:
  int Pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::string Leaf() {
    static const char* kNames[] = {"x", "y", "len", "size"};
    return kNames[Pick(4)];
  }
  std::mt19937 rng_;
};

TEST(PrinterPropertyTest, RandomExpressionsRoundTrip) {
  ExprGen gen(20261016);
  for (int i = 0; i < 500; ++i) {
    std::string text = gen.Gen(4);
    Node parsed = ParseExpression(text);
    std::string printed = PrintExpr(parsed);
    Node reparsed = ParseExpression(printed);
    ASSERT_TRUE(StructurallyEqual(parsed, reparsed)) << text << "\n" << printed;
    EXPECT_EQ(PrintExpr(reparsed), printed);
  }
}

}  // namespace
}  // namespace symtee::cparse
