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


// Loop-free harness IR shared by harness synthesis and the builtin engine.
//
// Values are mathematical integers. LinExpr terms name either declared
// symbols (attacker inputs) or IR variables introduced by Assign/SetFlag.
// Assign reduces its value into the range of the declared width, which is
// where C's modular arithmetic enters.

#ifndef SYMTEE_IR_H_
#define SYMTEE_IR_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "symtee/cparse/ast.h"

namespace symtee::ir {

using Int = __int128;

std::string IntToString(Int v);

struct LinExpr {
  Int constant = 0;
  std::map<std::string, Int> terms;  // no zero coefficients

  static LinExpr Const(Int c);
  static LinExpr Var(const std::string& name, Int coeff = 1);

  bool IsConstant() const { return terms.empty(); }
  // The single name when the expression is exactly `name`.
  const std::string* AsVar() const;

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(Int k);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, Int k) { return a *= k; }
  bool operator==(const LinExpr&) const = default;

  std::string ToString() const;
};

enum class CmpOp { kLt, kLe, kGt, kGe, kEq, kNe };

std::string_view CmpOpText(CmpOp op);
bool EvalCmp(Int a, CmpOp op, Int b);

struct Cond {
  enum class Kind { kCmp, kNot, kAnd };
  Kind kind = Kind::kCmp;
  LinExpr lhs;
  CmpOp op = CmpOp::kEq;
  LinExpr rhs;
  std::vector<Cond> operands;  // kNot: one, kAnd: any number

  static Cond Cmp(LinExpr lhs, CmpOp op, LinExpr rhs);
  static Cond Not(Cond c);
  static Cond And(std::vector<Cond> cs);
  static Cond Or(std::vector<Cond> cs);  // encoded as Not(And(Not...))
  static Cond True();

  bool operator==(const Cond&) const = default;
  std::string ToString() const;
};

struct Stmt {
  enum class Kind { kAssume, kAssign, kIf, kSetFlag, kReturn, kAssert, kNoOp };
  Kind kind = Kind::kNoOp;
  Cond cond;         // Assume, If, Assert
  std::string name;  // Assign/SetFlag target
  LinExpr expr;      // Assign value, Return value
  int width = 64;    // Assign
  bool is_signed = false;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  int site = -1;       // Assert: assertion site; If: branch site
  std::string label;   // NoOp: what was elided; Assert: message
  cparse::SourceSpan span;  // originating source, when known
  std::string text;         // originating source text, when known

  static Stmt Assume(Cond c);
  static Stmt Assign(std::string name, LinExpr e, int width, bool is_signed = false);
  static Stmt If(Cond c, std::vector<Stmt> then_body, std::vector<Stmt> else_body = {});
  static Stmt SetFlag(std::string name);
  static Stmt Return(LinExpr e);
  static Stmt Assert(Cond c, int site, std::string message = {});
  static Stmt NoOp(std::string label);

  bool operator==(const Stmt& o) const;
};

struct SymDecl {
  std::string name;
  int width = 64;
  bool operator==(const SymDecl&) const = default;
};

struct HarnessIR {
  std::vector<SymDecl> decls;
  std::vector<Stmt> body;
  // Human-readable descriptions of assertion sites, indexed by site id.
  std::vector<std::string> assert_sites;

  bool operator==(const HarnessIR&) const = default;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks that every name used is a declared symbol or assigned somewhere,
// widths are in 1..64 and assertion sites are non-negative.
void Validate(const HarnessIR& ir);

// Indented text form, one statement per line.
std::string Dump(const HarnessIR& ir);

// Range of values representable at a width.
Int MinOf(int width, bool is_signed);
Int MaxOf(int width, bool is_signed);
// Reduces `v` into the range of (width, is_signed) modulo 2^width.
Int Wrap(Int v, int width, bool is_signed);

}  // namespace symtee::ir

#endif  // SYMTEE_IR_H_
