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


#include "symtee/ir.h"

#include <algorithm>
#include <set>

namespace symtee::ir {

std::string IntToString(Int v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  std::string out;
  while (u > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

LinExpr LinExpr::Const(Int c) {
  LinExpr e;
  e.constant = c;
  return e;
}

LinExpr LinExpr::Var(const std::string& name, Int coeff) {
  LinExpr e;
  if (coeff != 0) e.terms[name] = coeff;
  return e;
}

const std::string* LinExpr::AsVar() const {
  if (constant != 0 || terms.size() != 1 || terms.begin()->second != 1) return nullptr;
  return &terms.begin()->first;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  constant += o.constant;
  for (const auto& [name, k] : o.terms) {
    Int& slot = terms[name];
    slot += k;
    if (slot == 0) terms.erase(name);
  }
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  constant -= o.constant;
  for (const auto& [name, k] : o.terms) {
    Int& slot = terms[name];
    slot -= k;
    if (slot == 0) terms.erase(name);
  }
  return *this;
}

LinExpr& LinExpr::operator*=(Int k) {
  if (k == 0) {
    terms.clear();
    constant = 0;
    return *this;
  }
  constant *= k;
  for (auto& [name, c] : terms) c *= k;
  return *this;
}

std::string LinExpr::ToString() const {
  std::string out;
  for (const auto& [name, k] : terms) {
    if (out.empty()) {
      if (k == -1) out += "-";
      else if (k != 1) out += IntToString(k) + "*";
    } else {
      out += k < 0 ? " - " : " + ";
      Int a = k < 0 ? -k : k;
      if (a != 1) out += IntToString(a) + "*";
    }
    out += name;
  }
  if (out.empty()) return IntToString(constant);
  if (constant > 0) out += " + " + IntToString(constant);
  if (constant < 0) out += " - " + IntToString(-constant);
  return out;
}

std::string_view CmpOpText(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
    case CmpOp::kEq: return "==";
    case CmpOp::kNe: return "!=";
  }
  return "?";
}

bool EvalCmp(Int a, CmpOp op, Int b) {
  switch (op) {
    case CmpOp::kLt: return a < b;
    case CmpOp::kLe: return a <= b;
    case CmpOp::kGt: return a > b;
    case CmpOp::kGe: return a >= b;
    case CmpOp::kEq: return a == b;
    case CmpOp::kNe: return a != b;
  }
  return false;
}

Cond Cond::Cmp(LinExpr lhs, CmpOp op, LinExpr rhs) {
  Cond c;
  c.kind = Kind::kCmp;
  c.lhs = std::move(lhs);
  c.op = op;
  c.rhs = std::move(rhs);
  return c;
}

Cond Cond::Not(Cond inner) {
  if (inner.kind == Kind::kNot) return std::move(inner.operands[0]);
  Cond c;
  c.kind = Kind::kNot;
  c.operands.push_back(std::move(inner));
  return c;
}

Cond Cond::And(std::vector<Cond> cs) {
  if (cs.size() == 1) return std::move(cs[0]);
  Cond c;
  c.kind = Kind::kAnd;
  c.operands = std::move(cs);
  return c;
}

Cond Cond::Or(std::vector<Cond> cs) {
  if (cs.size() == 1) return std::move(cs[0]);
  for (Cond& c : cs) c = Not(std::move(c));
  return Not(And(std::move(cs)));
}

Cond Cond::True() { return Cmp(LinExpr::Const(0), CmpOp::kEq, LinExpr::Const(0)); }

std::string Cond::ToString() const {
  switch (kind) {
    case Kind::kCmp:
      return lhs.ToString() + " " + std::string(CmpOpText(op)) + " " + rhs.ToString();
    case Kind::kNot:
      return "!(" + operands[0].ToString() + ")";
    case Kind::kAnd: {
      if (operands.empty()) return "true";
      std::string out;
      for (size_t i = 0; i < operands.size(); ++i) {
        if (i) out += " && ";
        out += "(" + operands[i].ToString() + ")";
      }
      return out;
    }
  }
  return "?";
}

Stmt Stmt::Assume(Cond c) {
  Stmt s;
  s.kind = Kind::kAssume;
  s.cond = std::move(c);
  return s;
}

Stmt Stmt::Assign(std::string name, LinExpr e, int width, bool is_signed) {
  Stmt s;
  s.kind = Kind::kAssign;
  s.name = std::move(name);
  s.expr = std::move(e);
  s.width = width;
  s.is_signed = is_signed;
  return s;
}

Stmt Stmt::If(Cond c, std::vector<Stmt> then_body, std::vector<Stmt> else_body) {
  Stmt s;
  s.kind = Kind::kIf;
  s.cond = std::move(c);
  s.then_body = std::move(then_body);
  s.else_body = std::move(else_body);
  return s;
}

Stmt Stmt::SetFlag(std::string name) {
  Stmt s;
  s.kind = Kind::kSetFlag;
  s.name = std::move(name);
  return s;
}

Stmt Stmt::Return(LinExpr e) {
  Stmt s;
  s.kind = Kind::kReturn;
  s.expr = std::move(e);
  return s;
}

Stmt Stmt::Assert(Cond c, int site, std::string message) {
  Stmt s;
  s.kind = Kind::kAssert;
  s.cond = std::move(c);
  s.site = site;
  s.label = std::move(message);
  return s;
}

Stmt Stmt::NoOp(std::string label) {
  Stmt s;
  s.kind = Kind::kNoOp;
  s.label = std::move(label);
  return s;
}

bool Stmt::operator==(const Stmt& o) const {
  return kind == o.kind && cond == o.cond && name == o.name && expr == o.expr &&
         width == o.width && is_signed == o.is_signed && then_body == o.then_body &&
         else_body == o.else_body && site == o.site && label == o.label;
}

Int MinOf(int width, bool is_signed) {
  return is_signed ? -(Int{1} << (width - 1)) : 0;
}

Int MaxOf(int width, bool is_signed) {
  return is_signed ? (Int{1} << (width - 1)) - 1 : (Int{1} << width) - 1;
}

Int Wrap(Int v, int width, bool is_signed) {
  Int m = Int{1} << width;
  Int r = v % m;
  if (r < 0) r += m;
  if (is_signed && r > MaxOf(width, true)) r -= m;
  return r;
}

namespace {

void CollectUses(const LinExpr& e, std::set<std::string>* out) {
  for (const auto& [name, k] : e.terms) out->insert(name);
}

void CollectUses(const Cond& c, std::set<std::string>* out) {
  if (c.kind == Cond::Kind::kCmp) {
    CollectUses(c.lhs, out);
    CollectUses(c.rhs, out);
  }
  for (const Cond& o : c.operands) CollectUses(o, out);
}

void Scan(const std::vector<Stmt>& body, std::set<std::string>* uses,
          std::set<std::string>* defs) {
  for (const Stmt& s : body) {
    switch (s.kind) {
      case Stmt::Kind::kAssume:
      case Stmt::Kind::kAssert:
        CollectUses(s.cond, uses);
        if (s.kind == Stmt::Kind::kAssert && s.site < 0) {
          throw ValidationError("assertion without a site id");
        }
        break;
      case Stmt::Kind::kAssign:
        if (s.width < 1 || s.width > 64) {
          throw ValidationError("assignment to '" + s.name + "' has width " +
                                std::to_string(s.width));
        }
        CollectUses(s.expr, uses);
        defs->insert(s.name);
        break;
      case Stmt::Kind::kIf:
        CollectUses(s.cond, uses);
        Scan(s.then_body, uses, defs);
        Scan(s.else_body, uses, defs);
        break;
      case Stmt::Kind::kSetFlag:
        defs->insert(s.name);
        break;
      case Stmt::Kind::kReturn:
        CollectUses(s.expr, uses);
        break;
      case Stmt::Kind::kNoOp:
        break;
    }
  }
}

void DumpBody(const std::vector<Stmt>& body, int indent, std::string* out) {
  std::string pad(indent * 2, ' ');
  for (const Stmt& s : body) {
    switch (s.kind) {
      case Stmt::Kind::kAssume:
        *out += pad + "assume " + s.cond.ToString() + "\n";
        break;
      case Stmt::Kind::kAssign:
        *out += pad + s.name + " := " + s.expr.ToString() + " : " +
                (s.is_signed ? "i" : "u") + std::to_string(s.width) + "\n";
        break;
      case Stmt::Kind::kIf:
        *out += pad + "if " + s.cond.ToString() + " {\n";
        DumpBody(s.then_body, indent + 1, out);
        if (!s.else_body.empty()) {
          *out += pad + "} else {\n";
          DumpBody(s.else_body, indent + 1, out);
        }
        *out += pad + "}\n";
        break;
      case Stmt::Kind::kSetFlag:
        *out += pad + "setflag " + s.name + "\n";
        break;
      case Stmt::Kind::kReturn:
        *out += pad + "return " + s.expr.ToString() + "\n";
        break;
      case Stmt::Kind::kAssert:
        *out += pad + "assert#" + std::to_string(s.site) + " " + s.cond.ToString() + "\n";
        break;
      case Stmt::Kind::kNoOp:
        *out += pad + "noop " + s.label + "\n";
        break;
    }
  }
}

}  // namespace

void Validate(const HarnessIR& ir) {
  std::set<std::string> uses;
  std::set<std::string> defs;
  std::set<std::string> syms;
  for (const SymDecl& d : ir.decls) {
    if (d.width < 1 || d.width > 64) {
      throw ValidationError("symbol '" + d.name + "' has width " + std::to_string(d.width));
    }
    if (!syms.insert(d.name).second) {
      throw ValidationError("symbol '" + d.name + "' declared twice");
    }
  }
  Scan(ir.body, &uses, &defs);
  for (const std::string& name : uses) {
    if (!syms.count(name) && !defs.count(name)) {
      throw ValidationError("'" + name + "' is used but never declared or assigned");
    }
  }
  for (const std::string& name : defs) {
    if (syms.count(name)) {
      throw ValidationError("symbol '" + name + "' is assigned");
    }
  }
}

std::string Dump(const HarnessIR& ir) {
  std::string out;
  for (const SymDecl& d : ir.decls) {
    out += "sym " + d.name + " : u" + std::to_string(d.width) + "\n";
  }
  DumpBody(ir.body, 0, &out);
  return out;
}

}  // namespace symtee::ir
