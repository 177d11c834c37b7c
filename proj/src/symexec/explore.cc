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


#include <algorithm>
#include <functional>
#include <set>

#include "solver.h"
#include "symtee/symexec/symexec.h"

namespace symtee::symexec {

using ir::Cond;
using ir::CmpOp;
using ir::Int;
using ir::LinExpr;
using ir::Stmt;

std::string Atom::ToString() const {
  return expr.ToString() + (rel == Rel::kLe ? " <= 0" : " == 0");
}

bool PathCondition::Satisfied(const std::map<std::string, Int>& assignment) const {
  for (const SymbolDomain& d : domain) {
    auto it = assignment.find(d.name);
    if (it == assignment.end() || it->second < d.lo || it->second > d.hi) return false;
  }
  for (const Atom& a : constraints) {
    Int v = a.expr.constant;
    for (const auto& [name, k] : a.expr.terms) {
      auto it = assignment.find(name);
      if (it == assignment.end()) return false;
      v += k * it->second;
    }
    if (a.rel == Atom::Rel::kLe ? v > 0 : v != 0) return false;
  }
  return true;
}

std::string PathCondition::ToString() const {
  std::string out;
  for (const Atom& a : constraints) {
    if (!out.empty()) out += " && ";
    out += a.ToString();
  }
  return out.empty() ? "true" : out;
}

std::map<std::string, Int> Witness::AsMap() const {
  std::map<std::string, Int> m;
  for (const auto& [name, v] : assignment) m[name] = static_cast<Int>(v);
  return m;
}

std::string Witness::ToString() const {
  std::string out;
  for (const auto& [name, v] : assignment) {
    if (!out.empty()) out += ", ";
    out += name + "=" + std::to_string(v);
  }
  return out;
}

std::vector<SymbolDomain> DomainOf(const ir::HarnessIR& ir, std::uint64_t domain_bound) {
  std::vector<SymbolDomain> out;
  for (const ir::SymDecl& d : ir.decls) {
    Int hi = std::min(ir::MaxOf(d.width, false), static_cast<Int>(domain_bound));
    out.push_back({d.name, 0, hi});
  }
  return out;
}

namespace {

using Cube = std::vector<Atom>;

// Folds constant atoms. Returns false when the atom is constantly false.
bool AddAtom(Atom a, Cube* cube) {
  if (a.expr.IsConstant()) {
    return a.rel == Atom::Rel::kLe ? a.expr.constant <= 0 : a.expr.constant == 0;
  }
  cube->push_back(std::move(a));
  return true;
}

std::vector<Cube> CmpCubes(const LinExpr& lhs, CmpOp op, const LinExpr& rhs) {
  LinExpr d = lhs - rhs;
  std::vector<std::vector<Atom>> alts;
  auto le = [](LinExpr e) { return Atom{std::move(e), Atom::Rel::kLe}; };
  switch (op) {
    case CmpOp::kLt: alts = {{le(d + LinExpr::Const(1))}}; break;
    case CmpOp::kLe: alts = {{le(d)}}; break;
    case CmpOp::kGt: alts = {{le(LinExpr::Const(1) - d)}}; break;
    case CmpOp::kGe: alts = {{le(LinExpr::Const(0) - d)}}; break;
    case CmpOp::kEq: alts = {{Atom{d, Atom::Rel::kEq}}}; break;
    case CmpOp::kNe:
      alts = {{le(d + LinExpr::Const(1))}, {le(LinExpr::Const(1) - d)}};
      break;
  }
  std::vector<Cube> out;
  for (auto& alt : alts) {
    Cube cube;
    bool ok = true;
    for (Atom& a : alt) ok = ok && AddAtom(std::move(a), &cube);
    if (ok) out.push_back(std::move(cube));
  }
  return out;
}

CmpOp Negate(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return CmpOp::kGe;
    case CmpOp::kLe: return CmpOp::kGt;
    case CmpOp::kGt: return CmpOp::kLe;
    case CmpOp::kGe: return CmpOp::kLt;
    case CmpOp::kEq: return CmpOp::kNe;
    case CmpOp::kNe: return CmpOp::kEq;
  }
  return op;
}

std::vector<Cube> Product(const std::vector<Cube>& a, const std::vector<Cube>& b) {
  std::vector<Cube> out;
  for (const Cube& x : a) {
    for (const Cube& y : b) {
      Cube c = x;
      c.insert(c.end(), y.begin(), y.end());
      out.push_back(std::move(c));
    }
  }
  return out;
}

// Pairwise-disjoint cubes whose union is `c` (or its negation).
std::vector<Cube> Cubes(const Cond& c, bool positive) {
  switch (c.kind) {
    case Cond::Kind::kCmp:
      return CmpCubes(c.lhs, positive ? c.op : Negate(c.op), c.rhs);
    case Cond::Kind::kNot:
      return Cubes(c.operands[0], !positive);
    case Cond::Kind::kAnd: {
      if (positive) {
        std::vector<Cube> acc = {Cube{}};
        for (const Cond& o : c.operands) acc = Product(acc, Cubes(o, true));
        return acc;
      }
      // !(a && b && ...) = !a | (a && !b) | (a && b && !c) | ...
      std::vector<Cube> out;
      std::vector<Cube> prefix = {Cube{}};
      for (const Cond& o : c.operands) {
        for (Cube& cube : Product(prefix, Cubes(o, false))) out.push_back(std::move(cube));
        prefix = Product(prefix, Cubes(o, true));
      }
      return out;
    }
  }
  return {};
}

struct Frame {
  const std::vector<Stmt>* body;
  size_t next;
};

struct State {
  std::vector<Atom> atoms;
  std::map<std::string, LinExpr> env;
  std::vector<Decision> decisions;
  std::vector<int> reached_asserts;
  std::optional<LinExpr> returned;
  std::vector<Frame> frames;
};

class Explorer {
 public:
  Explorer(const ir::HarnessIR& ir, const ExecConfig& config)
      : ir_(ir), config_(config), domain_(DomainOf(ir, config.domain_bound)) {
    for (const ir::SymDecl& d : ir.decls) symbols_.insert(d.name);
  }

  std::vector<PathResult> Run() {
    State s;
    s.frames.push_back({&ir_.body, 0});
    Continue(std::move(s));
    return std::move(results_);
  }

 private:
  LinExpr Subst(const LinExpr& e, const State& s) const {
    LinExpr out = LinExpr::Const(e.constant);
    for (const auto& [name, k] : e.terms) {
      if (symbols_.count(name)) {
        out += LinExpr::Var(name, k);
      } else if (auto it = s.env.find(name); it != s.env.end()) {
        out += it->second * k;
      }
      // Unassigned variables read as zero, like C objects of static storage.
    }
    return out;
  }

  Cond SubstCond(const Cond& c, const State& s) const {
    Cond out = c;
    if (c.kind == Cond::Kind::kCmp) {
      out.lhs = Subst(c.lhs, s);
      out.rhs = Subst(c.rhs, s);
    }
    for (Cond& o : out.operands) o = SubstCond(o, s);
    return out;
  }

  PathCondition ConditionOf(const std::vector<Atom>& atoms) const {
    return PathCondition{domain_, atoms};
  }

  // Extends `s` with `cube`; nullopt when the result is infeasible.
  std::optional<State> Extend(const State& s, const Cube& cube) const {
    State next = s;
    next.atoms.insert(next.atoms.end(), cube.begin(), cube.end());
    if (next.atoms.size() > config_.max_constraints) {
      throw PathBudgetExceeded("path exceeds " + std::to_string(config_.max_constraints) +
                               " constraints");
    }
    if (!cube.empty() && !CheckFeasible(ConditionOf(next.atoms), config_)) {
      return std::nullopt;
    }
    return next;
  }

  void Finish(State s, std::optional<int> failed) {
    if (results_.size() >= config_.max_paths) {
      throw PathBudgetExceeded("more than " + std::to_string(config_.max_paths) + " paths");
    }
    PathResult r;
    r.condition = ConditionOf(s.atoms);
    r.decisions = std::move(s.decisions);
    r.reached_asserts = std::move(s.reached_asserts);
    r.failed_assert = failed;
    r.state = std::move(s.env);
    r.returned = std::move(s.returned);
    results_.push_back(std::move(r));
  }

  void Continue(State s) {
    while (!s.frames.empty()) {
      Frame& top = s.frames.back();
      if (top.next == top.body->size()) {
        s.frames.pop_back();
        continue;
      }
      const Stmt& st = (*top.body)[top.next++];
      switch (st.kind) {
        case Stmt::Kind::kNoOp:
          break;
        case Stmt::Kind::kSetFlag:
          s.env[st.name] = LinExpr::Const(1);
          break;
        case Stmt::Kind::kReturn:
          s.returned = Subst(st.expr, s);
          break;
        case Stmt::Kind::kAssume: {
          for (const Cube& cube : Cubes(SubstCond(st.cond, s), true)) {
            if (auto next = Extend(s, cube)) Continue(std::move(*next));
          }
          return;
        }
        case Stmt::Kind::kIf: {
          Cond c = SubstCond(st.cond, s);
          for (bool taken : {true, false}) {
            for (const Cube& cube : Cubes(c, taken)) {
              auto next = Extend(s, cube);
              if (!next) continue;
              next->decisions.push_back({st.site, taken, st.span, st.text});
              next->frames.push_back({taken ? &st.then_body : &st.else_body, 0});
              Continue(std::move(*next));
            }
          }
          return;
        }
        case Stmt::Kind::kAssert: {
          s.reached_asserts.push_back(st.site);
          Cond c = SubstCond(st.cond, s);
          for (const Cube& cube : Cubes(c, true)) {
            if (auto next = Extend(s, cube)) Continue(std::move(*next));
          }
          for (const Cube& cube : Cubes(c, false)) {
            if (auto next = Extend(s, cube)) Finish(std::move(*next), st.site);
          }
          return;
        }
        case Stmt::Kind::kAssign: {
          Assign(st, std::move(s));
          return;
        }
      }
    }
    Finish(std::move(s), std::nullopt);
  }

  // Splits on the wraparound count k so that value - k*2^w lands in range.
  void Assign(const Stmt& st, State s) {
    LinExpr e = Subst(st.expr, s);
    Int lo_t = ir::MinOf(st.width, st.is_signed);
    Int hi_t = ir::MaxOf(st.width, st.is_signed);
    Int m = Int{1} << st.width;
    if (e.IsConstant()) {
      s.env[st.name] = LinExpr::Const(ir::Wrap(e.constant, st.width, st.is_signed));
      Continue(std::move(s));
      return;
    }
    std::optional<internal::Bounds> b = internal::PropagateBounds(ConditionOf(s.atoms));
    if (!b) return;
    Int emin = e.constant;
    Int emax = e.constant;
    for (const auto& [name, k] : e.terms) {
      size_t i = 0;
      while (domain_[i].name != name) ++i;
      emin += std::min(k * (*b)[i].first, k * (*b)[i].second);
      emax += std::max(k * (*b)[i].first, k * (*b)[i].second);
    }
    if (emin >= lo_t && emax <= hi_t) {
      s.env[st.name] = std::move(e);
      Continue(std::move(s));
      return;
    }
    Int kmin = internal::FloorDiv(emin - lo_t, m);
    Int kmax = internal::FloorDiv(emax - lo_t, m);
    if (kmax - kmin >= 64) {
      throw UnsupportedConstraint("assignment to '" + st.name + "' wraps too many times");
    }
    for (Int k = kmin; k <= kmax; ++k) {
      LinExpr shifted = e - LinExpr::Const(k * m);
      Cube cube;
      bool ok = AddAtom({LinExpr::Const(lo_t) - shifted, Atom::Rel::kLe}, &cube) &&
                AddAtom({shifted - LinExpr::Const(hi_t), Atom::Rel::kLe}, &cube);
      if (!ok) continue;
      auto next = Extend(s, cube);
      if (!next) continue;
      next->env[st.name] = std::move(shifted);
      Continue(std::move(*next));
    }
  }

  const ir::HarnessIR& ir_;
  const ExecConfig& config_;
  std::vector<SymbolDomain> domain_;
  std::set<std::string> symbols_;
  std::vector<PathResult> results_;
};

// Concrete interpreter. Returns false once execution has stopped.
class Concrete {
 public:
  Concrete(const std::map<std::string, Int>& assignment, ConcreteRun* out)
      : assignment_(assignment), out_(out) {}

  bool Body(const std::vector<Stmt>& body) {
    for (const Stmt& st : body) {
      if (!One(st)) return false;
    }
    return true;
  }

 private:
  Int Eval(const LinExpr& e) const {
    Int v = e.constant;
    for (const auto& [name, k] : e.terms) {
      if (auto it = assignment_.find(name); it != assignment_.end()) {
        v += k * it->second;
      } else if (auto jt = out_->state.find(name); jt != out_->state.end()) {
        v += k * jt->second;
      }
    }
    return v;
  }

  bool Holds(const Cond& c) const {
    switch (c.kind) {
      case Cond::Kind::kCmp: return ir::EvalCmp(Eval(c.lhs), c.op, Eval(c.rhs));
      case Cond::Kind::kNot: return !Holds(c.operands[0]);
      case Cond::Kind::kAnd:
        return std::all_of(c.operands.begin(), c.operands.end(),
                           [this](const Cond& o) { return Holds(o); });
    }
    return false;
  }

  bool One(const Stmt& st) {
    switch (st.kind) {
      case Stmt::Kind::kNoOp:
        return true;
      case Stmt::Kind::kSetFlag:
        out_->state[st.name] = 1;
        return true;
      case Stmt::Kind::kReturn:
        out_->returned = Eval(st.expr);
        return true;
      case Stmt::Kind::kAssign:
        out_->state[st.name] = ir::Wrap(Eval(st.expr), st.width, st.is_signed);
        return true;
      case Stmt::Kind::kAssume:
        if (Holds(st.cond)) return true;
        out_->assumptions_hold = false;
        return false;
      case Stmt::Kind::kAssert:
        if (Holds(st.cond)) return true;
        out_->failed_assert = st.site;
        out_->failed_message = st.label;
        return false;
      case Stmt::Kind::kIf: {
        bool taken = Holds(st.cond);
        out_->decisions.push_back({st.site, taken, st.span, st.text});
        return Body(taken ? st.then_body : st.else_body);
      }
    }
    return true;
  }

  const std::map<std::string, Int>& assignment_;
  ConcreteRun* out_;
};

}  // namespace

std::vector<PathResult> Explore(const ir::HarnessIR& ir, const ExecConfig& config) {
  ir::Validate(ir);
  return Explorer(ir, config).Run();
}

ConcreteRun ExecuteConcrete(const ir::HarnessIR& ir,
                            const std::map<std::string, Int>& assignment) {
  for (const ir::SymDecl& d : ir.decls) {
    if (!assignment.count(d.name)) {
      throw std::invalid_argument("no value for symbol '" + d.name + "'");
    }
  }
  ConcreteRun run;
  Concrete(assignment, &run).Body(ir.body);
  return run;
}

std::vector<Violation> FindViolations(const ir::HarnessIR& ir, const ExecConfig& config) {
  std::vector<Violation> out;
  for (PathResult& path : Explore(ir, config)) {
    if (!path.failed_assert) continue;
    std::optional<Witness> w = CheckFeasible(path.condition, config);
    if (!w) throw SelfCheckFailure("explored path has no model: " + path.condition.ToString());
    ConcreteRun run = ExecuteConcrete(ir, w->AsMap());
    if (!run.assumptions_hold || run.failed_assert != path.failed_assert ||
        run.decisions != path.decisions) {
      throw SelfCheckFailure("witness " + w->ToString() + " does not reproduce assert #" +
                             std::to_string(*path.failed_assert));
    }
    Violation v;
    v.assert_site = *path.failed_assert;
    v.message = run.failed_message;
    v.path = std::move(path.condition);
    v.witness = std::move(*w);
    v.decisions = std::move(path.decisions);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Violation> BruteForceOracle(const ir::HarnessIR& ir, std::uint64_t bound,
                                        std::vector<Witness>* all_failing) {
  if (ir.decls.size() > 2) {
    throw OracleScopeExceeded("brute-force oracle supports at most 2 symbols, got " +
                              std::to_string(ir.decls.size()));
  }
  if (bound > (1u << 16)) {
    throw OracleScopeExceeded("brute-force bound " + std::to_string(bound) +
                              " exceeds 65536");
  }
  ir::Validate(ir);
  std::vector<SymbolDomain> domain = DomainOf(ir, bound);
  std::map<int, Violation> minimal;
  std::map<std::string, Int> assignment;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == domain.size()) {
      ConcreteRun run = ExecuteConcrete(ir, assignment);
      if (!run.assumptions_hold || !run.failed_assert) return;
      Witness w;
      for (const SymbolDomain& d : domain) {
        w.assignment.emplace_back(d.name, static_cast<std::uint64_t>(assignment[d.name]));
      }
      if (all_failing) all_failing->push_back(w);
      if (!minimal.count(*run.failed_assert)) {
        Violation v;
        v.assert_site = *run.failed_assert;
        v.message = run.failed_message;
        v.path.domain = domain;
        v.witness = std::move(w);
        v.decisions = std::move(run.decisions);
        minimal.emplace(v.assert_site, std::move(v));
      }
      return;
    }
    for (Int x = domain[i].lo; x <= domain[i].hi; ++x) {
      assignment[domain[i].name] = x;
      rec(i + 1);
    }
  };
  rec(0);
  std::vector<Violation> out;
  for (auto& [site, v] : minimal) out.push_back(std::move(v));
  return out;
}

}  // namespace symtee::symexec
