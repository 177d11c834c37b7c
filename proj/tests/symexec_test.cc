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


#include "symtee/symexec/symexec.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "symtee/ir.h"

namespace symtee::symexec {
namespace {

using ir::Cond;
using ir::CmpOp;
using ir::HarnessIR;
using ir::Int;
using ir::LinExpr;
using ir::Stmt;

LinExpr V(const std::string& n) { return LinExpr::Var(n); }
LinExpr C(Int c) { return LinExpr::Const(c); }

constexpr Int kBadParameters = 0xFFFF0006;

// The unguarded produce() harness: the flag is never set.
HarnessIR ProduceIr() {
  HarnessIR ir;
  ir.decls = {{"size", 64}};
  ir.body = {
      Stmt::Assign("g_checked", C(0), 32, true),
      Stmt::Assume(Cond::Cmp(V("size"), CmpOp::kLe, C(4096))),
      Stmt::NoOp("TEE_MemMove"),
      Stmt::If(Cond::Cmp(V("size"), CmpOp::kGt, C(512)),
               {Stmt::Assert(Cond::Cmp(V("g_checked"), CmpOp::kNe, C(0)), 0,
                             "Missing input validation")}),
  };
  return ir;
}

// pbkdf2 with the length check before the copy.
HarnessIR Pbkdf2FixedIr() {
  HarnessIR ir;
  ir.decls = {{"dkLen", 32}};
  ir.body = {
      Stmt::Assume(Cond::Cmp(V("dkLen"), CmpOp::kLe, C(4096))),
      Stmt::If(Cond::Cmp(V("dkLen"), CmpOp::kGt, C(512)),
               {Stmt::Return(C(kBadParameters)), Stmt::Assign("ret", C(kBadParameters), 32)},
               {Stmt::NoOp("TEE_MemMove"), Stmt::Return(C(0)), Stmt::Assign("ret", C(0), 32)}),
      Stmt::If(Cond::Cmp(V("dkLen"), CmpOp::kGt, C(512)),
               {Stmt::Assert(Cond::Cmp(V("ret"), CmpOp::kEq, C(kBadParameters)), 0)}),
  };
  return ir;
}

PathCondition Pc(std::vector<Atom> atoms, Int hi = 4096) {
  return PathCondition{{{"x", 0, hi}}, std::move(atoms)};
}

Atom Le(LinExpr e) { return Atom{std::move(e), Atom::Rel::kLe}; }

std::uint64_t Value(const Witness& w, const std::string& name) {
  for (const auto& [n, v] : w.assignment) {
    if (n == name) return v;
  }
  ADD_FAILURE() << "no " << name << " in witness";
  return 0;
}

TEST(CheckFeasibleTest, SmallestAboveCapacity) {
  // x > 512  and  x <= 4096
  auto w = CheckFeasible(Pc({Le(C(513) - V("x")), Le(V("x") - C(4096))}));
  ASSERT_TRUE(w);
  EXPECT_EQ(Value(*w, "x"), 513u);
}

TEST(CheckFeasibleTest, EmptyInterval) {
  EXPECT_FALSE(CheckFeasible(Pc({Le(C(513) - V("x")), Le(V("x") - C(512))})));
}

TEST(CheckFeasibleTest, UnconstrainedMinimum) {
  auto w = CheckFeasible(Pc({}));
  ASSERT_TRUE(w);
  EXPECT_EQ(Value(*w, "x"), 0u);
}

TEST(CheckFeasibleTest, DifferenceCycleIsInfeasible) {
  PathCondition pc{{{"x", 0, 100}, {"y", 0, 100}},
                   {Le(V("x") - V("y") + C(1)), Le(V("y") - V("x") + C(1))}};
  EXPECT_FALSE(CheckFeasible(pc));
}

TEST(CheckFeasibleTest, LexicographicOrderFollowsDeclarations) {
  // x + y >= 10, y <= 3: smallest x is 7 with y = 3.
  PathCondition pc{{{"x", 0, 100}, {"y", 0, 100}},
                   {Le(C(10) - V("x") - V("y")), Le(V("y") - C(3))}};
  auto w = CheckFeasible(pc);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->ToString(), "x=7, y=3");
}

TEST(CheckFeasibleTest, EqualityWithCoefficients) {
  // 3x == 2y + 1 over small ranges: x = 1, y = 1.
  PathCondition pc{{{"x", 0, 50}, {"y", 0, 50}},
                   {Atom{V("x") * 3 - V("y") * 2 - C(1), Atom::Rel::kEq}}};
  auto w = CheckFeasible(pc);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->ToString(), "x=1, y=1");
}

TEST(CheckFeasibleTest, RejectsWideConstraints) {
  PathCondition pc{{{"a", 0, 9}, {"b", 0, 9}, {"c", 0, 9}, {"d", 0, 9}},
                   {Le(V("a") + V("b") + V("c") + V("d") - C(3))}};
  EXPECT_THROW(CheckFeasible(pc), UnsupportedConstraint);
  PathCondition undeclared{{{"a", 0, 9}}, {Le(V("zz"))}};
  EXPECT_THROW(CheckFeasible(undeclared), UnsupportedConstraint);
}

TEST(CheckFeasibleTest, AgreesWithEnumerationOnRandomSystems) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> cst(-40, 40);
  for (int iter = 0; iter < 300; ++iter) {
    PathCondition pc{{{"x", 0, 15}, {"y", 0, 15}}, {}};
    int n = 1 + iter % 4;
    for (int k = 0; k < n; ++k) {
      LinExpr e = V("x") * coeff(rng) + V("y") * coeff(rng) + C(cst(rng));
      pc.constraints.push_back(Atom{e, k == 0 && iter % 5 == 0 ? Atom::Rel::kEq
                                                                 : Atom::Rel::kLe});
    }
    std::optional<std::string> expected;
    for (Int x = 0; x <= 15 && !expected; ++x) {
      for (Int y = 0; y <= 15 && !expected; ++y) {
        if (pc.Satisfied({{"x", x}, {"y", y}})) {
          expected = "x=" + ir::IntToString(x) + ", y=" + ir::IntToString(y);
        }
      }
    }
    auto w = CheckFeasible(pc);
    ASSERT_EQ(w.has_value(), expected.has_value()) << pc.ToString();
    if (w) EXPECT_EQ(w->ToString(), *expected) << pc.ToString();
  }
}

TEST(ExploreTest, ProduceHasTwoPaths) {
  auto paths = Explore(ProduceIr());
  ASSERT_EQ(paths.size(), 2u);
  // Then-branch first.
  EXPECT_EQ(paths[0].failed_assert, 0);
  EXPECT_FALSE(paths[1].failed_assert);
  for (Int size = 0; size <= 4096; ++size) {
    std::map<std::string, Int> a = {{"size", size}};
    EXPECT_EQ(paths[0].condition.Satisfied(a), size > 512) << ir::IntToString(size);
    EXPECT_EQ(paths[1].condition.Satisfied(a), size <= 512) << ir::IntToString(size);
  }
}

TEST(ExploreTest, StraightLineIsOnePath) {
  HarnessIR ir;
  ir.decls = {{"n", 32}};
  ir.body = {Stmt::Assign("t", V("n") + C(4), 64), Stmt::NoOp("copy"), Stmt::Return(V("t"))};
  auto paths = Explore(ir);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(*paths[0].returned, V("n") + C(4));
}

TEST(ExploreTest, Pbkdf2FixedPaths) {
  auto paths = Explore(Pbkdf2FixedIr());
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(*paths[0].returned, C(kBadParameters));
  EXPECT_TRUE(paths[0].condition.Satisfied({{"dkLen", 513}}));
  EXPECT_FALSE(paths[0].condition.Satisfied({{"dkLen", 512}}));
  EXPECT_EQ(*paths[1].returned, C(0));
  EXPECT_TRUE(paths[1].condition.Satisfied({{"dkLen", 512}}));
  EXPECT_EQ(paths[0].reached_asserts, std::vector<int>{0});
  EXPECT_FALSE(paths[0].failed_assert);
}

TEST(ExploreTest, PathBudget) {
  HarnessIR ir;
  for (int i = 0; i < 4; ++i) {
    std::string s = "s" + std::to_string(i);
    ir.decls.push_back({s, 8});
    ir.body.push_back(Stmt::If(Cond::Cmp(V(s), CmpOp::kGt, C(5)), {Stmt::NoOp("a")}));
  }
  ExecConfig cfg;
  EXPECT_EQ(Explore(ir, cfg).size(), 16u);
  cfg.max_paths = 10;
  EXPECT_THROW(Explore(ir, cfg), PathBudgetExceeded);
  cfg = ExecConfig{};
  cfg.max_constraints = 2;
  EXPECT_THROW(Explore(ir, cfg), PathBudgetExceeded);
}

TEST(ExploreTest, NotEqualSplitsIntoDisjointCubes) {
  HarnessIR ir;
  ir.decls = {{"x", 8}};
  ir.body = {Stmt::Assume(Cond::Cmp(V("x"), CmpOp::kLe, C(10))),
             Stmt::If(Cond::Cmp(V("x"), CmpOp::kNe, C(4)), {Stmt::NoOp("ne")})};
  auto paths = Explore(ir);
  ASSERT_EQ(paths.size(), 3u);  // x < 4, x > 4, x == 4
  for (Int x = 0; x <= 10; ++x) {
    int hits = 0;
    for (const PathResult& p : paths) hits += p.condition.Satisfied({{"x", x}});
    EXPECT_EQ(hits, 1);
  }
}

TEST(FindViolationsTest, ProduceWitnessIs513) {
  auto v = FindViolations(ProduceIr());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].assert_site, 0);
  EXPECT_EQ(v[0].witness.ToString(), "size=513");
  EXPECT_EQ(v[0].message, "Missing input validation");
  EXPECT_EQ(v[0].engine, Engine::kBuiltin);
  ASSERT_EQ(v[0].decisions.size(), 1u);
  EXPECT_TRUE(v[0].decisions[0].taken);
}

TEST(FindViolationsTest, Pbkdf2FixedIsClean) { EXPECT_TRUE(FindViolations(Pbkdf2FixedIr()).empty()); }

TEST(FindViolationsTest, InfeasibleTrigger) {
  HarnessIR ir = ProduceIr();
  ir.body.insert(ir.body.begin() + 1,
                 Stmt::Assume(Cond::Cmp(V("size"), CmpOp::kLe, C(512))));
  EXPECT_TRUE(FindViolations(ir).empty());
}

TEST(FindViolationsTest, UnsignedWraparound) {
  // t = size - 1 as a 32-bit unsigned: size == 0 wraps to 0xFFFFFFFF.
  HarnessIR ir;
  ir.decls = {{"size", 32}};
  ir.body = {Stmt::Assign("t", V("size") - C(1), 32),
             Stmt::If(Cond::Cmp(V("t"), CmpOp::kGt, C(512)),
                      {Stmt::Assert(Cond::Cmp(C(0), CmpOp::kEq, C(1)), 0)})};
  auto v = FindViolations(ir);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].witness.ToString(), "size=0");
  EXPECT_EQ(v[1].witness.ToString(), "size=514");
  auto oracle = BruteForceOracle(ir, 4096);
  ASSERT_EQ(oracle.size(), 1u);
  EXPECT_EQ(oracle[0].witness.ToString(), "size=0");
}

TEST(FindViolationsTest, SignedNarrowing) {
  HarnessIR ir;
  ir.decls = {{"x", 16}};
  ir.body = {Stmt::Assume(Cond::Cmp(V("x"), CmpOp::kLe, C(300))),
             Stmt::Assign("c", V("x"), 8, true),
             Stmt::Assert(Cond::Cmp(V("c"), CmpOp::kGe, C(0)), 0)};
  auto v = FindViolations(ir);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].witness.ToString(), "x=128");
  EXPECT_EQ(ExecuteConcrete(ir, {{"x", 200}}).state.at("c"), -56);
  EXPECT_EQ(ExecuteConcrete(ir, {{"x", 260}}).state.at("c"), 4);
}

TEST(BruteForceOracleTest, ProduceFailingSet) {
  std::vector<Witness> all;
  auto v = BruteForceOracle(ProduceIr(), 4096, &all);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].witness.ToString(), "size=513");
  ASSERT_EQ(all.size(), 4096u - 512u);
  EXPECT_EQ(all.front().assignment[0].second, 513u);
  EXPECT_EQ(all.back().assignment[0].second, 4096u);
}

TEST(BruteForceOracleTest, GuardedIsEmpty) {
  EXPECT_TRUE(BruteForceOracle(Pbkdf2FixedIr(), 4096).empty());
}

TEST(BruteForceOracleTest, Scope) {
  HarnessIR ir;
  ir.decls = {{"a", 8}, {"b", 8}, {"c", 8}};
  EXPECT_THROW(BruteForceOracle(ir, 10), OracleScopeExceeded);
  EXPECT_THROW(BruteForceOracle(ProduceIr(), 70000), OracleScopeExceeded);
}

TEST(IrTest, ValidateRejectsUndeclared) {
  HarnessIR ir;
  ir.body = {Stmt::Assume(Cond::Cmp(V("ghost"), CmpOp::kLe, C(1)))};
  EXPECT_THROW(ir::Validate(ir), ir::ValidationError);
  EXPECT_THROW(Explore(ir), ir::ValidationError);
}

TEST(IrTest, WrapMatchesCasts) {
  EXPECT_EQ(ir::Wrap(-1, 32, false), Int{0xFFFFFFFFu});
  EXPECT_EQ(ir::Wrap(0x80000000LL, 32, true), -Int{0x80000000LL});
  EXPECT_EQ(ir::Wrap(300, 8, false), 44);
  EXPECT_EQ(ir::Wrap(-129, 8, true), 127);
}

// Random loop-free IR over at most two small symbols.
class IrGen {
 public:
  explicit IrGen(std::uint32_t seed) : rng_(seed) {}

  HarnessIR Make() {
    HarnessIR ir;
    int nsym = 1 + Pick(2);
    for (int i = 0; i < nsym; ++i) {
      ir.decls.push_back({std::string(1, static_cast<char>('a' + i)), Pick(2) ? 8 : 16});
      names_.push_back(ir.decls.back().name);
    }
    vars_.clear();
    site_ = 0;
    ir.body = Block(3, 4);
    return ir;
  }

 private:
  int Pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  LinExpr Expr() {
    LinExpr e = C(Pick(41) - 20);
    int terms = 1 + Pick(2);
    for (int i = 0; i < terms; ++i) {
      bool use_var = !vars_.empty() && Pick(3) == 0;
      const std::string& n = use_var ? vars_[Pick(vars_.size())] : names_[Pick(names_.size())];
      e += LinExpr::Var(n, Pick(5) - 2);
    }
    return e;
  }

  Cond Condition(int depth) {
    int k = depth > 0 ? Pick(5) : 0;
    if (k == 3) return Cond::Not(Condition(depth - 1));
    if (k == 4) return Cond::And({Condition(depth - 1), Condition(depth - 1)});
    return Cond::Cmp(Expr(), static_cast<CmpOp>(Pick(6)), C(Pick(61) - 30));
  }

  std::vector<Stmt> Block(int depth, int len) {
    std::vector<Stmt> out;
    int n = 1 + Pick(len);
    for (int i = 0; i < n; ++i) {
      switch (Pick(depth > 0 ? 6 : 4)) {
        case 0: {
          std::string v = "v" + std::to_string(vars_.size());
          LinExpr e = Expr();
          int width = Pick(2) ? 8 : 16;
          out.push_back(Stmt::Assign(v, e, width, Pick(2)));
          vars_.push_back(v);
          break;
        }
        case 1:
          out.push_back(Stmt::Assert(Condition(1), site_++));
          break;
        case 2:
          if (Pick(3) == 0) out.push_back(Stmt::Assume(Condition(1)));
          else out.push_back(Stmt::NoOp("n"));
          break;
        case 3:
          out.push_back(Stmt::Return(Expr()));
          break;
        default: {
          Cond c = Condition(2);
          auto t = Block(depth - 1, len);
          auto e = Pick(2) ? Block(depth - 1, len) : std::vector<Stmt>{};
          Stmt s = Stmt::If(std::move(c), std::move(t), std::move(e));
          s.site = static_cast<int>(i);
          out.push_back(std::move(s));
        }
      }
    }
    return out;
  }

  std::mt19937 rng_;
  std::vector<std::string> names_;
  std::vector<std::string> vars_;
  int site_ = 0;
};

std::vector<std::map<std::string, Int>> Assignments(const HarnessIR& ir, Int bound) {
  std::vector<std::map<std::string, Int>> out = {{}};
  for (const ir::SymDecl& d : ir.decls) {
    std::vector<std::map<std::string, Int>> next;
    for (const auto& a : out) {
      for (Int x = 0; x <= bound; ++x) {
        auto b = a;
        b[d.name] = x;
        next.push_back(std::move(b));
      }
    }
    out = std::move(next);
  }
  return out;
}

TEST(SymexecPropertyTest, PathsPartitionAndAgreeWithBruteForce) {
  constexpr Int kBound = 24;
  ExecConfig cfg;
  cfg.domain_bound = kBound;
  int checked = 0;
  int skipped = 0;
  size_t total_viol = 0, total_paths = 0;
  for (std::uint32_t seed = 1; seed <= 250; ++seed) {
    IrGen gen(seed);
    HarnessIR ir = gen.Make();
    std::vector<PathResult> paths;
    std::vector<Violation> found;
    try {
      paths = Explore(ir, cfg);
      found = FindViolations(ir, cfg);
    } catch (const UnsupportedConstraint&) {
      ++skipped;
      continue;
    }
    ++checked;
    total_viol += found.size();
    total_paths += paths.size();
    // Partition: every assignment that survives its assumptions lies on
    // exactly one path, and that path ends the way concrete execution does.
    for (const auto& a : Assignments(ir, kBound)) {
      ConcreteRun run = ExecuteConcrete(ir, a);
      std::vector<const PathResult*> hits;
      for (const PathResult& p : paths) {
        if (p.condition.Satisfied(a)) hits.push_back(&p);
      }
      if (!run.assumptions_hold) {
        ASSERT_TRUE(hits.empty()) << "seed " << seed << "\n" << ir::Dump(ir);
        continue;
      }
      ASSERT_EQ(hits.size(), 1u) << "seed " << seed << "\n" << ir::Dump(ir);
      EXPECT_EQ(hits[0]->failed_assert, run.failed_assert) << "seed " << seed;
      EXPECT_EQ(hits[0]->decisions, run.decisions) << "seed " << seed;
    }
    // Witnesses satisfy their path; minimal witness per site matches.
    std::map<int, Witness> minimal;
    for (const Violation& v : found) {
      EXPECT_TRUE(v.path.Satisfied(v.witness.AsMap()));
      auto it = minimal.find(v.assert_site);
      auto key = [](const Witness& w) {
        std::vector<std::uint64_t> k;
        for (const auto& [n, x] : w.assignment) k.push_back(x);
        return k;
      };
      if (it == minimal.end() || key(v.witness) < key(it->second)) {
        minimal[v.assert_site] = v.witness;
      }
    }
    auto oracle = BruteForceOracle(ir, kBound);
    ASSERT_EQ(oracle.size(), minimal.size()) << "seed " << seed << "\n" << ir::Dump(ir);
    for (const Violation& o : oracle) {
      ASSERT_TRUE(minimal.count(o.assert_site)) << "seed " << seed;
      EXPECT_EQ(minimal[o.assert_site], o.witness) << "seed " << seed;
    }
    // Determinism.
    EXPECT_EQ(FindViolations(ir, cfg), found);
  }
  EXPECT_GT(checked, 200);
  EXPECT_GT(total_viol, 100u);
  EXPECT_GT(total_paths, 2 * static_cast<size_t>(checked) - 100);
  EXPECT_LT(skipped, 25);
}

TEST(SymexecPropertyTest, GuardSoundness) {
  // Capacity oracle after arbitrary length arithmetic; a leading
  // Assume(len <= cap) must remove every violation.
  std::mt19937 rng(99);
  for (int iter = 0; iter < 200; ++iter) {
    Int cap = std::uniform_int_distribution<int>(0, 600)(rng);
    Int off = std::uniform_int_distribution<int>(-8, 8)(rng);
    HarnessIR ir;
    ir.decls = {{"len", 32}};
    ir.body = {
        Stmt::Assume(Cond::Cmp(V("len"), CmpOp::kLe, C(4096))),
        Stmt::Assign("n", V("len") + C(off), 64, true),
        Stmt::If(Cond::Cmp(V("n"), CmpOp::kLt, C(0)), {Stmt::Return(C(1))}),
        Stmt::If(Cond::Cmp(V("len"), CmpOp::kGt, C(cap)),
                 {Stmt::Assert(Cond::Cmp(C(0), CmpOp::kNe, C(0)), 0)}),
    };
    bool unguarded = !FindViolations(ir).empty();
    EXPECT_EQ(unguarded, cap < 4096);
    ir.body.insert(ir.body.begin(), Stmt::Assume(Cond::Cmp(V("len"), CmpOp::kLe, C(cap))));
    EXPECT_TRUE(FindViolations(ir).empty()) << "cap " << ir::IntToString(cap);
  }
}

}  // namespace
}  // namespace symtee::symexec
