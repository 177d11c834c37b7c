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


#include "solver.h"

#include <algorithm>
#include <limits>

namespace symtee::symexec {

using ir::Int;

namespace internal {

Int FloorDiv(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

namespace {

Int CeilDiv(Int a, Int b) { return -FloorDiv(-a, b); }

struct Term {
  size_t index;
  Int coeff;
};

// sum(terms) + constant <= 0
struct Row {
  std::vector<Term> terms;
  Int constant = 0;
};

std::vector<Row> Compile(const PathCondition& pc) {
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < pc.domain.size(); ++i) index[pc.domain[i].name] = i;
  std::vector<Row> rows;
  for (const Atom& a : pc.constraints) {
    if (a.expr.terms.size() > 3) {
      throw UnsupportedConstraint("constraint over more than 3 symbols: " + a.ToString());
    }
    Row row;
    row.constant = a.expr.constant;
    for (const auto& [name, k] : a.expr.terms) {
      auto it = index.find(name);
      if (it == index.end()) {
        throw UnsupportedConstraint("constraint references undeclared symbol '" + name + "'");
      }
      row.terms.push_back({it->second, k});
    }
    if (a.rel == Atom::Rel::kEq) {
      Row neg;
      neg.constant = -row.constant;
      for (const Term& t : row.terms) neg.terms.push_back({t.index, -t.coeff});
      rows.push_back(std::move(neg));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// One sweep of interval propagation. Returns false on contradiction.
bool Sweep(const std::vector<Row>& rows, Bounds* b, bool* changed) {
  for (const Row& row : rows) {
    Int min_sum = row.constant;
    for (const Term& t : row.terms) {
      const auto& [lo, hi] = (*b)[t.index];
      min_sum += std::min(t.coeff * lo, t.coeff * hi);
    }
    if (min_sum > 0) return false;
    for (const Term& t : row.terms) {
      auto& [lo, hi] = (*b)[t.index];
      Int own = std::min(t.coeff * lo, t.coeff * hi);
      Int limit = -(min_sum - own);  // coeff * x <= limit
      if (t.coeff > 0) {
        Int nhi = FloorDiv(limit, t.coeff);
        if (nhi < hi) {
          hi = nhi;
          *changed = true;
        }
      } else {
        Int nlo = CeilDiv(limit, t.coeff);
        if (nlo > lo) {
          lo = nlo;
          *changed = true;
        }
      }
      if (lo > hi) return false;
    }
  }
  return true;
}

// Closure over constraints of the form x - y <= c plus the current bounds.
bool DifferenceClosure(const std::vector<Row>& rows, Bounds* b, bool* changed) {
  std::vector<const Row*> diffs;
  for (const Row& row : rows) {
    if (row.terms.size() == 2 && row.terms[0].coeff == -row.terms[1].coeff &&
        (row.terms[0].coeff == 1 || row.terms[0].coeff == -1)) {
      diffs.push_back(&row);
    }
  }
  if (diffs.empty()) return true;
  const size_t n = b->size() + 1;  // node 0 is the constant zero
  const Int kInf = std::numeric_limits<Int>::max() / 4;
  // d[i][j]: upper bound on x_j - x_i.
  std::vector<std::vector<Int>> d(n, std::vector<Int>(n, kInf));
  for (size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (size_t v = 0; v < b->size(); ++v) {
    d[0][v + 1] = std::min(d[0][v + 1], (*b)[v].second);
    d[v + 1][0] = std::min(d[v + 1][0], -(*b)[v].first);
  }
  for (const Row* row : diffs) {
    const Term& p = row->terms[0].coeff == 1 ? row->terms[0] : row->terms[1];
    const Term& m = row->terms[0].coeff == 1 ? row->terms[1] : row->terms[0];
    // x_p - x_m <= -constant
    Int& slot = d[m.index + 1][p.index + 1];
    slot = std::min(slot, -row->constant);
  }
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      if (d[i][k] == kInf) continue;
      for (size_t j = 0; j < n; ++j) {
        if (d[k][j] == kInf) continue;
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
      }
    }
  }
  for (size_t i = 0; i < n; ++i) {
    if (d[i][i] < 0) return false;
  }
  for (size_t v = 0; v < b->size(); ++v) {
    auto& [lo, hi] = (*b)[v];
    if (d[0][v + 1] < hi) {
      hi = d[0][v + 1];
      *changed = true;
    }
    if (-d[v + 1][0] > lo) {
      lo = -d[v + 1][0];
      *changed = true;
    }
    if (lo > hi) return false;
  }
  return true;
}

bool Propagate(const std::vector<Row>& rows, Bounds* b) {
  for (const auto& [lo, hi] : *b) {
    if (lo > hi) return false;
  }
  // Non-unit coefficients can converge slowly; the search splits whatever
  // the sweep cap leaves undecided.
  for (int round = 0; round < 64; ++round) {
    bool changed = false;
    if (!Sweep(rows, b, &changed)) return false;
    if (!DifferenceClosure(rows, b, &changed)) return false;
    if (!changed) break;
  }
  return true;
}

bool RowsHold(const std::vector<Row>& rows, const Bounds& b) {
  for (const Row& row : rows) {
    Int sum = row.constant;
    for (const Term& t : row.terms) sum += t.coeff * b[t.index].first;
    if (sum > 0) return false;
  }
  return true;
}

class Search {
 public:
  Search(const std::vector<Row>& rows, std::size_t budget) : rows_(rows), budget_(budget) {}

  std::optional<Bounds> Run(Bounds b) {
    if (++nodes_ > budget_) {
      throw UnsupportedConstraint("solver search budget exhausted");
    }
    if (!Propagate(rows_, &b)) return std::nullopt;
    size_t split = b.size();
    for (size_t i = 0; i < b.size(); ++i) {
      if (b[i].first != b[i].second) {
        split = i;
        break;
      }
    }
    if (split == b.size()) {
      if (RowsHold(rows_, b)) return b;
      return std::nullopt;
    }
    auto [lo, hi] = b[split];
    Int mid = lo + (hi - lo) / 2;
    Bounds low = b;
    low[split] = {lo, mid};
    if (auto r = Run(std::move(low))) return r;
    b[split] = {mid + 1, hi};
    return Run(std::move(b));
  }

 private:
  const std::vector<Row>& rows_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
};

Bounds InitialBounds(const PathCondition& pc) {
  Bounds b;
  for (const SymbolDomain& d : pc.domain) b.emplace_back(d.lo, d.hi);
  return b;
}

}  // namespace

std::optional<Bounds> PropagateBounds(const PathCondition& pc) {
  std::vector<Row> rows = Compile(pc);
  Bounds b = InitialBounds(pc);
  if (!Propagate(rows, &b)) return std::nullopt;
  return b;
}

}  // namespace internal

std::optional<Witness> CheckFeasible(const PathCondition& pc, const ExecConfig& config) {
  std::vector<internal::Row> rows = internal::Compile(pc);
  internal::Search search(rows, config.solver_node_budget);
  std::optional<internal::Bounds> model = search.Run(internal::InitialBounds(pc));
  if (!model) return std::nullopt;
  Witness w;
  for (size_t i = 0; i < pc.domain.size(); ++i) {
    w.assignment.emplace_back(pc.domain[i].name,
                              static_cast<std::uint64_t>((*model)[i].first));
  }
  return w;
}

}  // namespace symtee::symexec
