// Copyright 2026 The Hetres Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hetres/matching.h"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "hetres/similarity.h"

namespace hetres {
namespace {

constexpr double kTight = 1e-9;

void SortByLeft(FieldMatchingSet &m) {
  std::sort(m.begin(), m.end(), [](const FieldPair &a, const FieldPair &b) {
    return a.left != b.left ? a.left < b.left : a.right < b.right;
  });
}

FieldMatchGraph MakeGraph(std::vector<FieldPair> edges) {
  FieldMatchGraph g;
  for (const FieldPair &e : edges) {
    g.left.push_back(e.left);
    g.right.push_back(e.right);
  }
  for (auto *side : {&g.left, &g.right}) {
    std::sort(side->begin(), side->end());
    side->erase(std::unique(side->begin(), side->end()), side->end());
  }
  g.edges = std::move(edges);
  return g;
}

// Hungarian method on a square cost matrix (minimization). Fills the row
// assignment and dual potentials with u[r] + v[c] <= cost[r][c], tight on
// the assignment.
void Hungarian(const std::vector<std::vector<double>> &cost,
               std::vector<int> &row_to_col, std::vector<double> &u,
               std::vector<double> &v) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual start column.
  std::vector<double> pu(n + 1, 0.0), pv(n + 1, 0.0);
  std::vector<int> owner(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    owner[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const int row0 = owner[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double cur = cost[row0 - 1][col - 1] - pu[row0] - pv[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= n; ++col) {
        if (used[col]) {
          pu[owner[col]] += delta;
          pv[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const int col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  row_to_col.assign(n, -1);
  for (int col = 1; col <= n; ++col) row_to_col[owner[col] - 1] = col - 1;
  u.assign(pu.begin() + 1, pu.end());
  v.assign(pv.begin() + 1, pv.end());
}

// Moves the perfect matching to the lexicographically smallest one inside
// the tight subgraph. Row r prefers positive-weight columns in ascending
// order; a row with no feasible positive column stays free so that its
// zero-weight column does not block later rows.
class LexRefiner {
 public:
  LexRefiner(const std::vector<std::vector<double>> &weights,
             std::vector<std::vector<bool>> tight, std::vector<int> row_to_col)
      : w_(weights),
        tight_(std::move(tight)),
        row_to_col_(std::move(row_to_col)),
        col_to_row_(row_to_col_.size()),
        fixed_(row_to_col_.size(), false) {
    for (std::size_t r = 0; r < row_to_col_.size(); ++r) {
      col_to_row_[row_to_col_[r]] = static_cast<int>(r);
    }
  }

  std::vector<int> Run() {
    const int n = static_cast<int>(row_to_col_.size());
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (!tight_[r][c] || w_[r][c] <= 0.0) continue;
        if (row_to_col_[r] == c || Reroute(r, c)) {
          fixed_[r] = true;
          break;
        }
      }
    }
    return row_to_col_;
  }

 private:
  // Reassigns row r to column c, repairing the rest through an alternating
  // path over free rows. Returns false (matching unchanged) if impossible.
  bool Reroute(int r, int c) {
    const int n = static_cast<int>(row_to_col_.size());
    const int displaced = col_to_row_[c];
    if (fixed_[displaced]) return false;
    const int target = row_to_col_[r];  // column released by r

    std::vector<int> prev_row(n, -1);  // BFS tree over columns
    std::vector<bool> seen_col(n, false);
    std::vector<int> queue = {displaced};
    seen_col[c] = true;
    int reached = -1;
    for (std::size_t head = 0; head < queue.size() && reached < 0; ++head) {
      const int x = queue[head];
      for (int y = 0; y < n; ++y) {
        if (!tight_[x][y] || seen_col[y]) continue;
        seen_col[y] = true;
        prev_row[y] = x;
        if (y == target) {
          reached = y;
          break;
        }
        const int next = col_to_row_[y];
        if (next == r || fixed_[next]) continue;
        queue.push_back(next);
      }
    }
    if (reached < 0) return false;

    // Walk back from the released column: each row on the path takes the
    // column it reached.
    int y = reached;
    while (true) {
      const int x = prev_row[y];
      const int old = row_to_col_[x];
      row_to_col_[x] = y;
      col_to_row_[y] = x;
      if (x == displaced) break;
      y = old;
    }
    row_to_col_[r] = c;
    col_to_row_[c] = r;
    return true;
  }

  const std::vector<std::vector<double>> &w_;
  std::vector<std::vector<bool>> tight_;
  std::vector<int> row_to_col_;
  std::vector<int> col_to_row_;
  std::vector<bool> fixed_;
};

}  // namespace

std::vector<int> MaxWeightAssignment(
    const std::vector<std::vector<double>> &weights) {
  const std::size_t n = weights.size();
  if (n == 0) return {};
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (weights[r].size() != n) {
      throw std::invalid_argument("assignment matrix must be square");
    }
    for (std::size_t c = 0; c < n; ++c) cost[r][c] = -weights[r][c];
  }
  std::vector<int> row_to_col;
  std::vector<double> u, v;
  Hungarian(cost, row_to_col, u, v);

  std::vector<std::vector<bool>> tight(n, std::vector<bool>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      tight[r][c] = cost[r][c] - u[r] - v[c] <= kTight;
    }
  }
  return LexRefiner(weights, std::move(tight), std::move(row_to_col)).Run();
}

FieldMatchGraph GraphFromRefined(std::span<const RefinedPair> refined) {
  std::vector<FieldPair> edges;
  edges.reserve(refined.size());
  for (const RefinedPair &p : refined) {
    edges.push_back({p.left_fid, p.right_fid, p.sim});
  }
  return MakeGraph(std::move(edges));
}

SimplifiedGraph BuildGraph(std::span<const RefinedPair> refined,
                           const FieldMatchingSet &forced) {
  SimplifiedGraph out;
  std::set<std::uint32_t> forced_left, forced_right;
  for (const FieldPair &f : forced) {
    if (!forced_left.insert(f.left).second ||
        !forced_right.insert(f.right).second) {
      throw std::logic_error(
          "promoted schema matchings conflict on a shared field");
    }
  }
  out.forced = forced;
  SortByLeft(out.forced);

  std::vector<FieldPair> edges;
  std::map<std::uint32_t, int> deg_left, deg_right;
  for (const RefinedPair &p : refined) {
    if (forced_left.count(p.left_fid) || forced_right.count(p.right_fid)) {
      continue;
    }
    edges.push_back({p.left_fid, p.right_fid, p.sim});
    ++deg_left[p.left_fid];
    ++deg_right[p.right_fid];
  }

  std::vector<FieldPair> residual;
  for (const FieldPair &e : edges) {
    if (deg_left[e.left] == 1 && deg_right[e.right] == 1) {
      out.mapped.push_back(e);
    } else {
      residual.push_back(e);
    }
  }
  SortByLeft(out.mapped);
  out.residual = MakeGraph(std::move(residual));
  return out;
}

KmResult KmMaxWeight(const FieldMatchGraph &graph) {
  KmResult out;
  if (graph.empty()) return out;
  const std::size_t rows = graph.left.size();
  const std::size_t cols = graph.right.size();
  const std::size_t n = std::max(rows, cols);

  auto index_of = [](const std::vector<std::uint32_t> &nodes,
                     std::uint32_t fid) {
    return static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), fid) - nodes.begin());
  };
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (const FieldPair &e : graph.edges) {
    double &cell = w[index_of(graph.left, e.left)][index_of(graph.right, e.right)];
    cell = std::max(cell, e.sim);
  }

  const std::vector<int> assignment = MaxWeightAssignment(w);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto c = static_cast<std::size_t>(assignment[r]);
    if (c >= cols || w[r][c] <= 0.0) continue;
    out.matching.push_back({graph.left[r], graph.right[c], w[r][c]});
  }
  SortByLeft(out.matching);
  for (const FieldPair &p : out.matching) out.weight += p.sim;
  return out;
}

std::vector<std::pair<AttrOrigin, AttrOrigin>> MatchingPredictions(
    const SuperRecord &a, const SuperRecord &b,
    const FieldMatchingSet &matching) {
  std::vector<std::pair<AttrOrigin, AttrOrigin>> out;
  for (const FieldPair &p : matching) {
    for (const AttrOrigin &x : a.field(p.left).origins) {
      for (const AttrOrigin &y : b.field(p.right).origins) {
        if (x.source != y.source) out.emplace_back(x, y);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Verification VerifyPair(const PairIndex &index, const RecordStore &store,
                        Rid i, Rid j, const FieldMatchingSet &forced) {
  const SuperRecord &a = store.Get(i);
  const SuperRecord &b = store.Get(j);
  const BoundResult bound = index.CalBound(i, j, a.size(), b.size());
  const SimplifiedGraph g = BuildGraph(bound.refined, forced);
  const KmResult km = KmMaxWeight(g.residual);

  Verification out;
  out.matching = g.forced;
  out.matching.insert(out.matching.end(), g.mapped.begin(), g.mapped.end());
  out.matching.insert(out.matching.end(), km.matching.begin(),
                      km.matching.end());
  SortByLeft(out.matching);
  ValidateMatching(out.matching, a.size(), b.size());
  out.sim = RecordSim(a, b, out.matching);
  out.predictions = MatchingPredictions(a, b, out.matching);
  return out;
}

}  // namespace hetres
