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


#include <algorithm>
#include <functional>
#include <limits>
#include <random>

#include "doctest.h"
#include "hetres/io.h"
#include "hetres/matching.h"
#include "oracles.h"

namespace hetres {
namespace {

using Approx = doctest::Approx;

// Random bipartite graph with up to 8 + 8 nodes; weights drawn from `levels`
// (when given) so that ties are common.
FieldMatchGraph RandomGraph(std::mt19937 &rng, const std::vector<double> &levels) {
  const int rows = 1 + static_cast<int>(rng() % 8);
  const int cols = 1 + static_cast<int>(rng() % 8);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<FieldPair> edges;
  for (int r = 1; r <= rows; ++r) {
    for (int c = 1; c <= cols; ++c) {
      if (rng() % 3 != 0) continue;
      const double w = levels.empty() ? u(rng) : levels[rng() % levels.size()];
      edges.push_back({static_cast<std::uint32_t>(r),
                       static_cast<std::uint32_t>(c), w});
    }
  }
  std::vector<RefinedPair> refined;
  for (const FieldPair &e : edges) refined.push_back({e.left, e.right, e.sim});
  return GraphFromRefined(refined);
}

std::vector<std::vector<double>> Dense(const FieldMatchGraph &g,
                                       std::uint32_t rows, std::uint32_t cols) {
  std::vector<std::vector<double>> w(rows, std::vector<double>(cols, 0.0));
  for (const FieldPair &e : g.edges) w[e.left - 1][e.right - 1] = e.sim;
  return w;
}

std::vector<RefinedPair> Refined(const FieldMatchGraph &g) {
  std::vector<RefinedPair> out;
  for (const FieldPair &e : g.edges) out.push_back({e.left, e.right, e.sim});
  return out;
}

TEST_CASE("MaxWeightAssignment is optimal on random square matrices") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    std::vector<std::vector<double>> w(n, std::vector<double>(n));
    for (auto &row : w) {
      for (double &x : row) x = rng() % 4 == 0 ? 0.0 : u(rng);
    }
    const std::vector<int> a = MaxWeightAssignment(w);
    std::vector<bool> used(n, false);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      REQUIRE(a[r] >= 0);
      REQUIRE(static_cast<std::size_t>(a[r]) < n);
      CHECK_FALSE(used[a[r]]);
      used[a[r]] = true;
      total += w[r][a[r]];
    }
    CHECK(total == Approx(testing::BruteMaxMatching(w)));
  }
  CHECK_THROWS(MaxWeightAssignment({{1.0, 2.0}}));
  CHECK(MaxWeightAssignment({}).empty());
}

TEST_CASE("KM with simplification matches exhaustive enumeration") {
  std::mt19937 rng(67);
  for (int trial = 0; trial < 500; ++trial) {
    const FieldMatchGraph g = RandomGraph(rng, {});
    if (g.empty()) continue;
    const auto w = Dense(g, 8, 8);
    const double best = testing::BruteMaxMatching(w);

    const KmResult plain = KmMaxWeight(g);
    CHECK(plain.weight == Approx(best));

    const SimplifiedGraph s = BuildGraph(Refined(g), {});
    const KmResult km = KmMaxWeight(s.residual);
    double total = km.weight;
    for (const FieldPair &p : s.mapped) total += p.sim;
    CHECK(total == Approx(best));

    FieldMatchingSet all = s.mapped;
    all.insert(all.end(), km.matching.begin(), km.matching.end());
    CHECK_NOTHROW(ValidateMatching(all, 8, 8));
  }
}

// Lexicographically smallest optimum: rows ascending, each taking the lowest
// column (unmatched last) that still allows an optimal completion.
std::vector<int> BruteLexOptimum(const std::vector<std::vector<double>> &w) {
  const std::size_t rows = w.size(), cols = w[0].size();
  const double best = testing::BruteMaxMatching(w);
  std::vector<int> cur(rows, -1), out;
  std::vector<bool> used(cols, false);
  const int kFree = std::numeric_limits<int>::max();
  std::function<void(std::size_t, double)> go = [&](std::size_t r, double acc) {
    if (r == rows) {
      if (acc < best - 1e-9) return;
      std::vector<int> key = cur;
      for (int &k : key) if (k < 0) k = kFree;
      std::vector<int> have = out;
      for (int &k : have) if (k < 0) k = kFree;
      if (out.empty() || key < have) out = cur;
      return;
    }
    cur[r] = -1;
    go(r + 1, acc);
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c] || w[r][c] <= 0.0) continue;
      used[c] = true;
      cur[r] = static_cast<int>(c);
      go(r + 1, acc + w[r][c]);
      used[c] = false;
      cur[r] = -1;
    }
  };
  go(0, 0.0);
  return out;
}

TEST_CASE("KM returns the lexicographically smallest optimal matching") {
  std::mt19937 rng(71);
  for (int trial = 0; trial < 500; ++trial) {
    const FieldMatchGraph g = RandomGraph(rng, {0.5, 1.0});
    if (g.empty()) continue;
    const auto w = Dense(g, 8, 8);
    const std::vector<int> want = BruteLexOptimum(w);
    std::vector<int> got(8, -1);
    for (const FieldPair &p : KmMaxWeight(g).matching) {
      got[p.left - 1] = static_cast<int>(p.right - 1);
    }
    CHECK(got == want);
  }
}

TEST_CASE("ties resolve toward the lowest field ids") {
  std::vector<RefinedPair> refined = {
      {1, 1, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}, {2, 2, 1.0}};
  const KmResult km = KmMaxWeight(GraphFromRefined(refined));
  CHECK(km.matching == FieldMatchingSet{{1, 1, 1.0}, {2, 2, 1.0}});
  CHECK(km.weight == 2.0);
}

TEST_CASE("BuildGraph moves degree-one edges and removes forced fields") {
  const std::vector<RefinedPair> refined = {
      {1, 1, 0.9}, {2, 2, 0.8}, {2, 3, 0.7}, {3, 3, 0.6}, {4, 4, 0.5}};
  const SimplifiedGraph s = BuildGraph(refined, {});
  CHECK(s.mapped == FieldMatchingSet{{1, 1, 0.9}, {4, 4, 0.5}});
  CHECK(s.residual.edges.size() == 3);
  CHECK(s.residual.left == std::vector<std::uint32_t>{2, 3});
  CHECK(s.residual.right == std::vector<std::uint32_t>{2, 3});

  const SimplifiedGraph f = BuildGraph(refined, {{2, 3, 0.7}});
  CHECK(f.forced == FieldMatchingSet{{2, 3, 0.7}});
  CHECK(f.mapped == FieldMatchingSet{{1, 1, 0.9}, {4, 4, 0.5}});
  CHECK(f.residual.empty());

  CHECK_THROWS_AS(BuildGraph(refined, {{1, 1, 0.9}, {1, 2, 0.1}}),
                  std::logic_error);
  CHECK_THROWS_AS(BuildGraph(refined, {{1, 1, 0.9}, {2, 1, 0.1}}),
                  std::logic_error);
}

TEST_CASE("zero-weight padding never reaches the matching") {
  const std::vector<RefinedPair> refined = {{1, 1, 0.5}, {2, 1, 0.9}};
  const KmResult km = KmMaxWeight(GraphFromRefined(refined));
  CHECK(km.matching == FieldMatchingSet{{2, 1, 0.9}});
}

RecordStore SixBySix() {
  RecordStore store;
  for (const char *id : {"a", "b"}) {
    std::vector<std::pair<AttrOrigin, std::string>> fields;
    for (int f = 1; f <= 6; ++f) {
      fields.push_back({AttrOrigin{id, "f" + std::to_string(f)},
                        std::string(id) + std::to_string(f)});
    }
    store.AddBasic(id, fields);
  }
  return store;
}

TEST_CASE("VerifyPair on a mocked refined set") {
  const RecordStore store = SixBySix();
  const PairIndex index = PairIndex::FromPairs(
      {{{1, 2, 1}, {2, 4, 1}, 0.37},
       {{1, 3, 1}, {2, 1, 1}, 0.33},
       {{1, 3, 1}, {2, 2, 1}, 1.0},
       {{1, 4, 1}, {2, 3, 1}, 1.0},
       {{1, 5, 1}, {2, 5, 1}, 1.0}},
      0.3);
  const Verification v = VerifyPair(index, store, 1, 2);
  CHECK(v.sim == Approx(3.37 / 6.0));
  CHECK(v.matching == FieldMatchingSet{{2, 4, 0.37}, {3, 2, 1.0},
                                       {4, 3, 1.0}, {5, 5, 1.0}});
  CHECK(v.predictions.size() == 4);
  CHECK(v.predictions[0].first == AttrOrigin{"a", "f2"});
  CHECK(v.predictions[0].second == AttrOrigin{"b", "f4"});

  // A forced pair overrides the instance evidence.
  const Verification f = VerifyPair(index, store, 1, 2, {{3, 1, 0.33}});
  CHECK(f.sim == Approx((0.37 + 0.33 + 1.0 + 1.0) / 6.0));
}

TEST_CASE("VerifyPair agrees with brute-force record similarity") {
  std::mt19937 rng(73);
  const QGramJaccard metric;
  for (int trial = 0; trial < 500; ++trial) {
    const double xi = 0.3 + 0.1 * (trial % 5);
    const RecordStore store = testing::RandomStore(rng, 4, 6);
    const PairIndex index = PairIndex::Build(store, xi, metric);
    for (Rid i = 1; i <= 4; ++i) {
      for (Rid j = i + 1; j <= 4; ++j) {
        const Verification v = VerifyPair(index, store, i, j);
        CHECK(v.sim == Approx(testing::BruteRecordSim(
                           store.Get(i), store.Get(j), metric, xi)));
      }
    }
  }
}

TEST_CASE("predictions skip attribute pairs within one source") {
  SuperRecord a, b;
  Field fa, fb;
  fa.AddValue("x");
  fa.AddOrigin({"s1", "name"});
  fb.AddValue("x");
  fb.AddOrigin({"s1", "name"});
  fb.AddOrigin({"s2", "fullname"});
  a.fields = {fa};
  b.fields = {fb};
  const auto p = MatchingPredictions(a, b, {{1, 1, 1.0}});
  REQUIRE(p.size() == 1);
  CHECK(p[0].second == AttrOrigin{"s2", "fullname"});
}

}  // namespace
}  // namespace hetres
