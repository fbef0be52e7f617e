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

#ifndef HETRES_MATCHING_H_
#define HETRES_MATCHING_H_

#include <span>
#include <utility>
#include <vector>

#include "hetres/pair_index.h"
#include "hetres/records.h"

namespace hetres {

// Weighted bipartite graph between the fields of two records. Nodes are fids;
// only fields covered by an edge are listed.
struct FieldMatchGraph {
  std::vector<std::uint32_t> left;   // sorted
  std::vector<std::uint32_t> right;  // sorted
  std::vector<FieldPair> edges;

  bool empty() const { return edges.empty(); }
};

// Graph over every similar field pair, without simplification.
FieldMatchGraph GraphFromRefined(std::span<const RefinedPair> refined);

struct SimplifiedGraph {
  FieldMatchGraph residual;
  FieldMatchingSet mapped;  // edges whose endpoints both have degree 1
  FieldMatchingSet forced;
};

// Removes the forced pairs and their endpoints, then moves every edge whose
// endpoints both have degree one into `mapped`. Throws std::logic_error when
// two forced pairs share a field.
SimplifiedGraph BuildGraph(std::span<const RefinedPair> refined,
                           const FieldMatchingSet &forced);

struct KmResult {
  FieldMatchingSet matching;  // sorted by left fid
  double weight = 0.0;
};

// Maximum weight matching by Kuhn-Munkres. The smaller side is padded with
// zero-weight dummies; zero-weight assignments are dropped from the result.
// Among optimal matchings the lexicographically smallest one is returned:
// left fields in ascending order each take the lowest right field that still
// admits an optimal completion.
KmResult KmMaxWeight(const FieldMatchGraph &graph);

// Maximum weight perfect assignment of a dense square matrix. Returns the
// column assigned to each row. Exposed for testing.
std::vector<int> MaxWeightAssignment(
    const std::vector<std::vector<double>> &weights);

struct Verification {
  double sim = 0.0;
  FieldMatchingSet matching;  // forced ∪ mapped ∪ KM, sorted by left fid
  // (left origin, right origin) for every source-attribute pair under a
  // matched field pair, deduplicated; origins from the same source skipped.
  std::vector<std::pair<AttrOrigin, AttrOrigin>> predictions;
};

// Record similarity of live records i < j through the index.
Verification VerifyPair(const PairIndex &index, const RecordStore &store,
                        Rid i, Rid j, const FieldMatchingSet &forced = {});

// Source-attribute pairs implied by a field matching between a and b.
std::vector<std::pair<AttrOrigin, AttrOrigin>> MatchingPredictions(
    const SuperRecord &a, const SuperRecord &b,
    const FieldMatchingSet &matching);

}  // namespace hetres

#endif  // HETRES_MATCHING_H_
