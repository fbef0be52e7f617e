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

// Sorted catalogue of similar cross-record value pairs.
//
// Every pair is stored with its left label on the smaller rid. Pairs are
// ordered by (left rid, right rid) ascending and, within one record pair, by
// similarity descending; remaining ties fall back to label order so that the
// layout is fully deterministic. All value pairs of two records therefore
// form one contiguous run that is located with two nested binary searches,
// and the first pair seen for a field pair is its best one.
//
// Merging two records deletes the pairs between them and relabels the pairs
// touching either side. Deleted entries are tombstoned in place and the
// relabeled entries are re-inserted at their sorted position, so a merge costs
// O(touched * log |V|) searches. Tombstones are compacted once they outnumber
// live entries.

#ifndef HETRES_PAIR_INDEX_H_
#define HETRES_PAIR_INDEX_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "hetres/records.h"
#include "hetres/similarity.h"

namespace hetres {

struct IndexedPair {
  ValueLabel left;   // left.rid < right.rid
  ValueLabel right;
  double sim = 0.0;

  bool operator==(const IndexedPair &) const = default;
};

// Strict weak order of the index.
bool IndexOrder(const IndexedPair &a, const IndexedPair &b);

// Best value pair of one field pair.
struct RefinedPair {
  std::uint32_t left_fid = 0;
  std::uint32_t right_fid = 0;
  double sim = 0.0;

  bool operator==(const RefinedPair &) const = default;
};

struct BoundResult {
  double up = 0.0;
  double low = 0.0;
  std::vector<RefinedPair> refined;  // in index order
  bool has_multiple = false;         // some field covered twice, either side
};

class PairIndex {
 public:
  PairIndex() = default;

  // Similarity join over every value of the live records of `store`; keeps
  // cross-record pairs scoring at least `xi`.
  static PairIndex Build(const RecordStore &store, double xi,
                         const ValueSimilarity &metric);

  // Index over explicit pairs. Orientation is fixed and the pairs are sorted;
  // pairs inside one record are rejected.
  static PairIndex FromPairs(std::vector<IndexedPair> pairs, double xi);

  double xi() const { return xi_; }
  std::size_t size() const { return live_; }
  bool empty() const { return live_ == 0; }

  // Live pairs with left rid i and right rid j (i < j), best first.
  std::vector<IndexedPair> LookupRange(Rid i, Rid j) const;

  // Bounds for records i < j of sizes size_i and size_j.
  BoundResult CalBound(Rid i, Rid j, std::size_t size_i,
                       std::size_t size_j) const;

  // Live pairs in index order; position + 1 is the pid.
  std::vector<IndexedPair> Snapshot() const;

  // Calls fn(i, j, run) for every record pair present in the index, in index
  // order; `run` spans that pair's live entries.
  template <typename Fn>
  void ForEachRun(Fn &&fn) const;

  // Index maintenance after k = union(i, j) and the record merge described by
  // `labels` (which must cover i and j).
  void ApplyMerge(Rid i, Rid j, Rid k, const LabelMap &labels);

  // Full scan: orientation and sort order of the live entries.
  bool CheckInvariants() const;

  // Writes one JSON line per pair: {"pid","left","right","sim"}.
  void Dump(std::ostream &out) const;

 private:
  using EntryId = std::uint32_t;

  struct Entry {
    IndexedPair pair;
    bool live = true;
  };

  void Insert(IndexedPair pair);
  void IndexEntry(EntryId id);
  void Compact();
  std::pair<std::size_t, std::size_t> RunBounds(Rid i, Rid j) const;

  double xi_ = 0.0;
  std::vector<Entry> pool_;
  std::vector<EntryId> order_;  // sorted by IndexOrder; may hold tombstones
  std::vector<std::vector<EntryId>> by_rid_;  // entries touching each rid
  std::size_t live_ = 0;
};

// Bounds over one run of pairs of the same record pair in index order.
BoundResult BoundFromRun(std::span<const IndexedPair> run, std::size_t size_i,
                         std::size_t size_j);

BoundResult CalBound(const PairIndex &index, const RecordStore &store, Rid i,
                     Rid j);

// A record pair whose similarity the index determines exactly.
struct DirectPair {
  Rid i = 0;
  Rid j = 0;
  double score = 0.0;
  FieldMatchingSet matching;
};

struct CandidateSet {
  std::vector<std::pair<Rid, Rid>> candidates;
  std::vector<DirectPair> direct;
};

// Slack for threshold comparisons on sums of similarities.
inline constexpr double kScoreEps = 1e-9;

// One pass over the index: record pairs with up < delta are pruned, pairs
// without any multiple field are resolved directly, the rest are candidates.
CandidateSet GenerateCandidates(const PairIndex &index,
                                const RecordStore &store, double delta);

// --- implementation --------------------------------------------------------

template <typename Fn>
void PairIndex::ForEachRun(Fn &&fn) const {
  std::vector<IndexedPair> run;
  std::size_t pos = 0;
  while (pos < order_.size()) {
    const IndexedPair &head = pool_[order_[pos]].pair;
    const Rid i = head.left.rid;
    const Rid j = head.right.rid;
    run.clear();
    for (; pos < order_.size(); ++pos) {
      const Entry &e = pool_[order_[pos]];
      if (e.pair.left.rid != i || e.pair.right.rid != j) break;
      if (e.live) run.push_back(e.pair);
    }
    if (!run.empty()) fn(i, j, std::span<const IndexedPair>(run));
  }
}

}  // namespace hetres

#endif  // HETRES_PAIR_INDEX_H_
