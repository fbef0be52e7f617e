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

#include "hetres/pair_index.h"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "json.hpp"

namespace hetres {
namespace {

IndexedPair Oriented(IndexedPair p) {
  if (p.left.rid > p.right.rid) std::swap(p.left, p.right);
  return p;
}

bool SameLabels(const IndexedPair &a, const IndexedPair &b) {
  return a.left == b.left && a.right == b.right;
}

}  // namespace

bool IndexOrder(const IndexedPair &a, const IndexedPair &b) {
  if (a.left.rid != b.left.rid) return a.left.rid < b.left.rid;
  if (a.right.rid != b.right.rid) return a.right.rid < b.right.rid;
  if (a.sim != b.sim) return a.sim > b.sim;
  if (a.left != b.left) return a.left < b.left;
  return a.right < b.right;
}

// --- construction ----------------------------------------------------------

PairIndex PairIndex::Build(const RecordStore &store, double xi,
                           const ValueSimilarity &metric) {
  // Join distinct values once, then expand to every occurrence.
  std::unordered_map<std::string, std::uint32_t> distinct;
  std::vector<std::string> values;
  std::vector<std::vector<ValueLabel>> occurrences;
  for (Rid rid : store.LiveRids()) {
    const SuperRecord &r = store.Get(rid);
    for (std::uint32_t f = 1; f <= r.size(); ++f) {
      const Field &field = r.field(f);
      for (std::uint32_t v = 1; v <= field.values.size(); ++v) {
        auto [it, fresh] = distinct.try_emplace(
            field.values[v - 1], static_cast<std::uint32_t>(values.size()));
        if (fresh) {
          values.push_back(field.values[v - 1]);
          occurrences.emplace_back();
        }
        occurrences[it->second].push_back(ValueLabel{rid, f, v});
      }
    }
  }

  std::vector<IndexedPair> pairs;
  auto expand = [&](std::uint32_t a, std::uint32_t b, double sim) {
    for (const ValueLabel &x : occurrences[a]) {
      for (const ValueLabel &y : occurrences[b]) {
        if (x.rid != y.rid) pairs.push_back(Oriented({x, y, sim}));
      }
    }
  };
  for (std::uint32_t u = 0; u < values.size(); ++u) {
    const auto &occ = occurrences[u];
    if (occ.size() < 2) continue;
    const double self = metric.Score(values[u], values[u]);
    if (self < xi) continue;
    for (std::size_t a = 0; a < occ.size(); ++a) {
      for (std::size_t b = a + 1; b < occ.size(); ++b) {
        if (occ[a].rid != occ[b].rid) {
          pairs.push_back(Oriented({occ[a], occ[b], self}));
        }
      }
    }
  }
  for (const JoinedPair &jp : metric.Join(values, xi)) {
    expand(jp.first, jp.second, jp.sim);
  }
  return FromPairs(std::move(pairs), xi);
}

PairIndex PairIndex::FromPairs(std::vector<IndexedPair> pairs, double xi) {
  PairIndex index;
  index.xi_ = xi;
  for (IndexedPair &p : pairs) {
    if (p.left.rid == p.right.rid) {
      throw std::invalid_argument("indexed pair inside one record");
    }
    p = Oriented(p);
  }
  std::sort(pairs.begin(), pairs.end(), IndexOrder);
  pairs.erase(std::unique(pairs.begin(), pairs.end(), SameLabels),
              pairs.end());
  index.pool_.reserve(pairs.size());
  index.order_.reserve(pairs.size());
  for (IndexedPair &p : pairs) {
    const auto id = static_cast<EntryId>(index.pool_.size());
    index.pool_.push_back(Entry{p, true});
    index.order_.push_back(id);
    index.IndexEntry(id);
  }
  index.live_ = pairs.size();
  return index;
}

void PairIndex::IndexEntry(EntryId id) {
  const IndexedPair &p = pool_[id].pair;
  const Rid top = std::max(p.left.rid, p.right.rid);
  if (by_rid_.size() <= top) by_rid_.resize(top + 1);
  by_rid_[p.left.rid].push_back(id);
  by_rid_[p.right.rid].push_back(id);
}

// --- lookup ----------------------------------------------------------------

std::pair<std::size_t, std::size_t> PairIndex::RunBounds(Rid i, Rid j) const {
  // First the run of left rid i, then the run of right rid j inside it.
  auto left_less = [&](EntryId e, Rid r) { return pool_[e].pair.left.rid < r; };
  auto left_greater = [&](Rid r, EntryId e) {
    return r < pool_[e].pair.left.rid;
  };
  auto lo = std::lower_bound(order_.begin(), order_.end(), i, left_less);
  auto hi = std::upper_bound(lo, order_.end(), i, left_greater);

  auto right_less = [&](EntryId e, Rid r) {
    return pool_[e].pair.right.rid < r;
  };
  auto right_greater = [&](Rid r, EntryId e) {
    return r < pool_[e].pair.right.rid;
  };
  auto first = std::lower_bound(lo, hi, j, right_less);
  auto last = std::upper_bound(first, hi, j, right_greater);
  return {static_cast<std::size_t>(first - order_.begin()),
          static_cast<std::size_t>(last - order_.begin())};
}

std::vector<IndexedPair> PairIndex::LookupRange(Rid i, Rid j) const {
  std::vector<IndexedPair> out;
  auto [first, last] = RunBounds(i, j);
  for (std::size_t pos = first; pos < last; ++pos) {
    const Entry &e = pool_[order_[pos]];
    if (e.live) out.push_back(e.pair);
  }
  return out;
}

BoundResult PairIndex::CalBound(Rid i, Rid j, std::size_t size_i,
                                std::size_t size_j) const {
  const std::vector<IndexedPair> run = LookupRange(i, j);
  return BoundFromRun(run, size_i, size_j);
}

std::vector<IndexedPair> PairIndex::Snapshot() const {
  std::vector<IndexedPair> out;
  out.reserve(live_);
  for (EntryId id : order_) {
    if (pool_[id].live) out.push_back(pool_[id].pair);
  }
  return out;
}

// --- maintenance -----------------------------------------------------------

void PairIndex::Insert(IndexedPair pair) {
  const auto id = static_cast<EntryId>(pool_.size());
  pool_.push_back(Entry{pair, true});
  auto pos = std::upper_bound(
      order_.begin(), order_.end(), id, [&](EntryId a, EntryId b) {
        return IndexOrder(pool_[a].pair, pool_[b].pair);
      });
  order_.insert(pos, id);
  IndexEntry(id);
  ++live_;
}

void PairIndex::ApplyMerge(Rid i, Rid j, Rid k, const LabelMap &labels) {
  if (i == j || (k != i && k != j)) {
    throw std::invalid_argument("surviving root must be one of the merged");
  }
  if (!labels.Covers(i) || !labels.Covers(j)) {
    throw std::invalid_argument("label map does not cover the merged pair");
  }
  std::vector<EntryId> touched;
  for (Rid r : {i, j}) {
    if (r < by_rid_.size()) {
      touched.insert(touched.end(), by_rid_[r].begin(), by_rid_[r].end());
      by_rid_[r].clear();
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  std::vector<IndexedPair> relabeled;
  for (EntryId id : touched) {
    Entry &e = pool_[id];
    if (!e.live) continue;
    e.live = false;
    --live_;
    const bool left_in = labels.Covers(e.pair.left.rid);
    const bool right_in = labels.Covers(e.pair.right.rid);
    if (left_in && right_in) continue;  // now inside one record
    IndexedPair p = e.pair;
    if (left_in) p.left = labels.Map(p.left);
    if (right_in) p.right = labels.Map(p.right);
    relabeled.push_back(Oriented(p));
  }

  // Values deduplicated by the merge collapse onto one label; keep one copy.
  std::sort(relabeled.begin(), relabeled.end(), IndexOrder);
  relabeled.erase(std::unique(relabeled.begin(), relabeled.end(), SameLabels),
                  relabeled.end());
  for (const IndexedPair &p : relabeled) Insert(p);

  if (order_.size() > 2 * live_ + 64) Compact();
}

void PairIndex::Compact() {
  std::vector<Entry> pool;
  pool.reserve(live_);
  for (EntryId id : order_) {
    if (pool_[id].live) pool.push_back(pool_[id]);
  }
  pool_ = std::move(pool);
  order_.resize(pool_.size());
  for (auto &ids : by_rid_) ids.clear();
  for (EntryId id = 0; id < pool_.size(); ++id) {
    order_[id] = id;
    IndexEntry(id);
  }
}

bool PairIndex::CheckInvariants() const {
  const IndexedPair *prev = nullptr;
  std::size_t count = 0;
  for (EntryId id : order_) {
    const Entry &e = pool_[id];
    if (!e.live) continue;
    ++count;
    if (e.pair.left.rid >= e.pair.right.rid) return false;
    if (prev != nullptr && IndexOrder(e.pair, *prev)) return false;
    prev = &e.pair;
  }
  return count == live_;
}

void PairIndex::Dump(std::ostream &out) const {
  std::size_t pid = 0;
  for (EntryId id : order_) {
    const Entry &e = pool_[id];
    if (!e.live) continue;
    const IndexedPair &p = e.pair;
    nlohmann::json row = {
        {"pid", ++pid},
        {"left", {p.left.rid, p.left.fid, p.left.vid}},
        {"right", {p.right.rid, p.right.fid, p.right.vid}},
        {"sim", p.sim},
    };
    out << row.dump() << '\n';
  }
}

// --- bounds ----------------------------------------------------------------

BoundResult BoundFromRun(std::span<const IndexedPair> run, std::size_t size_i,
                         std::size_t size_j) {
  const std::size_t denom = std::min(size_i, size_j);
  if (denom == 0) throw std::invalid_argument("record without fields");

  BoundResult out;
  // Pairs arrive best first, so the first hit of a field pair is its best
  // value pair, the first refined pair of a left field is its maximum and
  // the last one its minimum.
  std::vector<std::uint64_t> seen;
  std::unordered_map<std::uint32_t, std::pair<double, double>> per_left;
  std::unordered_map<std::uint32_t, int> left_cover;
  std::unordered_map<std::uint32_t, int> right_cover;
  for (const IndexedPair &p : run) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(p.left.fid) << 32) | p.right.fid;
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    out.refined.push_back({p.left.fid, p.right.fid, p.sim});
    auto [it, fresh] = per_left.try_emplace(p.left.fid, p.sim, p.sim);
    if (!fresh) it->second.second = p.sim;
    if (++left_cover[p.left.fid] > 1) out.has_multiple = true;
    if (++right_cover[p.right.fid] > 1) out.has_multiple = true;
  }

  std::vector<std::uint32_t> lefts;
  lefts.reserve(per_left.size());
  for (const auto &[fid, _] : per_left) lefts.push_back(fid);
  std::sort(lefts.begin(), lefts.end());
  double up = 0.0;
  double low = 0.0;
  for (std::uint32_t fid : lefts) {
    up += per_left[fid].first;
    low += per_left[fid].second;
  }
  out.up = up / static_cast<double>(denom);
  out.low = low / static_cast<double>(denom);
  return out;
}

BoundResult CalBound(const PairIndex &index, const RecordStore &store, Rid i,
                     Rid j) {
  return index.CalBound(i, j, store.Get(i).size(), store.Get(j).size());
}

CandidateSet GenerateCandidates(const PairIndex &index,
                                const RecordStore &store, double delta) {
  CandidateSet out;
  index.ForEachRun([&](Rid i, Rid j, std::span<const IndexedPair> run) {
    BoundResult b = BoundFromRun(run, store.Get(i).size(), store.Get(j).size());
    if (b.up < delta - kScoreEps) return;
    if (b.has_multiple) {
      out.candidates.emplace_back(i, j);
      return;
    }
    DirectPair d{i, j, b.up, {}};
    d.matching.reserve(b.refined.size());
    for (const RefinedPair &r : b.refined) {
      d.matching.push_back({r.left_fid, r.right_fid, r.sim});
    }
    std::sort(d.matching.begin(), d.matching.end(),
              [](const FieldPair &a, const FieldPair &b) {
                return a.left < b.left;
              });
    out.direct.push_back(std::move(d));
  });
  return out;
}

}  // namespace hetres
