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

#ifndef HETRES_RECORDS_H_
#define HETRES_RECORDS_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hetres {

// Record identifier. Original records are numbered 1..n in input order; a
// super record is identified by the union-find root of its members.
using Rid = std::uint32_t;

// Position of one value in the record store. All components are 1-based.
struct ValueLabel {
  Rid rid = 0;
  std::uint32_t fid = 0;
  std::uint32_t vid = 0;

  auto operator<=>(const ValueLabel &) const = default;
};

// Source attribute a field was populated from.
struct AttrOrigin {
  std::string source;
  std::string attr;

  auto operator<=>(const AttrOrigin &) const = default;
};

// One field of a super record: a set of distinct normalized values plus every
// source attribute that was merged into it.
struct Field {
  std::vector<std::string> values;
  std::vector<AttrOrigin> origins;

  // Appends `value` unless an identical value is already present. Returns the
  // 1-based vid of the value inside this field.
  std::uint32_t AddValue(std::string value);
  void AddOrigin(const AttrOrigin &origin);
  bool HasOrigin(const AttrOrigin &origin) const;
};

struct SuperRecord {
  Rid rid = 0;
  std::vector<Field> fields;
  std::vector<Rid> members;  // sorted original record ids

  std::size_t size() const { return fields.size(); }
  const Field &field(std::uint32_t fid) const { return fields.at(fid - 1); }
};

// A matched field pair: left fid refers to the first record of a comparison,
// right fid to the second.
struct FieldPair {
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double sim = 0.0;

  bool operator==(const FieldPair &) const = default;
};

// One-to-one set of field pairs (no fid repeats on either side).
using FieldMatchingSet = std::vector<FieldPair>;

// Throws std::invalid_argument unless `matching` is one-to-one and every fid
// is within [1, left_size] x [1, right_size].
void ValidateMatching(const FieldMatchingSet &matching, std::size_t left_size,
                      std::size_t right_size);

// Trims surrounding whitespace and folds ASCII letters to lower case.
std::string NormalizeValue(std::string_view raw);

// Union-find over record ids 1..n with union by size and path compression.
class EntityForest {
 public:
  EntityForest() = default;
  explicit EntityForest(std::size_t n);

  std::size_t size() const { return parent_.size(); }
  bool Contains(Rid i) const { return i >= 1 && i <= parent_.size(); }

  // Throws std::out_of_range for ids outside 1..n.
  Rid Find(Rid i);
  Rid Find(Rid i) const;

  // Links the trees of i and j and returns the surviving root, which is
  // always one of the two prior roots. The larger tree wins; on equal sizes
  // the root of i wins.
  Rid Union(Rid i, Rid j);

 private:
  void Check(Rid i) const;

  std::vector<Rid> parent_;
  std::vector<std::uint32_t> size_;
};

// Old label -> new label translation produced by a merge. Only labels of the
// two merged records are translated.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(Rid a, Rid b, std::vector<std::vector<ValueLabel>> a_map,
           std::vector<std::vector<ValueLabel>> b_map)
      : a_(a), b_(b), a_map_(std::move(a_map)), b_map_(std::move(b_map)) {}

  Rid a() const { return a_; }
  Rid b() const { return b_; }
  bool Covers(Rid rid) const { return rid == a_ || rid == b_; }

  // Throws std::out_of_range if `label` is not a value of a or b.
  ValueLabel Map(const ValueLabel &label) const;

 private:
  Rid a_ = 0;
  Rid b_ = 0;
  std::vector<std::vector<ValueLabel>> a_map_;  // [fid-1][vid-1]
  std::vector<std::vector<ValueLabel>> b_map_;
};

struct MergeOutcome {
  SuperRecord record;
  LabelMap labels;
};

// Computes a ⊕ b. `matching` pairs fields of a (left) with fields of b
// (right). The result keeps a's fields in place, fusing each matched b-field
// into its partner, and appends b's unmatched fields in b's order. Within a
// fused field a's values come first; values identical to one already present
// are stored once. The record id is union(a.rid, b.rid).
//
// Throws std::invalid_argument when a and b already share a root or the
// matching is not a valid one-to-one matching.
MergeOutcome MergeSuperRecords(const SuperRecord &a, const SuperRecord &b,
                               const FieldMatchingSet &matching,
                               EntityForest &forest);

// Live super records keyed by root rid, plus the external ids of the original
// records.
class RecordStore {
 public:
  RecordStore() = default;

  // Adds a basic record with one value per field. Values must already be
  // normalized. Returns its rid (1-based, insertion order).
  Rid AddBasic(std::string external_id,
               const std::vector<std::pair<AttrOrigin, std::string>> &fields);

  // Adds a record whose fields may hold several values. Used by tests and by
  // callers that preload merged data.
  Rid Add(std::string external_id, std::vector<Field> fields);

  std::size_t original_count() const { return records_.size(); }
  std::size_t live_count() const { return live_count_; }

  bool IsLive(Rid rid) const;
  const SuperRecord &Get(Rid rid) const;
  const std::string &external_id(Rid rid) const { return ids_.at(rid - 1); }

  // Live rids in ascending order.
  std::vector<Rid> LiveRids() const;

  // Replaces records i and j by `merged`, whose rid must be i or j.
  void ReplaceMerged(Rid i, Rid j, SuperRecord merged);

 private:
  std::vector<SuperRecord> records_;  // indexed by rid - 1
  std::vector<bool> live_;
  std::vector<std::string> ids_;
  std::size_t live_count_ = 0;
};

}  // namespace hetres

#endif  // HETRES_RECORDS_H_
