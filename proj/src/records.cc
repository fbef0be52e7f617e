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

#include "hetres/records.h"

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <string>

namespace hetres {

std::uint32_t Field::AddValue(std::string value) {
  auto it = std::find(values.begin(), values.end(), value);
  if (it != values.end()) {
    return static_cast<std::uint32_t>(it - values.begin()) + 1;
  }
  values.push_back(std::move(value));
  return static_cast<std::uint32_t>(values.size());
}

void Field::AddOrigin(const AttrOrigin &origin) {
  if (!HasOrigin(origin)) origins.push_back(origin);
}

bool Field::HasOrigin(const AttrOrigin &origin) const {
  return std::find(origins.begin(), origins.end(), origin) != origins.end();
}

void ValidateMatching(const FieldMatchingSet &matching, std::size_t left_size,
                      std::size_t right_size) {
  std::vector<bool> left_used(left_size + 1, false);
  std::vector<bool> right_used(right_size + 1, false);
  for (const FieldPair &p : matching) {
    if (p.left < 1 || p.left > left_size || p.right < 1 ||
        p.right > right_size) {
      throw std::invalid_argument("field matching refers to a missing field");
    }
    if (left_used[p.left] || right_used[p.right]) {
      throw std::invalid_argument("field matching is not one-to-one");
    }
    left_used[p.left] = right_used[p.right] = true;
  }
}

std::string NormalizeValue(std::string_view raw) {
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && is_space(raw[begin])) ++begin;
  while (end > begin && is_space(raw[end - 1])) --end;
  std::string out(raw.substr(begin, end - begin));
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// --- EntityForest ----------------------------------------------------------

EntityForest::EntityForest(std::size_t n) : parent_(n), size_(n, 1) {
  for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<Rid>(i + 1);
}

void EntityForest::Check(Rid i) const {
  if (!Contains(i)) {
    throw std::out_of_range("record id " + std::to_string(i) +
                            " is not registered");
  }
}

Rid EntityForest::Find(Rid i) {
  Check(i);
  Rid root = i;
  while (parent_[root - 1] != root) root = parent_[root - 1];
  while (parent_[i - 1] != root) {
    Rid next = parent_[i - 1];
    parent_[i - 1] = root;
    i = next;
  }
  return root;
}

Rid EntityForest::Find(Rid i) const {
  Check(i);
  while (parent_[i - 1] != i) i = parent_[i - 1];
  return i;
}

Rid EntityForest::Union(Rid i, Rid j) {
  Rid ri = Find(i);
  Rid rj = Find(j);
  if (ri == rj) return ri;
  if (size_[ri - 1] < size_[rj - 1]) std::swap(ri, rj);
  parent_[rj - 1] = ri;
  size_[ri - 1] += size_[rj - 1];
  return ri;
}

// --- LabelMap --------------------------------------------------------------

ValueLabel LabelMap::Map(const ValueLabel &label) const {
  const auto &table = label.rid == a_   ? a_map_
                      : label.rid == b_ ? b_map_
                                        : throw std::out_of_range(
                                              "label outside the merged pair");
  return table.at(label.fid - 1).at(label.vid - 1);
}

// --- Merge -----------------------------------------------------------------

MergeOutcome MergeSuperRecords(const SuperRecord &a, const SuperRecord &b,
                               const FieldMatchingSet &matching,
                               EntityForest &forest) {
  if (forest.Find(a.rid) == forest.Find(b.rid)) {
    throw std::invalid_argument("cannot merge a record with itself");
  }
  ValidateMatching(matching, a.size(), b.size());

  const Rid k = forest.Union(a.rid, b.rid);

  // partner[fid of b] = fid of a it is fused into, or 0.
  std::vector<std::uint32_t> partner(b.size() + 1, 0);
  for (const FieldPair &p : matching) partner[p.right] = p.left;

  SuperRecord out;
  out.rid = k;
  out.fields = a.fields;

  std::vector<std::vector<ValueLabel>> a_map(a.size());
  for (std::uint32_t f = 1; f <= a.size(); ++f) {
    const Field &field = a.field(f);
    a_map[f - 1].reserve(field.values.size());
    for (std::uint32_t v = 1; v <= field.values.size(); ++v) {
      a_map[f - 1].push_back(ValueLabel{k, f, v});
    }
  }

  std::vector<std::vector<ValueLabel>> b_map(b.size());
  for (std::uint32_t f = 1; f <= b.size(); ++f) {
    const Field &src = b.field(f);
    std::uint32_t target = partner[f];
    if (target == 0) {
      out.fields.push_back(Field{});
      target = static_cast<std::uint32_t>(out.fields.size());
    }
    Field &dst = out.fields[target - 1];
    for (const AttrOrigin &o : src.origins) dst.AddOrigin(o);
    for (const std::string &value : src.values) {
      b_map[f - 1].push_back(ValueLabel{k, target, dst.AddValue(value)});
    }
  }

  out.members.reserve(a.members.size() + b.members.size());
  std::merge(a.members.begin(), a.members.end(), b.members.begin(),
             b.members.end(), std::back_inserter(out.members));

  return MergeOutcome{std::move(out),
                      LabelMap(a.rid, b.rid, std::move(a_map),
                               std::move(b_map))};
}

// --- RecordStore -----------------------------------------------------------

Rid RecordStore::AddBasic(
    std::string external_id,
    const std::vector<std::pair<AttrOrigin, std::string>> &fields) {
  std::vector<Field> out;
  out.reserve(fields.size());
  for (const auto &[origin, value] : fields) {
    Field f;
    f.values.push_back(value);
    f.origins.push_back(origin);
    out.push_back(std::move(f));
  }
  return Add(std::move(external_id), std::move(out));
}

Rid RecordStore::Add(std::string external_id, std::vector<Field> fields) {
  if (fields.empty()) {
    throw std::invalid_argument("record " + external_id + " has no fields");
  }
  for (const Field &f : fields) {
    if (f.values.empty()) {
      throw std::invalid_argument("record " + external_id +
                                  " has an empty field");
    }
  }
  const Rid rid = static_cast<Rid>(records_.size() + 1);
  SuperRecord r;
  r.rid = rid;
  r.fields = std::move(fields);
  r.members = {rid};
  records_.push_back(std::move(r));
  live_.push_back(true);
  ids_.push_back(std::move(external_id));
  ++live_count_;
  return rid;
}

bool RecordStore::IsLive(Rid rid) const {
  return rid >= 1 && rid <= records_.size() && live_[rid - 1];
}

const SuperRecord &RecordStore::Get(Rid rid) const {
  if (!IsLive(rid)) {
    throw std::out_of_range("record " + std::to_string(rid) + " is not live");
  }
  return records_[rid - 1];
}

std::vector<Rid> RecordStore::LiveRids() const {
  std::vector<Rid> out;
  out.reserve(live_count_);
  for (Rid r = 1; r <= records_.size(); ++r) {
    if (live_[r - 1]) out.push_back(r);
  }
  return out;
}

void RecordStore::ReplaceMerged(Rid i, Rid j, SuperRecord merged) {
  if (!IsLive(i) || !IsLive(j) || i == j) {
    throw std::invalid_argument("merge requires two distinct live records");
  }
  const Rid k = merged.rid;
  if (k != i && k != j) {
    throw std::invalid_argument("merged record must keep one of the rids");
  }
  const Rid gone = k == i ? j : i;
  records_[gone - 1] = SuperRecord{};
  live_[gone - 1] = false;
  records_[k - 1] = std::move(merged);
  --live_count_;
}

}  // namespace hetres
