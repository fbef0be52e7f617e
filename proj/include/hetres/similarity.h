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

#ifndef HETRES_SIMILARITY_H_
#define HETRES_SIMILARITY_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetres/records.h"

namespace hetres {

// Set of length-q substrings of a value, counted in UTF-8 code points.
struct QGramSet {
  int q = 2;
  std::vector<std::string> grams;  // sorted, unique

  std::size_t size() const { return grams.size(); }
  bool empty() const { return grams.empty(); }
};

// All contiguous q-grams of `value`. A nonempty value shorter than q yields
// the whole value as its only gram; the empty value yields the empty set.
QGramSet QGrams(std::string_view value, int q);

// |a ∩ b| / |a ∪ b|, and 1 when both are empty.
double Jaccard(const QGramSet &a, const QGramSet &b);

// q-gram Jaccard similarity of two normalized values.
double Simv(std::string_view a, std::string_view b, int q = 2);

// A value pair found by a similarity join; indices refer to the joined span.
struct JoinedPair {
  std::uint32_t first = 0;
  std::uint32_t second = 0;  // first < second
  double sim = 0.0;
};

// Value similarity metric. The engine only talks to this interface; q-gram
// Jaccard is the default implementation.
class ValueSimilarity {
 public:
  virtual ~ValueSimilarity() = default;

  virtual double Score(std::string_view a, std::string_view b) const = 0;

  // Every pair (i < j) of `values` with Score >= threshold. The default
  // compares all pairs.
  virtual std::vector<JoinedPair> Join(std::span<const std::string> values,
                                       double threshold) const;
};

class QGramJaccard final : public ValueSimilarity {
 public:
  explicit QGramJaccard(int q = 2);

  int q() const { return q_; }

  double Score(std::string_view a, std::string_view b) const override;

  // Prefix-filtered set similarity join: grams are ranked by ascending
  // document frequency, only the prefix of each gram set is indexed, and
  // candidates are verified by a merge over the full sorted rank lists.
  std::vector<JoinedPair> Join(std::span<const std::string> values,
                               double threshold) const override;

 private:
  int q_;
};

// Field similarity: the best value-pair score between the two fields.
double Simf(const Field &a, const Field &b, const ValueSimilarity &metric);

// Sum of matched field scores divided by min(|a|, |b|).
double RecordSim(const SuperRecord &a, const SuperRecord &b,
                 const FieldMatchingSet &matching);

}  // namespace hetres

#endif  // HETRES_SIMILARITY_H_
