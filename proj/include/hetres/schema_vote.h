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

// Majority vote over attribute matching predictions.
//
// Each verified record pair predicts that the source attributes behind its
// matched fields correspond. For an attribute a and a counterpart schema s,
// the predictions collected so far are treated as n independent trials that
// pick the true counterpart with probability p. The most frequent candidate
// is accepted once the probability that the majority is wrong, bounded by
// exp(-n / (2p) * (p - 1/2)^2), falls below rho. Accepted matchings are never
// revoked; later votes that disagree are only counted.

#ifndef HETRES_SCHEMA_VOTE_H_
#define HETRES_SCHEMA_VOTE_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hetres/records.h"
#include "hetres/similarity.h"

namespace hetres {

// Upper bound on the probability that a majority vote over n trials is wrong.
// Throws std::invalid_argument unless n >= 1 and 0.5 < p <= 1.
double ErrorBound(std::size_t n, double p);

struct Promotion {
  AttrOrigin a;
  AttrOrigin b;
  std::size_t votes = 0;   // votes for b
  std::size_t trials = 0;  // all votes under (a, b.source)
  double p_error = 1.0;    // ErrorBound(trials, prior)

  double confidence() const { return 1.0 - p_error; }
};

class VoteLedger {
 public:
  // Throws std::invalid_argument unless 0.5 < prior <= 1 and 0 < rho < 1.
  VoteLedger(double prior = 0.8, double rho = 0.6);

  double prior() const { return prior_; }
  double rho() const { return rho_; }

  // Counts b as a candidate for a under b's schema and a as a candidate for
  // b under a's schema. Predictions within one schema are rejected.
  void RecordPrediction(const AttrOrigin &a, const AttrOrigin &b);

  std::size_t Trials(const AttrOrigin &a, const std::string &source) const;
  std::size_t Votes(const AttrOrigin &a, const AttrOrigin &b) const;

  // Promotes the majority candidate for (a, source) if it is unique and its
  // error bound is below rho. Returns the promotion (also when it already
  // existed) or nothing. Throws std::logic_error if no vote was recorded.
  std::optional<Promotion> TryPromote(const AttrOrigin &a,
                                      const std::string &source);

  // Runs TryPromote over every key that received votes since the last sweep.
  // Returns the promotions made by this sweep.
  std::vector<Promotion> PromoteTouched();

  bool IsPromoted(const AttrOrigin &a, const AttrOrigin &b) const;
  std::optional<Promotion> Promoted(const AttrOrigin &a,
                                          const std::string &source) const;

  // All promotions in key order.
  std::vector<Promotion> promoted() const;

  // Votes received by a promoted key for a candidate other than the winner.
  std::size_t contradictions() const { return contradictions_; }

 private:
  using Key = std::pair<AttrOrigin, std::string>;

  struct Tally {
    std::map<std::string, std::size_t> votes;  // counterpart attr -> count
    std::size_t total = 0;
  };

  void Vote(const AttrOrigin &a, const AttrOrigin &b);

  double prior_;
  double rho_;
  std::map<Key, Tally> tallies_;
  std::map<Key, Promotion> promoted_;
  std::set<Key> touched_;
  std::size_t contradictions_ = 0;
};

// Field pairs between `left` and `right` implied by promoted matchings, in
// promotion order. A promotion whose fields are already claimed by an earlier
// one is skipped, so the result is one-to-one. Scores are the field
// similarities.
FieldMatchingSet ForcedPairs(const VoteLedger &ledger, const SuperRecord &left,
                             const SuperRecord &right,
                             const ValueSimilarity &metric);

// One JSON line per promotion:
// {source_a, attr_a, source_b, attr_b, votes, p_error_upper}.
void WritePromotions(std::ostream &out, const std::vector<Promotion> &promoted);

}  // namespace hetres

#endif  // HETRES_SCHEMA_VOTE_H_
