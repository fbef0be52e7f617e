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


// Iterative resolution driver.
//
// One iteration generates candidates from the index, accepts every direct
// pair, verifies the remaining candidates and accepts those reaching delta.
// All of this reads the state left by the previous iteration. The accepted
// pairs are then merged one by one through the union-find, verified pairs
// vote on attribute matchings, and matchings whose error bound fell below rho
// are promoted for the next iteration. The loop stops after an iteration
// without merges.

#ifndef HETRES_ENGINE_H_
#define HETRES_ENGINE_H_

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "hetres/matching.h"
#include "hetres/pair_index.h"
#include "hetres/records.h"
#include "hetres/schema_vote.h"
#include "hetres/similarity.h"

namespace hetres {

struct EngineConfig {
  double delta = 0.5;  // record similarity threshold
  double xi = 0.5;     // value similarity threshold
  int q = 2;
  double rho = 0.6;    // error probability threshold for promotions
  double prior = 0.8;  // per-vote accuracy
  std::size_t max_iterations = 0;  // 0: number of records

  // Throws std::invalid_argument on out-of-range values.
  void Validate() const;
};

struct IterationStats {
  std::size_t direct = 0;      // direct pairs in the plan
  std::size_t candidates = 0;  // candidates in the plan
  std::size_t verified = 0;    // KM verifications run
  std::size_t accepted = 0;    // pairs decided to merge
  std::size_t merges = 0;
  std::size_t promotions = 0;
};

struct ResolutionResult {
  std::vector<Rid> labels;  // labels[i - 1] = find(i)
  std::size_t iterations = 0;
  std::size_t merges = 0;
  bool converged = false;
  std::vector<Promotion> promoted;
  std::vector<IterationStats> trace;
};

// A record pair accepted for merging, with the field matching found when it
// was decided.
struct MergeDecision {
  Rid i = 0;
  Rid j = 0;
  double sim = 0.0;
  bool verified = false;  // decided by KM rather than directly
  FieldMatchingSet matching;
};

class Engine {
 public:
  // Builds the pair index over `store`, whose records must all be live.
  Engine(RecordStore store, EngineConfig config);

  // Candidate generation over the current index.
  CandidateSet Plan() const;

  // Accepts every direct pair and verifies every candidate against the
  // current state, without modifying it. Verified candidates reaching delta
  // are accepted and their field matchings are returned as votes. Direct
  // pairs come first, then candidates, each in plan order.
  std::vector<MergeDecision> Decide(const CandidateSet &plan,
                                    IterationStats *stats = nullptr) const;

  // Records the votes of verified decisions, then merges the decisions in
  // the given order. A decision whose records were re-rooted by an earlier
  // merge is applied to the current roots with a matching recomputed on them;
  // one whose roots already coincide is skipped. Returns the merge count.
  std::size_t Apply(const std::vector<MergeDecision> &decisions);

  // Merges the live roots i and j using `matching` (left fids of i, right
  // fids of j). Returns the surviving root, or nothing when i and j already
  // share a root.
  std::optional<Rid> MergePair(Rid i, Rid j, const FieldMatchingSet &matching);

  // Ends an iteration by sweeping the vote ledger. Returns the number of new
  // promotions.
  std::size_t EndIteration();

  // Plan, decide, apply and promote. Returns the stats of this iteration.
  IterationStats Step();

  // Iterates to a fixpoint or the iteration cap.
  ResolutionResult Run();

  // Current labels, find(i) for every original record.
  std::vector<Rid> Labels() const;

  const EngineConfig &config() const { return config_; }
  const RecordStore &store() const { return store_; }
  const PairIndex &index() const { return index_; }
  const VoteLedger &ledger() const { return ledger_; }
  const EntityForest &forest() const { return forest_; }
  const ValueSimilarity &metric() const { return metric_; }

 private:
  EngineConfig config_;
  QGramJaccard metric_;
  RecordStore store_;
  EntityForest forest_;
  PairIndex index_;
  VoteLedger ledger_;
};

// Convenience wrapper: Engine(store, config).Run().
ResolutionResult Run(RecordStore store, const EngineConfig &config);

}  // namespace hetres

#endif  // HETRES_ENGINE_H_
