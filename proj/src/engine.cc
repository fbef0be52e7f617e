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


#include "hetres/engine.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hetres {

void EngineConfig::Validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1]");
  }
  if (!(xi > 0.0 && xi <= 1.0)) {
    throw std::invalid_argument("xi must lie in (0, 1]");
  }
  if (q < 1) throw std::invalid_argument("q must be at least 1");
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("rho must lie in (0, 1)");
  }
  if (!(prior > 0.5 && prior <= 1.0)) {
    throw std::invalid_argument("prior must lie in (0.5, 1]");
  }
}

Engine::Engine(RecordStore store, EngineConfig config)
    : config_(config),
      metric_(config.q),
      store_(std::move(store)),
      forest_(store_.original_count()),
      ledger_(config.prior, config.rho) {
  config_.Validate();
  if (store_.original_count() == 0) {
    throw std::invalid_argument("no records to resolve");
  }
  if (store_.live_count() != store_.original_count()) {
    throw std::invalid_argument("engine input must not contain merged records");
  }
  if (config_.max_iterations == 0) {
    config_.max_iterations = store_.original_count();
  }
  index_ = PairIndex::Build(store_, config_.xi, metric_);
}

CandidateSet Engine::Plan() const {
  return GenerateCandidates(index_, store_, config_.delta);
}

std::optional<Rid> Engine::MergePair(Rid i, Rid j,
                                     const FieldMatchingSet &matching) {
  if (forest_.Find(i) == forest_.Find(j)) return std::nullopt;
  if (forest_.Find(i) != i || forest_.Find(j) != j) {
    throw std::invalid_argument("merge_pair expects two roots");
  }
  MergeOutcome m =
      MergeSuperRecords(store_.Get(i), store_.Get(j), matching, forest_);
  const Rid k = m.record.rid;
  index_.ApplyMerge(i, j, k, m.labels);
  store_.ReplaceMerged(i, j, std::move(m.record));
  return k;
}

std::vector<MergeDecision> Engine::Decide(const CandidateSet &plan,
                                          IterationStats *stats) const {
  std::vector<MergeDecision> out;
  for (const DirectPair &d : plan.direct) {
    out.push_back({d.i, d.j, d.score, false, d.matching});
  }
  std::size_t verified = 0;
  for (const auto &[i, j] : plan.candidates) {
    const FieldMatchingSet forced =
        ForcedPairs(ledger_, store_.Get(i), store_.Get(j), metric_);
    Verification v = VerifyPair(index_, store_, i, j, forced);
    ++verified;
    if (v.sim < config_.delta - kScoreEps) continue;
    out.push_back({i, j, v.sim, true, std::move(v.matching)});
  }
  if (stats != nullptr) {
    stats->direct = plan.direct.size();
    stats->candidates = plan.candidates.size();
    stats->verified = verified;
    stats->accepted = out.size();
  }
  return out;
}

std::size_t Engine::Apply(const std::vector<MergeDecision> &decisions) {
  // Votes describe the records as they were decided, so take them before
  // any merge renumbers fields.
  for (const MergeDecision &d : decisions) {
    if (!d.verified) continue;
    const auto predictions =
        MatchingPredictions(store_.Get(d.i), store_.Get(d.j), d.matching);
    for (const auto &[a, b] : predictions) ledger_.RecordPrediction(a, b);
  }

  std::set<Rid> changed;
  std::size_t merges = 0;
  for (const MergeDecision &d : decisions) {
    Rid ri = forest_.Find(d.i);
    Rid rj = forest_.Find(d.j);
    if (ri == rj) continue;
    std::optional<Rid> k;
    if (ri == d.i && rj == d.j && !changed.count(ri) && !changed.count(rj)) {
      k = MergePair(ri, rj, d.matching);
    } else {
      if (ri > rj) std::swap(ri, rj);
      const FieldMatchingSet forced =
          ForcedPairs(ledger_, store_.Get(ri), store_.Get(rj), metric_);
      k = MergePair(ri, rj, VerifyPair(index_, store_, ri, rj, forced).matching);
    }
    if (k) {
      changed.insert(*k);
      ++merges;
    }
  }
  return merges;
}

std::size_t Engine::EndIteration() {
  return ledger_.PromoteTouched().size();
}

IterationStats Engine::Step() {
  IterationStats stats;
  const std::vector<MergeDecision> decisions = Decide(Plan(), &stats);
  stats.merges = Apply(decisions);
  stats.promotions = EndIteration();
  return stats;
}

std::vector<Rid> Engine::Labels() const {
  std::vector<Rid> out(store_.original_count());
  for (Rid r = 1; r <= out.size(); ++r) out[r - 1] = forest_.Find(r);
  return out;
}

ResolutionResult Engine::Run() {
  ResolutionResult out;
  while (out.iterations < config_.max_iterations) {
    const IterationStats stats = Step();
    ++out.iterations;
    out.merges += stats.merges;
    out.trace.push_back(stats);
    if (stats.merges == 0) {
      out.converged = true;
      break;
    }
  }
  out.labels = Labels();
  out.promoted = ledger_.promoted();
  return out;
}

ResolutionResult Run(RecordStore store, const EngineConfig &config) {
  return Engine(std::move(store), config).Run();
}

}  // namespace hetres
