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

#include "hetres/schema_vote.h"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace hetres {

double ErrorBound(std::size_t n, double p) {
  if (n < 1) throw std::invalid_argument("error bound needs at least 1 trial");
  if (!(p > 0.5 && p <= 1.0)) {
    throw std::invalid_argument("prior must lie in (0.5, 1]");
  }
  const double gap = p - 0.5;
  return std::exp(-(static_cast<double>(n) / (2.0 * p)) * gap * gap);
}

VoteLedger::VoteLedger(double prior, double rho) : prior_(prior), rho_(rho) {
  if (!(prior > 0.5 && prior <= 1.0)) {
    throw std::invalid_argument("prior must lie in (0.5, 1]");
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("rho must lie in (0, 1)");
  }
}

void VoteLedger::Vote(const AttrOrigin &a, const AttrOrigin &b) {
  Key key{a, b.source};
  Tally &t = tallies_[key];
  ++t.votes[b.attr];
  ++t.total;
  touched_.insert(key);
  auto it = promoted_.find(key);
  if (it != promoted_.end() && it->second.b.attr != b.attr) ++contradictions_;
}

void VoteLedger::RecordPrediction(const AttrOrigin &a, const AttrOrigin &b) {
  if (a.source == b.source) {
    throw std::invalid_argument("prediction within one schema: " + a.source);
  }
  Vote(a, b);
  Vote(b, a);
}

std::size_t VoteLedger::Trials(const AttrOrigin &a,
                               const std::string &source) const {
  auto it = tallies_.find(Key{a, source});
  return it == tallies_.end() ? 0 : it->second.total;
}

std::size_t VoteLedger::Votes(const AttrOrigin &a, const AttrOrigin &b) const {
  auto it = tallies_.find(Key{a, b.source});
  if (it == tallies_.end()) return 0;
  auto v = it->second.votes.find(b.attr);
  return v == it->second.votes.end() ? 0 : v->second;
}

std::optional<Promotion> VoteLedger::TryPromote(const AttrOrigin &a,
                                                const std::string &source) {
  Key key{a, source};
  if (auto done = promoted_.find(key); done != promoted_.end()) {
    return done->second;
  }
  auto it = tallies_.find(key);
  if (it == tallies_.end() || it->second.total == 0) {
    throw std::logic_error("no vote recorded for " + a.source + "." + a.attr);
  }
  const Tally &t = it->second;
  const std::string *best = nullptr;
  std::size_t best_votes = 0;
  bool tie = false;
  for (const auto &[attr, votes] : t.votes) {
    if (votes > best_votes) {
      best = &attr;
      best_votes = votes;
      tie = false;
    } else if (votes == best_votes) {
      tie = true;
    }
  }
  if (tie) return std::nullopt;
  const double bound = ErrorBound(t.total, prior_);
  if (!(bound < rho_)) return std::nullopt;
  Promotion p{a, AttrOrigin{source, *best}, best_votes, t.total, bound};
  promoted_.emplace(key, p);
  return p;
}

std::vector<Promotion> VoteLedger::PromoteTouched() {
  std::vector<Promotion> out;
  std::set<Key> keys;
  keys.swap(touched_);
  for (const Key &key : keys) {
    if (promoted_.count(key)) continue;
    if (auto p = TryPromote(key.first, key.second)) out.push_back(*p);
  }
  return out;
}

bool VoteLedger::IsPromoted(const AttrOrigin &a, const AttrOrigin &b) const {
  auto it = promoted_.find(Key{a, b.source});
  return it != promoted_.end() && it->second.b == b;
}

std::optional<Promotion> VoteLedger::Promoted(const AttrOrigin &a,
                                              const std::string &source) const {
  auto it = promoted_.find(Key{a, source});
  if (it == promoted_.end()) return std::nullopt;
  return it->second;
}

std::vector<Promotion> VoteLedger::promoted() const {
  std::vector<Promotion> out;
  out.reserve(promoted_.size());
  for (const auto &[_, p] : promoted_) out.push_back(p);
  return out;
}

FieldMatchingSet ForcedPairs(const VoteLedger &ledger, const SuperRecord &left,
                             const SuperRecord &right,
                             const ValueSimilarity &metric) {
  auto fields_by_origin = [](const SuperRecord &r) {
    std::map<AttrOrigin, std::uint32_t> out;
    for (std::uint32_t f = 1; f <= r.size(); ++f) {
      for (const AttrOrigin &o : r.field(f).origins) out.emplace(o, f);
    }
    return out;
  };
  const auto lmap = fields_by_origin(left);
  const auto rmap = fields_by_origin(right);

  FieldMatchingSet out;
  std::set<std::uint32_t> used_left, used_right;
  auto claim = [&](std::uint32_t lf, std::uint32_t rf) {
    for (const FieldPair &p : out) {
      if (p.left == lf && p.right == rf) return;
    }
    if (used_left.count(lf) || used_right.count(rf)) return;
    used_left.insert(lf);
    used_right.insert(rf);
    out.push_back({lf, rf, Simf(left.field(lf), right.field(rf), metric)});
  };
  for (const Promotion &p : ledger.promoted()) {
    for (const auto &[x, y] : {std::pair{&p.a, &p.b}, std::pair{&p.b, &p.a}}) {
      auto l = lmap.find(*x);
      auto r = rmap.find(*y);
      if (l != lmap.end() && r != rmap.end()) claim(l->second, r->second);
    }
  }
  return out;
}

void WritePromotions(std::ostream &out,
                     const std::vector<Promotion> &promoted) {
  for (const Promotion &p : promoted) {
    nlohmann::json row = {
        {"source_a", p.a.source}, {"attr_a", p.a.attr},
        {"source_b", p.b.source}, {"attr_b", p.b.attr},
        {"votes", p.votes},       {"p_error_upper", p.p_error},
    };
    out << row.dump() << '\n';
  }
}

}  // namespace hetres
