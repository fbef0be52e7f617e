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

#include "hetres/similarity.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace hetres {
namespace {

// Byte offsets of code point starts in `s`, plus s.size() as a sentinel.
// Malformed sequences are consumed one byte at a time.
std::vector<std::size_t> CodePointOffsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  offsets.reserve(s.size() + 1);
  std::size_t i = 0;
  while (i < s.size()) {
    offsets.push_back(i);
    auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = lead < 0x80           ? 1
                      : (lead >> 5) == 0x06 ? 2
                      : (lead >> 4) == 0x0e ? 3
                      : (lead >> 3) == 0x1e ? 4
                                            : 1;
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xc0) != 0x80) {
        len = 1;
        break;
      }
    }
    i += len;
  }
  offsets.push_back(s.size());
  return offsets;
}

std::size_t SortedIntersectionSize(const std::vector<std::uint32_t> &a,
                                   const std::vector<std::uint32_t> &b) {
  std::size_t n = 0;
  auto x = a.begin();
  auto y = b.begin();
  while (x != a.end() && y != b.end()) {
    if (*x < *y) {
      ++x;
    } else if (*y < *x) {
      ++y;
    } else {
      ++n;
      ++x;
      ++y;
    }
  }
  return n;
}

double JaccardFromCounts(std::size_t inter, std::size_t size_a,
                         std::size_t size_b) {
  const std::size_t uni = size_a + size_b - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

QGramSet QGrams(std::string_view value, int q) {
  if (q < 1) throw std::invalid_argument("q must be positive");
  QGramSet out;
  out.q = q;
  if (value.empty()) return out;
  const std::vector<std::size_t> cp = CodePointOffsets(value);
  const std::size_t n = cp.size() - 1;
  const auto uq = static_cast<std::size_t>(q);
  if (n < uq) {
    out.grams.emplace_back(value);
    return out;
  }
  out.grams.reserve(n - uq + 1);
  for (std::size_t i = 0; i + uq <= n; ++i) {
    out.grams.emplace_back(value.substr(cp[i], cp[i + uq] - cp[i]));
  }
  std::sort(out.grams.begin(), out.grams.end());
  out.grams.erase(std::unique(out.grams.begin(), out.grams.end()),
                  out.grams.end());
  return out;
}

double Jaccard(const QGramSet &a, const QGramSet &b) {
  std::size_t inter = 0;
  auto x = a.grams.begin();
  auto y = b.grams.begin();
  while (x != a.grams.end() && y != b.grams.end()) {
    int c = x->compare(*y);
    if (c < 0) {
      ++x;
    } else if (c > 0) {
      ++y;
    } else {
      ++inter;
      ++x;
      ++y;
    }
  }
  return JaccardFromCounts(inter, a.size(), b.size());
}

double Simv(std::string_view a, std::string_view b, int q) {
  return Jaccard(QGrams(a, q), QGrams(b, q));
}

std::vector<JoinedPair> ValueSimilarity::Join(
    std::span<const std::string> values, double threshold) const {
  std::vector<JoinedPair> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      double s = Score(values[i], values[j]);
      if (s >= threshold) {
        out.push_back({static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(j), s});
      }
    }
  }
  return out;
}

QGramJaccard::QGramJaccard(int q) : q_(q) {
  if (q < 1) throw std::invalid_argument("q must be positive");
}

double QGramJaccard::Score(std::string_view a, std::string_view b) const {
  return Simv(a, b, q_);
}

std::vector<JoinedPair> QGramJaccard::Join(std::span<const std::string> values,
                                           double threshold) const {
  if (threshold <= 0.0) return ValueSimilarity::Join(values, threshold);

  // Intern grams and count document frequencies.
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::vector<std::uint32_t>> sets(values.size());
  std::vector<std::uint32_t> df;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::string &g : QGrams(values[i], q_).grams) {
      auto [it, fresh] =
          ids.try_emplace(std::move(g), static_cast<std::uint32_t>(df.size()));
      if (fresh) df.push_back(0);
      ++df[it->second];
      sets[i].push_back(it->second);
    }
  }

  // Rare grams first, so prefixes carry the most selective tokens.
  std::vector<std::uint32_t> by_df(df.size());
  std::iota(by_df.begin(), by_df.end(), 0u);
  std::sort(by_df.begin(), by_df.end(), [&](std::uint32_t a, std::uint32_t b) {
    return df[a] != df[b] ? df[a] < df[b] : a < b;
  });
  std::vector<std::uint32_t> rank(df.size());
  for (std::uint32_t r = 0; r < by_df.size(); ++r) rank[by_df[r]] = r;
  for (auto &s : sets) {
    for (auto &g : s) g = rank[g];
    std::sort(s.begin(), s.end());
  }

  // Probe in ascending size order; every indexed set is no larger than the
  // probe, so the length filter only needs a lower bound.
  std::vector<std::uint32_t> order(values.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return sets[a].size() < sets[b].size();
                   });

  constexpr double kEps = 1e-9;
  auto prefix_length = [&](std::size_t size) {
    auto keep = static_cast<std::size_t>(
        std::ceil(threshold * static_cast<double>(size) - kEps));
    keep = std::min(keep, size);
    return size - keep + 1;
  };

  std::vector<std::vector<std::uint32_t>> postings(df.size());
  std::vector<std::uint32_t> stamp(values.size(), UINT32_MAX);
  std::vector<JoinedPair> out;
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t x : order) {
    const auto &sx = sets[x];
    if (sx.empty()) continue;
    const double min_size = threshold * static_cast<double>(sx.size()) - kEps;
    const std::size_t px = std::min(prefix_length(sx.size()), sx.size());
    candidates.clear();
    for (std::size_t t = 0; t < px; ++t) {
      for (std::uint32_t y : postings[sx[t]]) {
        if (stamp[y] == x) continue;
        stamp[y] = x;
        if (static_cast<double>(sets[y].size()) < min_size) continue;
        candidates.push_back(y);
      }
    }
    for (std::uint32_t y : candidates) {
      const auto &sy = sets[y];
      double s = JaccardFromCounts(SortedIntersectionSize(sx, sy), sx.size(),
                                   sy.size());
      if (s >= threshold) {
        out.push_back({std::min(x, y), std::max(x, y), s});
      }
    }
    for (std::size_t t = 0; t < px; ++t) postings[sx[t]].push_back(x);
  }
  std::sort(out.begin(), out.end(), [](const JoinedPair &a, const JoinedPair &b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  });
  return out;
}

double Simf(const Field &a, const Field &b, const ValueSimilarity &metric) {
  double best = 0.0;
  for (const std::string &v : a.values) {
    for (const std::string &w : b.values) {
      best = std::max(best, metric.Score(v, w));
      if (best >= 1.0) return best;
    }
  }
  return best;
}

double RecordSim(const SuperRecord &a, const SuperRecord &b,
                 const FieldMatchingSet &matching) {
  const std::size_t denom = std::min(a.size(), b.size());
  if (denom == 0) throw std::invalid_argument("record without fields");
  double sum = 0.0;
  for (const FieldPair &p : matching) sum += p.sim;
  return sum / static_cast<double>(denom);
}

}  // namespace hetres
