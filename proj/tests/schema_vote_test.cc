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


#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "hetres/schema_vote.h"

namespace hetres {
namespace {

using Approx = doctest::Approx;

const AttrOrigin kName{"I", "name"};
const AttrOrigin kFull{"III", "name"};
const AttrOrigin kMail{"III", "e-mail"};

TEST_CASE("ErrorBound worked value and closed form") {
  CHECK(ErrorBound(10, 0.8) == Approx(0.5698).epsilon(1e-4));
  CHECK(ErrorBound(1, 1.0) == Approx(std::exp(-0.125)));
  CHECK_THROWS_AS(ErrorBound(0, 0.8), std::invalid_argument);
  CHECK_THROWS_AS(ErrorBound(3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ErrorBound(3, 1.01), std::invalid_argument);
}

TEST_CASE("ErrorBound strictly decreases in n") {
  for (double p : {0.6, 0.8, 0.95}) {
    double prev = ErrorBound(1, p);
    for (std::size_t n = 2; n <= 2000; ++n) {
      const double cur = ErrorBound(n, p);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("VoteLedger validates its parameters") {
  CHECK_THROWS_AS(VoteLedger(0.5, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(VoteLedger(0.8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(VoteLedger(0.8, 1.0), std::invalid_argument);
}

TEST_CASE("predictions count in both directions") {
  VoteLedger ledger;
  ledger.RecordPrediction(kName, kFull);
  CHECK(ledger.Votes(kName, kFull) == 1);
  CHECK(ledger.Votes(kFull, kName) == 1);
  CHECK(ledger.Trials(kName, "III") == 1);
  CHECK(ledger.Trials(kName, "II") == 0);
  CHECK_THROWS_AS(ledger.RecordPrediction(kFull, kMail), std::invalid_argument);
  CHECK_THROWS_AS(ledger.TryPromote(kName, "II"), std::logic_error);
}

TEST_CASE("promotion needs a unique majority and a small error bound") {
  VoteLedger ledger(0.8, 0.6);
  for (int k = 0; k < 9; ++k) ledger.RecordPrediction(kName, kFull);
  CHECK_FALSE(ledger.TryPromote(kName, "III"));  // bound(9) = 0.6029
  ledger.RecordPrediction(kName, kFull);
  auto p = ledger.TryPromote(kName, "III");
  REQUIRE(p);
  CHECK(p->b == kFull);
  CHECK(p->votes == 10);
  CHECK(p->trials == 10);
  CHECK(p->p_error == Approx(0.5698).epsilon(1e-4));
  CHECK(p->confidence() == Approx(1.0 - p->p_error));
  CHECK(ledger.IsPromoted(kName, kFull));
  CHECK_FALSE(ledger.IsPromoted(kName, kMail));
}

TEST_CASE("a tied vote promotes nothing") {
  VoteLedger ledger;
  for (int k = 0; k < 10; ++k) {
    ledger.RecordPrediction(kName, kFull);
    ledger.RecordPrediction(kName, kMail);
  }
  CHECK_FALSE(ledger.TryPromote(kName, "III"));
  ledger.RecordPrediction(kName, kMail);
  auto p = ledger.TryPromote(kName, "III");
  REQUIRE(p);
  CHECK(p->b == kMail);
  CHECK(p->votes == 11);
  CHECK(p->trials == 21);
}

TEST_CASE("promotions are never revoked") {
  VoteLedger ledger;
  for (int k = 0; k < 10; ++k) ledger.RecordPrediction(kName, kFull);
  REQUIRE(ledger.TryPromote(kName, "III"));
  for (int k = 0; k < 30; ++k) ledger.RecordPrediction(kName, kMail);
  auto p = ledger.TryPromote(kName, "III");
  REQUIRE(p);
  CHECK(p->b == kFull);
  CHECK(ledger.contradictions() == 30);
  CHECK(ledger.Promoted(kName, "III")->b == kFull);
  CHECK_FALSE(ledger.Promoted(kName, "II"));
}

TEST_CASE("PromoteTouched sweeps only keys touched since the last sweep") {
  VoteLedger ledger;
  for (int k = 0; k < 10; ++k) ledger.RecordPrediction(kName, kFull);
  const auto first = ledger.PromoteTouched();
  REQUIRE(first.size() == 2);  // both directions
  CHECK(first[0].a == kName);
  CHECK(first[1].a == kFull);
  CHECK(ledger.PromoteTouched().empty());
  CHECK(ledger.promoted().size() == 2);
}

Field MakeField(const std::string &value, std::vector<AttrOrigin> origins) {
  Field f;
  f.AddValue(value);
  for (const auto &o : origins) f.AddOrigin(o);
  return f;
}

TEST_CASE("ForcedPairs maps promotions onto fields one-to-one") {
  VoteLedger ledger;
  const AttrOrigin a1{"A", "x"}, a2{"A", "y"}, b1{"B", "x"}, b2{"B", "z"};
  for (int k = 0; k < 10; ++k) {
    ledger.RecordPrediction(a1, b1);
    ledger.RecordPrediction(a2, b2);
  }
  ledger.PromoteTouched();

  SuperRecord left, right;
  left.fields = {MakeField("john", {a1}), MakeField("la", {a2})};
  right.fields = {MakeField("la", {b2}), MakeField("johnny", {b1})};
  const QGramJaccard metric;
  FieldMatchingSet forced = ForcedPairs(ledger, left, right, metric);
  std::sort(forced.begin(), forced.end(),
            [](const FieldPair &x, const FieldPair &y) { return x.left < y.left; });
  REQUIRE(forced.size() == 2);
  CHECK(forced[0].left == 1);
  CHECK(forced[0].right == 2);
  CHECK(forced[0].sim == Approx(Simv("john", "johnny")));
  CHECK(forced[1] == FieldPair{2, 1, 1.0});

  // Reversed orientation finds the same correspondences.
  CHECK(ForcedPairs(ledger, right, left, metric).size() == 2);

  // Two promotions competing for one field: the first one wins.
  right.fields = {MakeField("john", {b1, b2})};
  CHECK(ForcedPairs(ledger, left, right, metric).size() == 1);
}

TEST_CASE("WritePromotions emits one JSON line per promotion") {
  Promotion p{kName, kFull, 10, 10, 0.5698};
  std::ostringstream out;
  WritePromotions(out, {p});
  CHECK(out.str() ==
        R"({"attr_a":"name","attr_b":"name","p_error_upper":0.5698,)"
        R"("source_a":"I","source_b":"III","votes":10})"
        "\n");
}

}  // namespace
}  // namespace hetres
