// Copyright 2026 The negrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "negrec/errors.hpp"
#include "negrec/strategies.hpp"

namespace negrec {
namespace {

using testing::Scripted;
using testing::SmallDomain;

const std::vector<std::string> kIds = {
    "random_counter",       "boulware",          "conceder",
    "hardliner",            "linear",            "tit_for_tat_relative",
    "behavior_mirror",      "boulware_jittered", "stepped_concession",
    "meta_switcher"};

TEST_CASE("pool has ten distinct fixed ids") {
  const auto pool = DefaultPool();
  CHECK(pool.size() == 10);
  CHECK(PoolLabels(pool) == kIds);
  CHECK(std::set<std::string>(kIds.begin(), kIds.end()).size() == 10);
  CHECK(DefaultPool() == pool);
  for (const auto& spec : pool) CHECK(MakeStrategy(spec)->id() == spec.id);
}

TEST_CASE("pool subsets and manifests") {
  const std::vector<std::string> ids = {"conceder", "random_counter"};
  const auto sub = PoolSubset(ids);
  CHECK(PoolLabels(sub) == ids);
  const std::vector<std::string> unknown = {"nope"};
  CHECK_THROWS_AS(PoolSubset(unknown), ArgumentError);
  const std::vector<std::string> dup = {"linear", "linear"};
  CHECK_THROWS_AS(PoolSubset(dup), ArgumentError);
  CHECK(PoolFromManifest(PoolManifest(DefaultPool())) == DefaultPool());
  CHECK(ManifestHash(DefaultPool()) == ManifestHash(DefaultPool()));
  CHECK(ManifestHash(sub) != ManifestHash(DefaultPool()));
  CHECK_THROWS_AS(MakeStrategy({"x", "unknown_kind", {}}), ArgumentError);
}

TEST_CASE("time_dependent_target examples") {
  CHECK(TimeDependentTarget(0.0, 0.3, 0.9, 0.2) == doctest::Approx(0.9));
  CHECK(TimeDependentTarget(1.0, 0.3, 0.9, 2.0) == doctest::Approx(0.3));
  CHECK(TimeDependentTarget(0.5, 0.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(TimeDependentTarget(0.5, 0.0, 1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(TimeDependentTarget(0.5, 0.0, 1.0, -1.0), ArgumentError);
  CHECK_THROWS_AS(TimeDependentTarget(0.5, 0.8, 0.2, 1.0), ArgumentError);
  CHECK_THROWS_AS(TimeDependentTarget(1.5, 0.0, 1.0, 1.0), ArgumentError);
}

TEST_CASE("boulware concedes less than conceder at every interior time") {
  for (int k = 1; k < 1000; ++k) {
    const double t = k / 1000.0;
    CHECK(TimeDependentTarget(t, 0.4, 1.0, 0.2) > TimeDependentTarget(t, 0.4, 1.0, 2.0));
  }
}

TEST_CASE("utility ladder queries") {
  const Domain d = SmallDomain({2, 3});
  const PreferenceProfile p("p", {0.5, 0.5}, {{1.0, 0.0}, {0.0, 0.5, 1.0}});
  const UtilityLadder ladder(d, p);
  REQUIRE(ladder.entries().size() == 6);
  for (std::size_t i = 1; i < 6; ++i) {
    CHECK(ladder.entries()[i - 1].utility <= ladder.entries()[i].utility);
  }
  CHECK(ladder.best().utility == 1.0);
  CHECK(ladder.worst().utility == 0.0);
  const auto [lo, hi] = ladder.Range(0.5, 0.5);
  CHECK(hi - lo == 2);  // (1, 2) and (0, 0) are both worth 0.5
  Rng rng(0);
  CHECK(p.Utility(ladder.NearTarget(0.6, 0.1, rng)) == doctest::Approx(0.75));
  CHECK(p.Utility(ladder.NearTarget(0.8, 0.01, rng)) == 1.0);
  CHECK(ladder.Closest(0.3).utility == 0.25);
  CHECK(ladder.Closest(0.375).utility == 0.5);
}

// Calls a strategy's opening move repeatedly on a fresh session.
TEST_CASE("random_counter offers are uniform over bank") {
  const Domain d = PresetDomain("bank");
  const auto prof = GenerateProfile(d, 1);
  auto s = MakeStrategy(PoolSubset(std::vector<std::string>{"random_counter"})[0]);
  s->Begin(d, prof, 100);
  Rng rng(77);
  std::map<std::uint64_t, int> freq;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    Observation obs;
    obs.round = 1;
    obs.deadline = 100;
    obs.domain = &d;
    obs.profile = &prof;
    const Action a = s->Decide(obs, rng);
    REQUIRE_FALSE(a.is_accept());
    ++freq[d.IndexOf(a.bid)];
  }
  CHECK(freq.size() == 18);
  for (const auto& [idx, c] : freq) {
    CHECK(std::abs(c - n / 18.0) <= 0.3 * n / 18.0);
  }
}

TEST_CASE("detector opens with its best bid and holds against a hardliner") {
  const Domain d = PresetDomain("car");
  const auto mine = GenerateProfile(d, 10);
  const auto theirs = GenerateProfile(d, 11);
  NiceTitForTat det;
  Scripted hard({theirs.BestBid()}, 0, "hard");
  const Trace t = RunSession(det, hard, d, mine, theirs, 30, 0);
  CHECK(mine.Utility(t.rounds[0].bid_m) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(det.last_target() == 1.0);
  for (const auto& r : t.rounds) {
    CHECK(mine.Utility(r.bid_m) >= 1.0 - NiceTitForTat::kDefaultWindow - 1e-12);
  }
}

TEST_CASE("detector reciprocates a concession") {
  const Domain d = SmallDomain({5}, "line");
  const PreferenceProfile mine("m", {1.0}, {{1.0, 0.8, 0.6, 0.4, 0.2}});
  const PreferenceProfile theirs("o", {1.0}, {{0.2, 0.4, 0.6, 0.8, 1.0}});
  NiceTitForTat det;
  det.Begin(d, mine, 10);
  std::vector<Bid> own = {{0}};
  std::vector<Bid> in = {{4}, {3}};
  Observation obs{2, 10, &d, &mine, own, in};
  Rng rng(0);
  const Action a = det.Decide(obs, rng);
  // The opponent conceded 0.2 of the detector's utility.
  CHECK(det.last_target() == doctest::Approx(0.8));
  REQUIRE_FALSE(a.is_accept());
  CHECK(a.bid == Bid{1});
  CHECK(det.opponent_model().observed() == 2);
}

TEST_CASE("detector accepts an offer worth one") {
  const Domain d = PresetDomain("bank");
  const auto mine = GenerateProfile(d, 1);
  NiceTitForTat det;
  det.Begin(d, mine, 100);
  std::vector<Bid> own = {mine.BestBid()};
  std::vector<Bid> in = {mine.BestBid()};
  Observation obs{2, 100, &d, &mine, own, in};
  Rng rng(0);
  CHECK(det.Decide(obs, rng).is_accept());
}

TEST_CASE("pool strategies against the detector stay valid and finish") {
  for (const auto& name : PresetNames()) {
    const Domain d = PresetDomain(name);
    const auto mine = GenerateProfile(d, 21);
    const auto theirs = GenerateProfile(d, 22);
    for (const auto& spec : DefaultPool()) {
      for (std::uint64_t s = 0; s < 3; ++s) {
        NiceTitForTat det;
        auto opp = MakeStrategy(spec);
        const Trace t = RunSession(det, *opp, d, mine, theirs, 100, s);
        CHECK(ValidateTrace(t, d).empty());
        CHECK(t.end_round <= 100);
        CHECK(t.opponent_label == spec.id);
        if (t.accepted_by == Role::kDetector && t.end_round == 1) {
          // Only an opening offer worth one to the detector ends round one.
          CHECK(mine.Utility(*t.rounds[0].bid_o) == 1.0);
        }
      }
    }
  }
}

TEST_CASE("pool strategies are deterministic per session seed") {
  const Domain d = PresetDomain("tram");
  const auto mine = GenerateProfile(d, 1);
  const auto theirs = GenerateProfile(d, 2);
  for (const auto& spec : DefaultPool()) {
    NiceTitForTat d1, d2;
    auto o1 = MakeStrategy(spec);
    auto o2 = MakeStrategy(spec);
    CHECK(RunSession(d1, *o1, d, mine, theirs, 100, 5) ==
          RunSession(d2, *o2, d, mine, theirs, 100, 5));
  }
}

TEST_CASE("hardliner always offers its best bid") {
  const Domain d = PresetDomain("uni");
  const auto mine = GenerateProfile(d, 1);
  const auto theirs = GenerateProfile(d, 2);
  NiceTitForTat det;
  auto hard = MakeStrategy(PoolSubset(std::vector<std::string>{"hardliner"})[0]);
  const Trace t = RunSession(det, *hard, d, mine, theirs, 100, 0);
  for (const auto& r : t.rounds) {
    if (r.bid_o) CHECK(theirs.Utility(*r.bid_o) == 1.0);
  }
}

}  // namespace
}  // namespace negrec
