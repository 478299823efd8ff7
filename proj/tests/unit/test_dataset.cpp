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


#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "negrec/dataset.hpp"
#include "negrec/errors.hpp"

namespace negrec {
namespace {

namespace fs = std::filesystem;

double BruteOpposition(const Domain& d, const PreferenceProfile& a,
                       const PreferenceProfile& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < d.OutcomeSpaceSize(); ++i) {
    const Bid bid = d.BidAt(i);
    best = std::min(best, std::hypot(1.0 - a.Utility(bid), 1.0 - b.Utility(bid)));
  }
  return best;
}

CampaignConfig OneDomain(const std::string& name, int sessions) {
  CampaignConfig c;
  c.domains = {{name, {}}};
  c.bands = {{0.1, 0.2}, {0.2, 0.3}, {0.3, std::sqrt(2.0)}};
  c.sessions_per_cell = sessions;
  c.seed = 11;
  return c;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::size_t> All(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

TEST_CASE("profiles land in their opposition bands") {
  const Domain car = PresetDomain("car");
  const auto mine = GenerateProfile(car, 1, "mine");
  const std::vector<OppositionBand> bands = {
      {0.1, 0.2}, {0.2, 0.3}, {0.3, std::sqrt(2.0)}};
  const auto picked = SelectProfilesByOpposition(car, mine, bands, 5);
  REQUIRE(picked.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const double opp = BruteOpposition(car, mine, picked[k].profile);
    CHECK(picked[k].opposition == doctest::Approx(opp).epsilon(1e-12));
    CHECK(bands[k].Contains(opp));
    CHECK(picked[k].band == static_cast<int>(k));
    CHECK(picked[k].attempts >= 1);
  }
  const auto again = SelectProfilesByOpposition(car, mine, bands, 5);
  CHECK(again[2].profile == picked[2].profile);
}

TEST_CASE("an infeasible band is a config error naming the band") {
  const Domain car = PresetDomain("car");
  const auto mine = GenerateProfile(car, 1);
  const std::vector<OppositionBand> bands = {{1.4, 1.41}};
  try {
    SelectProfilesByOpposition(car, mine, bands, 0, 2000);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1.4") != std::string::npos);
    CHECK(msg.find("car") != std::string::npos);
  }
}

TEST_CASE("a band at zero opposition admits a compatible profile") {
  const Domain bank = PresetDomain("bank");
  const auto mine = GenerateProfile(bank, 3);
  const std::vector<OppositionBand> bands = {{0.0, 0.0001}};
  const auto picked = SelectProfilesByOpposition(bank, mine, bands, 8);
  REQUIRE(picked.size() == 1);
  CHECK(picked[0].opposition < 0.0001);
  CHECK(picked[0].profile.BestBid() == mine.BestBid());
}

TEST_CASE("config validation") {
  CampaignConfig ok = OneDomain("bank", 2);
  CHECK_NOTHROW(ok.Validate());
  auto broken = [&](auto edit) {
    CampaignConfig c = ok;
    edit(c);
    return c;
  };
  CHECK_THROWS_AS(broken([](auto& c) { c.domains.clear(); }).Validate(), ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.domains.push_back({"bank", {}}); }).Validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.domains = {{"atlantis", {}}}; }).Validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.bands = {{0.3, 0.2}}; }).Validate(), ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.bands = {{0.1, 0.3}, {0.2, 0.4}}; }).Validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.bands = {{0.01, 0.3}}; }).Validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.sessions_per_cell = 0; }).Validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.checkpoints = {120}; }).Validate(), ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.pool = {"nobody"}; }).Validate(), ConfigError);

  CHECK(CampaignConfigFromJson(ToJson(ok)) == ok);
  CHECK(ok.Hash() == CampaignConfig(ok).Hash());
  CHECK(ok.Hash() != broken([](auto& c) { c.seed = 12; }).Hash());
  CHECK(ok.PoolSpecs().size() == 10);
}

TEST_CASE("a one-domain campaign has the expected shape") {
  CampaignConfig c = OneDomain("car", 50);
  c.checkpoints = {20, 100};
  const Dataset d = BuildDataset(c);
  CHECK(d.traces.size() == 1500);
  std::map<std::string, int> per_class;
  for (const auto& r : d.traces) {
    ++per_class[r.trace.opponent_label];
    CHECK(ValidateTrace(r.trace, d.setups[0].domain).empty());
    CHECK(r.trace.deadline == 100);
  }
  CHECK(per_class.size() == 10);
  for (const auto& [label, n] : per_class) CHECK(n == 150);
  for (int n : c.checkpoints) {
    REQUIRE(d.features.at(n).size() == 1500);
    CHECK(d.features.at(n)[7].trace_id == d.traces[7].trace.id);
    CHECK(d.features.at(n)[7].steps.rows == n);
  }
  std::set<std::string> ids;
  for (const auto& r : d.traces) ids.insert(r.trace.id);
  CHECK(ids.size() == 1500);
}

TEST_CASE("campaigns are deterministic down to the bytes") {
  const CampaignConfig c = OneDomain("bank", 3);
  const Dataset a = BuildDataset(c);
  const Dataset b = BuildDataset(c);
  CHECK(a.ContentHash() == b.ContentHash());
  const fs::path root = fs::temp_directory_path() / "negrec_ds_det";
  fs::remove_all(root);
  WriteCampaign(a, root / "a");
  WriteCampaign(b, root / "b");
  for (const char* f : {"config.json", "traces.jsonl", "features_N20.jsonl",
                        "features_N100.jsonl", "setups.json", "pool_manifest.json"}) {
    CHECK_MESSAGE(Slurp(root / "a" / f) == Slurp(root / "b" / f), f);
  }
  CampaignConfig other = c;
  other.seed = 99;
  CHECK(BuildDataset(other).ContentHash() != a.ContentHash());
  fs::remove_all(root);
}

TEST_CASE("write and read round trip") {
  const Dataset a = BuildDataset(OneDomain("bank", 2));
  const fs::path dir = fs::temp_directory_path() / "negrec_ds_rt";
  fs::remove_all(dir);
  WriteCampaign(a, dir);
  const Dataset b = ReadCampaign(dir);
  CHECK(b.config == a.config);
  CHECK(b.traces.size() == a.traces.size());
  CHECK(b.ContentHash() == a.ContentHash());
  CHECK(b.setups[0].detector == a.setups[0].detector);
  CHECK(b.traces[5].Tag("profile") == a.traces[5].Tag("profile"));

  // A features file from another campaign is rejected.
  {
    std::ifstream in(dir / "features_N20.jsonl");
    std::string first;
    std::getline(in, first);
    auto j = nlohmann::json::parse(first);
    REQUIRE(j.contains("config_hash"));
  }
  std::string text = Slurp(dir / "features_N20.jsonl");
  const std::string hash = a.ConfigHash();
  for (auto pos = text.find(hash); pos != std::string::npos; pos = text.find(hash, pos)) {
    text.replace(pos, hash.size(), std::string(hash.size(), '0'));
  }
  std::ofstream(dir / "features_N20.jsonl", std::ios::binary) << text;
  CHECK_THROWS_AS(ReadCampaign(dir), SchemaError);
  fs::remove_all(dir);
}

TEST_CASE("stratified split sizes and disjointness") {
  const Dataset d = BuildDataset(OneDomain("bank", 50));
  const auto all = All(d.traces.size());
  const Split s = StratifiedSplit(d.traces, all, 0.8, 4);
  CHECK(s.train.size() == 1200);
  CHECK(s.test.size() == 300);
  std::map<std::string, int> train_count, test_count;
  for (auto i : s.train) ++train_count[d.traces[i].trace.opponent_label];
  for (auto i : s.test) ++test_count[d.traces[i].trace.opponent_label];
  for (const auto& label : d.Labels()) {
    CHECK(train_count[label] == 120);
    CHECK(test_count[label] == 30);
  }
  CHECK(SplitOverlap(d.traces, s).empty());
  CHECK(StratifiedSplit(d.traces, all, 0.8, 4).train == s.train);
  CHECK(StratifiedSplit(d.traces, all, 0.8, 5).train != s.train);

  // Ten records per class at ratio one half.
  std::vector<std::size_t> ten;
  std::map<std::string, int> taken;
  for (auto i : all) {
    if (taken[d.traces[i].trace.opponent_label]++ < 10) ten.push_back(i);
  }
  const Split half = StratifiedSplit(d.traces, ten, 0.5, 0);
  CHECK(half.train.size() == 50);
  CHECK(half.test.size() == 50);

  CHECK_THROWS_AS(StratifiedSplit(d.traces, all, 1.0, 0), ArgumentError);
  CHECK_THROWS_AS(StratifiedSplit(d.traces, all, 0.0, 0), ArgumentError);
  const std::vector<std::size_t> single = {0};
  CHECK_THROWS_AS(StratifiedSplit(d.traces, single, 0.5, 0), ConfigError);

  const auto manifest = SplitManifest(d.traces, s);
  CHECK(manifest["train"].size() == 1200);
  CHECK(manifest["test"].size() == 300);
}

TEST_CASE("tag splits") {
  CampaignConfig c = OneDomain("bank", 2);
  c.domains.push_back({"car", {}});
  const Dataset d = BuildDataset(c);
  const auto all = All(d.traces.size());
  const std::vector<std::string> others = {"car"};
  const Split s = SplitByTag(d.traces, all, "domain", "bank", others);
  CHECK(s.train.size() == 60);
  CHECK(s.test.size() == 60);
  for (auto i : s.train) CHECK(d.traces[i].domain == "bank");
  for (auto i : s.test) CHECK(d.traces[i].domain == "car");
  CHECK(SplitOverlap(d.traces, s).empty());

  const std::vector<std::string> profiles = {"bank/p1", "bank/p2"};
  const Split p = SplitByTag(d.traces, all, "profile", "bank/p0", profiles);
  CHECK(p.train.size() == 20);
  CHECK(p.test.size() == 40);

  const std::vector<std::string> missing = {"tram"};
  CHECK_THROWS_AS(SplitByTag(d.traces, all, "domain", "bank", missing), ConfigError);
  CHECK_THROWS_AS(SplitByTag(d.traces, all, "colour", "bank", others), ConfigError);
}

TEST_CASE("a generated domain can stand in for a preset") {
  CampaignConfig c = OneDomain("bank", 1);
  c.domains = {{"toy", {3, 3, 3}}};
  c.bands = {{0.1, std::sqrt(2.0)}};
  const Dataset d = BuildDataset(c);
  CHECK(d.setups[0].domain.OutcomeSpaceSize() == 27);
  CHECK(d.traces.size() == 10);
  CHECK(CampaignDirName(c) == "campaign-" + c.Hash());
}

}  // namespace
}  // namespace negrec
