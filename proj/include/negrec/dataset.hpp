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

// Simulation campaigns: domains x opponent profiles x pool strategies x
// sessions, labeled traces, features at every checkpoint round, and
// train/test splits.

#ifndef NEGREC_DATASET_HPP_
#define NEGREC_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "negrec/domain.hpp"
#include "negrec/features.hpp"
#include "negrec/protocol.hpp"
#include "negrec/strategies.hpp"

namespace negrec {

// A preset name ("bank", "car", "uni", "tram") or a custom domain when
// values_per_issue is given.
struct DomainSpec {
  std::string name;
  std::vector<int> values_per_issue;

  bool operator==(const DomainSpec&) const = default;
};

// Half-open opposition interval [lo, hi).
struct OppositionBand {
  double lo = 0.0;
  double hi = 0.0;

  bool Contains(double v) const { return v >= lo && v < hi; }
  bool operator==(const OppositionBand&) const = default;
};

inline constexpr int kProfileSearchCap = 100'000;

struct CampaignConfig {
  std::vector<DomainSpec> domains;
  std::uint64_t detector_profile_seed = 1;
  std::uint64_t opponent_profile_seed = 2;
  std::vector<OppositionBand> bands;
  std::vector<std::string> pool;  // strategy ids; empty means DefaultPool()
  int sessions_per_cell = 50;
  int deadline = 100;
  std::vector<int> checkpoints = {20, 40, 60, 80, 100};
  Scenario scenario = Scenario::kP1;
  std::uint64_t seed = 0;
  // Profile pairs below this opposition are too cooperative to be useful.
  double min_opposition = 0.05;

  // Throws ConfigError on any violated invariant.
  void Validate() const;
  std::vector<StrategySpec> PoolSpecs() const;
  std::string Hash() const;

  bool operator==(const CampaignConfig&) const = default;
};

nlohmann::json ToJson(const CampaignConfig& c);
CampaignConfig CampaignConfigFromJson(const nlohmann::json& j);

struct SelectedProfile {
  PreferenceProfile profile;
  double opposition = 0.0;
  int band = 0;
  int attempts = 0;
};

// Rejection-samples generated profiles until one falls in each band.
// Throws ConfigError naming the band and domain after kProfileSearchCap
// failed attempts.
std::vector<SelectedProfile> SelectProfilesByOpposition(
    const Domain& domain, const PreferenceProfile& detector_profile,
    std::span<const OppositionBand> bands, std::uint64_t seed,
    int cap = kProfileSearchCap);

struct DomainSetup {
  DomainSpec spec;
  Domain domain;
  PreferenceProfile detector;
  std::vector<SelectedProfile> opponents;
};

struct TraceRecord {
  Trace trace;
  std::string domain;  // DomainSpec name
  int profile = 0;     // index into DomainSetup::opponents
  double opposition = 0.0;

  // "domain" and "profile" tags drive tag-based splits.
  std::string Tag(const std::string& key) const;
};

struct Dataset {
  CampaignConfig config;
  std::vector<StrategySpec> pool;
  std::vector<DomainSetup> setups;
  std::vector<TraceRecord> traces;  // canonical cell order
  // Aligned with `traces`, one vector per checkpoint round.
  std::map<int, std::vector<FeatureSeries>> features;

  const DomainSetup& Setup(const std::string& name) const;
  std::vector<std::string> Labels() const { return PoolLabels(pool); }
  std::string ConfigHash() const { return config.Hash(); }
  std::string ManifestHash() const { return negrec::ManifestHash(pool); }
  // Hash over the serialized traces and features.
  std::string ContentHash() const;
};

// Runs every (domain, opponent profile, strategy) cell; sessions get
// distinct derived seeds. Throws ProtocolError naming the seed of any
// session that fails validation.
Dataset SimulateCampaign(const CampaignConfig& config);

// Fills dataset.features for every configured checkpoint.
void FeaturizeDataset(Dataset& dataset);

// SimulateCampaign followed by FeaturizeDataset.
Dataset BuildDataset(const CampaignConfig& config);

struct Split {
  std::vector<std::size_t> train;  // indices into Dataset::traces
  std::vector<std::size_t> test;
};

// Stratified by opponent label and deterministic in seed. Per class,
// round(ratio * n) records go to train. Throws ArgumentError for a ratio
// outside (0, 1) and ConfigError for a class with fewer than two records.
Split StratifiedSplit(std::span<const TraceRecord> records,
                      std::span<const std::size_t> subset, double ratio,
                      std::uint64_t seed);

// Records whose tag equals `train_value` train; records whose tag is in
// `test_values` test. Throws ConfigError when a record lacks the tag or a
// requested value matches nothing.
Split SplitByTag(std::span<const TraceRecord> records,
                 std::span<const std::size_t> subset, const std::string& key,
                 const std::string& train_value,
                 std::span<const std::string> test_values);

// Trace ids present on both sides.
std::vector<std::string> SplitOverlap(std::span<const TraceRecord> records,
                                      const Split& split);

nlohmann::json SplitManifest(std::span<const TraceRecord> records,
                             const Split& split);

// Writes config.json, pool_manifest.json, setups.json, traces.jsonl,
// features_N<k>.jsonl (when featurized), schema.json and provenance.json
// under `dir`.
void WriteCampaign(const Dataset& dataset, const std::filesystem::path& dir,
                   bool write_features = true);

// Reads what WriteCampaign wrote; features are loaded when present.
Dataset ReadCampaign(const std::filesystem::path& dir);

// Campaign directory name for a config: "campaign-<config hash>".
std::string CampaignDirName(const CampaignConfig& config);

}  // namespace negrec

#endif  // NEGREC_DATASET_HPP_
