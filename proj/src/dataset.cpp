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

#include "negrec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "negrec/errors.hpp"
#include "negrec/parallel.hpp"
#include "negrec/random.hpp"

namespace negrec {

namespace {

constexpr double kMaxOpposition = std::numbers::sqrt2;

Domain MakeDomain(const DomainSpec& spec) {
  if (spec.values_per_issue.empty()) return PresetDomain(spec.name);
  return GenerateDomain(static_cast<int>(spec.values_per_issue.size()),
                        spec.values_per_issue, 0, spec.name);
}

double MeasureOpposition(const Domain& domain, const PreferenceProfile& a,
                         const PreferenceProfile& b, std::uint64_t seed) {
  return EstimateOpposition(domain, a, b, seed).value;
}

std::string SessionId(const std::string& domain, int profile,
                      const std::string& strategy, int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", k);
  return domain + "/p" + std::to_string(profile) + "/" + strategy + "/" + buf;
}

std::ofstream OpenOut(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

std::ifstream OpenIn(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  return in;
}

}  // namespace

void CampaignConfig::Validate() const {
  if (domains.empty()) throw ConfigError("campaign needs at least one domain");
  std::set<std::string> names;
  for (const auto& d : domains) {
    if (!names.insert(d.name).second) {
      throw ConfigError("duplicate domain name '" + d.name + "'");
    }
    try {
      MakeDomain(d);
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("domain '") + d.name + "': " + e.what());
    }
  }
  if (bands.empty()) throw ConfigError("campaign needs at least one band");
  for (const auto& b : bands) {
    if (!(b.lo >= 0.0 && b.lo < b.hi && b.hi <= kMaxOpposition + 1e-12)) {
      throw ConfigError("opposition band must satisfy 0 <= lo < hi <= sqrt(2)");
    }
    if (b.lo < min_opposition) {
      throw ConfigError("opposition band starts below the minimum of " +
                        std::to_string(min_opposition));
    }
  }
  std::vector<OppositionBand> sorted = bands;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].lo < sorted[i - 1].hi) {
      throw ConfigError("opposition bands overlap");
    }
  }
  if (sessions_per_cell < 1) throw ConfigError("sessions_per_cell must be >= 1");
  if (deadline < 1) throw ConfigError("deadline must be >= 1");
  if (checkpoints.empty()) throw ConfigError("need at least one checkpoint");
  for (int n : checkpoints) {
    if (n < 1 || n > deadline) {
      throw ConfigError("checkpoint rounds must lie in [1, deadline]");
    }
  }
  try {
    PoolSpecs();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<StrategySpec> CampaignConfig::PoolSpecs() const {
  if (pool.empty()) return DefaultPool();
  return PoolSubset(pool);
}

std::string CampaignConfig::Hash() const {
  return HashHex(Fnv1a(ToJson(*this).dump()));
}

nlohmann::json ToJson(const CampaignConfig& c) {
  nlohmann::json domains = nlohmann::json::array();
  for (const auto& d : c.domains) {
    domains.push_back({{"name", d.name}, {"values_per_issue", d.values_per_issue}});
  }
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : c.bands) bands.push_back({b.lo, b.hi});
  return {{"domains", std::move(domains)},
          {"detector_profile_seed", c.detector_profile_seed},
          {"opponent_profile_seed", c.opponent_profile_seed},
          {"bands", std::move(bands)},
          {"pool", c.pool},
          {"sessions_per_cell", c.sessions_per_cell},
          {"deadline", c.deadline},
          {"checkpoints", c.checkpoints},
          {"scenario", ToString(c.scenario)},
          {"seed", c.seed},
          {"min_opposition", c.min_opposition}};
}

CampaignConfig CampaignConfigFromJson(const nlohmann::json& j) {
  CampaignConfig c;
  try {
    for (const auto& jd : j.at("domains")) {
      DomainSpec d;
      if (jd.is_string()) {
        d.name = jd.get<std::string>();
      } else {
        d.name = jd.at("name").get<std::string>();
        d.values_per_issue = jd.value("values_per_issue", std::vector<int>{});
      }
      c.domains.push_back(std::move(d));
    }
    for (const auto& jb : j.at("bands")) {
      c.bands.push_back({jb.at(0).get<double>(), jb.at(1).get<double>()});
    }
    c.detector_profile_seed =
        j.value("detector_profile_seed", c.detector_profile_seed);
    c.opponent_profile_seed =
        j.value("opponent_profile_seed", c.opponent_profile_seed);
    c.pool = j.value("pool", std::vector<std::string>{});
    c.sessions_per_cell = j.value("sessions_per_cell", c.sessions_per_cell);
    c.deadline = j.value("deadline", c.deadline);
    c.checkpoints = j.value("checkpoints", c.checkpoints);
    c.scenario = ScenarioFromString(j.value("scenario", std::string("P1")));
    c.seed = j.value("seed", c.seed);
    c.min_opposition = j.value("min_opposition", c.min_opposition);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed campaign config: ") + e.what());
  }
  c.Validate();
  return c;
}

std::vector<SelectedProfile> SelectProfilesByOpposition(
    const Domain& domain, const PreferenceProfile& detector_profile,
    std::span<const OppositionBand> bands, std::uint64_t seed, int cap) {
  for (const auto& b : bands) {
    if (!(b.lo >= 0.0 && b.lo < b.hi && b.hi <= kMaxOpposition + 1e-12)) {
      throw ArgumentError("opposition band must satisfy 0 <= lo < hi <= sqrt(2)");
    }
  }
  std::vector<SelectedProfile> out;
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const OppositionBand& band = bands[k];
    bool found = false;
    for (int attempt = 0; attempt < cap && !found; ++attempt) {
      PreferenceProfile candidate = GenerateProfile(
          domain, DeriveSeed(seed, {k, static_cast<std::uint64_t>(attempt)}),
          domain.id() + "-opp" + std::to_string(k));
      const double opp = MeasureOpposition(domain, detector_profile, candidate,
                                           DeriveSeed(seed, {k, 0x5eed}));
      if (band.Contains(opp)) {
        out.push_back({std::move(candidate), opp, static_cast<int>(k),
                       attempt + 1});
        found = true;
      }
    }
    if (!found) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "[%g, %g)", band.lo, band.hi);
      throw ConfigError("opposition band " + std::string(buf) +
                        " unreachable on domain '" + domain.id() + "' after " +
                        std::to_string(cap) + " attempts");
    }
  }
  return out;
}

std::string TraceRecord::Tag(const std::string& key) const {
  if (key == "domain") return domain;
  if (key == "profile") return domain + "/p" + std::to_string(profile);
  if (key == "label") return trace.opponent_label;
  return {};
}

const DomainSetup& Dataset::Setup(const std::string& name) const {
  for (const auto& s : setups) {
    if (s.spec.name == name) return s;
  }
  throw ConfigError("no domain '" + name + "' in dataset");
}

std::string Dataset::ContentHash() const {
  std::uint64_t h = Fnv1a("negrec-dataset");
  for (const auto& r : traces) h = Fnv1a(ToJson(r.trace).dump(), h);
  for (const auto& [n, series] : features) {
    h = Fnv1a(std::to_string(n), h);
    for (const auto& fs : series) h = Fnv1a(ToJson(fs).dump(), h);
  }
  return HashHex(h);
}

Dataset SimulateCampaign(const CampaignConfig& config) {
  config.Validate();
  Dataset ds;
  ds.config = config;
  ds.pool = config.PoolSpecs();

  for (const DomainSpec& spec : config.domains) {
    Domain domain = MakeDomain(spec);
    PreferenceProfile detector = GenerateProfile(
        domain, DeriveSeed(config.detector_profile_seed, {HashTag(spec.name)}),
        spec.name + "-detector");
    auto opponents = SelectProfilesByOpposition(
        domain, detector, config.bands,
        DeriveSeed(config.opponent_profile_seed, {HashTag(spec.name)}));
    ds.setups.push_back({spec, std::move(domain), std::move(detector),
                         std::move(opponents)});
  }

  struct Cell {
    std::size_t setup;
    int profile;
    std::size_t strategy;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < ds.setups.size(); ++s) {
    for (std::size_t p = 0; p < ds.setups[s].opponents.size(); ++p) {
      for (std::size_t k = 0; k < ds.pool.size(); ++k) {
        cells.push_back({s, static_cast<int>(p), k});
      }
    }
  }

  const int per_cell = config.sessions_per_cell;
  std::vector<TraceRecord> records(cells.size() * per_cell);
  ParallelFor(cells.size(), [&](std::size_t c) {
    const Cell& cell = cells[c];
    const DomainSetup& setup = ds.setups[cell.setup];
    const SelectedProfile& opp = setup.opponents[cell.profile];
    const StrategySpec& spec = ds.pool[cell.strategy];
    for (int k = 0; k < per_cell; ++k) {
      const std::uint64_t seed = DeriveSeed(
          config.seed, {HashTag(setup.spec.name),
                        static_cast<std::uint64_t>(cell.profile),
                        HashTag(spec.id), static_cast<std::uint64_t>(k)});
      NiceTitForTat detector;
      auto opponent = MakeStrategy(spec);
      Trace trace;
      try {
        trace = RunSession(detector, *opponent, setup.domain, setup.detector,
                           opp.profile, config.deadline, seed);
      } catch (const ProtocolError& e) {
        throw ProtocolError(std::string(e.what()) + " (session seed " +
                            std::to_string(seed) + ")");
      }
      trace.id = SessionId(setup.spec.name, cell.profile, spec.id, k);
      const auto problems = ValidateTrace(trace, setup.domain);
      if (!problems.empty()) {
        throw ProtocolError("session seed " + std::to_string(seed) +
                            " failed validation: " + problems.front());
      }
      TraceRecord& rec = records[c * per_cell + k];
      rec.trace = std::move(trace);
      rec.domain = setup.spec.name;
      rec.profile = cell.profile;
      rec.opposition = opp.opposition;
    }
  });
  ds.traces = std::move(records);
  return ds;
}

void FeaturizeDataset(Dataset& dataset) {
  const CampaignConfig& config = dataset.config;
  const Scenario scenario = config.scenario;
  dataset.features.clear();
  for (int n : config.checkpoints) {
    std::vector<FeatureSeries> series(dataset.traces.size());
    ParallelFor(dataset.traces.size(), [&](std::size_t i) {
      const TraceRecord& rec = dataset.traces[i];
      const DomainSetup& setup = dataset.Setup(rec.domain);
      FeatureContext ctx;
      ctx.domain = &setup.domain;
      ctx.mine = &setup.detector;
      ctx.opponent = KnowsOpponentProfile(scenario)
                         ? &setup.opponents[rec.profile].profile
                         : nullptr;
      ctx.deadline = config.deadline;
      series[i] = Featurize(rec.trace, scenario, ctx, n);
    });
    dataset.features[n] = std::move(series);
  }
}

Dataset BuildDataset(const CampaignConfig& config) {
  Dataset ds = SimulateCampaign(config);
  FeaturizeDataset(ds);
  return ds;
}

Split StratifiedSplit(std::span<const TraceRecord> records,
                      std::span<const std::size_t> subset, double ratio,
                      std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ArgumentError("split ratio must lie in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i : subset) {
    by_label[records[i].trace.opponent_label].push_back(i);
  }
  Split split;
  for (auto& [label, idx] : by_label) {
    if (idx.size() < 2) {
      throw ConfigError("class '" + label + "' has fewer than two records");
    }
    Rng rng(DeriveSeed(seed, {HashTag(label)}));
    rng.Shuffle(idx);
    const auto n = idx.size();
    auto n_train = static_cast<std::size_t>(std::llround(ratio * n));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + n_train);
    split.test.insert(split.test.end(), idx.begin() + n_train, idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Split SplitByTag(std::span<const TraceRecord> records,
                 std::span<const std::size_t> subset, const std::string& key,
                 const std::string& train_value,
                 std::span<const std::string> test_values) {
  const std::set<std::string> tests(test_values.begin(), test_values.end());
  if (tests.contains(train_value)) {
    throw ConfigError("tag value '" + train_value + "' on both sides of split");
  }
  std::map<std::string, int> hits;
  Split split;
  for (std::size_t i : subset) {
    const std::string tag = records[i].Tag(key);
    if (tag.empty()) {
      throw ConfigError("record '" + records[i].trace.id + "' lacks tag '" +
                        key + "'");
    }
    if (tag == train_value) {
      split.train.push_back(i);
      ++hits[tag];
    } else if (tests.contains(tag)) {
      split.test.push_back(i);
      ++hits[tag];
    }
  }
  if (!hits.contains(train_value)) {
    throw ConfigError("no records tagged " + key + "=" + train_value);
  }
  for (const auto& v : tests) {
    if (!hits.contains(v)) throw ConfigError("no records tagged " + key + "=" + v);
  }
  return split;
}

std::vector<std::string> SplitOverlap(std::span<const TraceRecord> records,
                                      const Split& split) {
  std::set<std::string> train;
  for (std::size_t i : split.train) train.insert(records[i].trace.id);
  std::vector<std::string> both;
  for (std::size_t i : split.test) {
    if (train.contains(records[i].trace.id)) both.push_back(records[i].trace.id);
  }
  return both;
}

nlohmann::json SplitManifest(std::span<const TraceRecord> records,
                             const Split& split) {
  nlohmann::json train = nlohmann::json::array();
  nlohmann::json test = nlohmann::json::array();
  for (std::size_t i : split.train) train.push_back(records[i].trace.id);
  for (std::size_t i : split.test) test.push_back(records[i].trace.id);
  return {{"train", std::move(train)}, {"test", std::move(test)}};
}

std::string CampaignDirName(const CampaignConfig& config) {
  return "campaign-" + config.Hash();
}

void WriteCampaign(const Dataset& dataset, const std::filesystem::path& dir,
                   bool write_features) {
  std::filesystem::create_directories(dir);
  const std::string config_hash = dataset.ConfigHash();
  OpenOut(dir / "config.json") << ToJson(dataset.config).dump(2) << '\n';
  OpenOut(dir / "pool_manifest.json") << PoolManifest(dataset.pool).dump(2)
                                      << '\n';

  nlohmann::json setups = nlohmann::json::array();
  for (const auto& s : dataset.setups) {
    nlohmann::json opps = nlohmann::json::array();
    for (const auto& o : s.opponents) {
      opps.push_back({{"profile", ToJson(o.profile)},
                      {"opposition", o.opposition},
                      {"band", o.band},
                      {"attempts", o.attempts}});
    }
    setups.push_back({{"name", s.spec.name},
                      {"values_per_issue", s.spec.values_per_issue},
                      {"domain", ToJson(s.domain)},
                      {"detector", ToJson(s.detector)},
                      {"opponents", std::move(opps)}});
  }
  OpenOut(dir / "setups.json") << setups.dump(2) << '\n';

  {
    auto out = OpenOut(dir / "traces.jsonl");
    for (const auto& r : dataset.traces) {
      nlohmann::json j = ToJson(r.trace);
      j["domain"] = r.domain;
      j["profile"] = r.profile;
      j["opposition"] = r.opposition;
      out << j.dump() << '\n';
    }
  }
  nlohmann::json feature_files = nlohmann::json::array();
  if (write_features) {
    for (const auto& [n, series] : dataset.features) {
      const std::string name = "features_N" + std::to_string(n) + ".jsonl";
      auto out = OpenOut(dir / name);
      for (const auto& fs : series) {
        nlohmann::json j = ToJson(fs);
        j["config_hash"] = config_hash;
        out << j.dump() << '\n';
      }
      feature_files.push_back(name);
    }
  }
  nlohmann::json schema = FeatureSchema(dataset.config.scenario);
  schema["scenario"] = ToString(dataset.config.scenario);
  schema["schema_hash"] = SchemaHash(dataset.config.scenario);
  OpenOut(dir / "schema.json") << schema.dump(2) << '\n';

  nlohmann::json prov = {{"config_hash", config_hash},
                         {"manifest_hash", dataset.ManifestHash()},
                         {"schema_hash", SchemaHash(dataset.config.scenario)},
                         {"content_hash", dataset.ContentHash()},
                         {"traces", dataset.traces.size()},
                         {"feature_files", feature_files}};
  OpenOut(dir / "provenance.json") << prov.dump(2) << '\n';
}

Dataset ReadCampaign(const std::filesystem::path& dir) {
  Dataset ds;
  try {
    ds.config = CampaignConfigFromJson(
        nlohmann::json::parse(OpenIn(dir / "config.json")));
    ds.pool = PoolFromManifest(
        nlohmann::json::parse(OpenIn(dir / "pool_manifest.json")));
    for (const auto& js : nlohmann::json::parse(OpenIn(dir / "setups.json"))) {
      DomainSetup setup{
          {js.at("name").get<std::string>(),
           js.at("values_per_issue").get<std::vector<int>>()},
          DomainFromJson(js.at("domain")),
          ProfileFromJson(js.at("detector")),
          {}};
      for (const auto& jo : js.at("opponents")) {
        setup.opponents.push_back({ProfileFromJson(jo.at("profile")),
                                   jo.at("opposition").get<double>(),
                                   jo.at("band").get<int>(),
                                   jo.at("attempts").get<int>()});
      }
      ds.setups.push_back(std::move(setup));
    }
    {
      auto in = OpenIn(dir / "traces.jsonl");
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        TraceRecord rec;
        rec.trace = TraceFromJson(j);
        rec.domain = j.at("domain").get<std::string>();
        rec.profile = j.at("profile").get<int>();
        rec.opposition = j.at("opposition").get<double>();
        ds.traces.push_back(std::move(rec));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed campaign directory " + dir.string() + ": " +
                      e.what());
  }
  const std::string config_hash = ds.ConfigHash();
  for (int n : ds.config.checkpoints) {
    const auto path = dir / ("features_N" + std::to_string(n) + ".jsonl");
    if (!std::filesystem::exists(path)) continue;
    auto in = OpenIn(path);
    std::vector<FeatureSeries> series;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      if (j.value("config_hash", std::string()) != config_hash) {
        throw SchemaError("feature record in " + path.string() +
                          " was produced by a different config");
      }
      series.push_back(FeatureSeriesFromJson(j));
    }
    if (series.size() != ds.traces.size()) {
      throw SchemaError(path.string() + " is not aligned with traces.jsonl");
    }
    ds.features[n] = std::move(series);
  }
  return ds;
}

}  // namespace negrec
