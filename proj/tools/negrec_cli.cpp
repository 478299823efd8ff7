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

// negrec: pipeline stages and scenario runners. Every subcommand writes its
// artifacts under --out.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "negrec/dataset.hpp"
#include "negrec/domain.hpp"
#include "negrec/errors.hpp"
#include "negrec/experiment.hpp"
#include "negrec/features.hpp"
#include "negrec/nn.hpp"
#include "negrec/parallel.hpp"
#include "negrec/protocol.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace negrec {
namespace {

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void WriteJson(const fs::path& path, const json& j) {
  WriteFile(path, j.dump(2) + "\n");
}

std::vector<OppositionBand> ParseBands(const std::vector<std::string>& specs) {
  std::vector<OppositionBand> out;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("band '" + s + "' is not of the form lo:hi");
    }
    try {
      out.push_back({std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))});
    } catch (const std::exception&) {
      throw ConfigError("band '" + s + "' is not numeric");
    }
  }
  return out;
}

struct Common {
  std::uint64_t seed = 0;
  std::string out;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  cmd->add_option("--out", c.out, "Output directory")->required();
}

// Campaign overrides shared by simulate and experiment.
struct CampaignFlags {
  std::string config;
  std::string scenario;
  std::vector<std::string> domains;
  std::vector<std::string> bands;
  std::vector<std::string> pool;
  int sessions = 0;
  int deadline = 0;
  std::vector<int> checkpoints;
};

void AddCampaignFlags(CLI::App* cmd, CampaignFlags& f) {
  cmd->add_option("--config", f.config, "Campaign or experiment config JSON");
  cmd->add_option("--domains", f.domains, "Preset domain names")->delimiter(',');
  cmd->add_option("--bands", f.bands, "Opposition bands lo:hi")->delimiter(',');
  cmd->add_option("--pool", f.pool, "Strategy ids")->delimiter(',');
  cmd->add_option("--sessions", f.sessions, "Sessions per cell");
  cmd->add_option("--deadline", f.deadline, "Round deadline");
  cmd->add_option("--checkpoints", f.checkpoints, "Checkpoint rounds")
      ->delimiter(',');
}

void ApplyCampaignFlags(const CampaignFlags& f, CampaignConfig& c) {
  if (!f.domains.empty()) {
    c.domains.clear();
    for (const auto& d : f.domains) c.domains.push_back({d, {}});
  }
  if (!f.bands.empty()) c.bands = ParseBands(f.bands);
  if (!f.pool.empty()) c.pool = f.pool;
  if (f.sessions > 0) c.sessions_per_cell = f.sessions;
  if (f.deadline > 0) c.deadline = f.deadline;
  if (!f.checkpoints.empty()) c.checkpoints = f.checkpoints;
  c.Validate();
}

Dataset LoadFeaturized(const fs::path& dir) {
  Dataset ds = ReadCampaign(dir);
  if (ds.features.size() != ds.config.checkpoints.size()) FeaturizeDataset(ds);
  return ds;
}

int RunGenDomain(const Common& c, const std::string& preset,
                 const std::vector<int>& values, const std::string& id) {
  Domain d = values.empty()
                 ? PresetDomain(preset.empty() ? "bank" : preset, c.seed)
                 : GenerateDomain(static_cast<int>(values.size()), values, c.seed,
                                  id);
  WriteJson(fs::path(c.out) / "domain.json", ToJson(d));
  std::cout << d.id() << ": " << d.num_issues() << " issues, "
            << d.OutcomeSpaceSize() << " outcomes\n";
  return 0;
}

int RunGenProfile(const Common& c, const std::string& domain_path,
                  const std::string& mine_path,
                  const std::vector<std::string>& bands, const std::string& id) {
  const Domain d = DomainFromJson(ReadJson(domain_path));
  if (bands.empty()) {
    PreferenceProfile p = GenerateProfile(d, c.seed, id.empty() ? "profile" : id);
    WriteJson(fs::path(c.out) / "profile.json", ToJson(p));
    return 0;
  }
  if (mine_path.empty()) {
    throw ConfigError("--band needs --mine, the profile to measure against");
  }
  const PreferenceProfile mine = ProfileFromJson(ReadJson(mine_path));
  mine.CheckCompatible(d);
  const auto parsed = ParseBands(bands);
  const auto picked = SelectProfilesByOpposition(d, mine, parsed, c.seed);
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const std::string name = "profile_b" + std::to_string(i) + ".json";
    WriteJson(fs::path(c.out) / name, ToJson(picked[i].profile));
    std::cout << name << " opposition " << picked[i].opposition << " after "
              << picked[i].attempts << " attempts\n";
  }
  return 0;
}

CampaignConfig LoadCampaignConfig(const Common& c, const CampaignFlags& f,
                                  bool seed_given) {
  CampaignConfig cfg;
  if (!f.config.empty()) {
    json j = ReadJson(f.config);
    cfg = j.contains("campaign") ? CampaignConfigFromJson(j.at("campaign"))
                                 : CampaignConfigFromJson(j);
  } else {
    cfg = StandardExperiment(
              ScenarioFromString(f.scenario.empty() ? "p1" : f.scenario), c.seed)
              .campaign;
  }
  if (!f.scenario.empty()) cfg.scenario = ScenarioFromString(f.scenario);
  if (seed_given) cfg.seed = c.seed;
  ApplyCampaignFlags(f, cfg);
  return cfg;
}

int RunSimulate(const Common& c, const CampaignFlags& f, bool seed_given,
                bool featurize) {
  const CampaignConfig cfg = LoadCampaignConfig(c, f, seed_given);
  Dataset ds = SimulateCampaign(cfg);
  if (featurize) FeaturizeDataset(ds);
  const fs::path dir = fs::path(c.out) / CampaignDirName(cfg);
  WriteCampaign(ds, dir, featurize);
  std::cout << dir.string() << "\n" << ds.traces.size() << " traces\n";
  return 0;
}

int RunFeaturize(const Common& c, const std::string& campaign) {
  Dataset ds = ReadCampaign(campaign);
  FeaturizeDataset(ds);
  WriteCampaign(ds, c.out, true);
  std::cout << ds.traces.size() << " traces featurized at "
            << ds.features.size() << " checkpoints\n";
  return 0;
}

std::vector<std::size_t> AllIndices(const Dataset& ds) {
  std::vector<std::size_t> idx(ds.traces.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

int RunTrain(const Common& c, const std::string& campaign, double ratio,
             const std::vector<int>& only, int epochs, bool use_all) {
  const Dataset ds = LoadFeaturized(campaign);
  const auto all = AllIndices(ds);
  Split split;
  if (use_all) {
    split.train = all;
  } else {
    split = StratifiedSplit(ds.traces, all, ratio, c.seed);
  }
  const fs::path out(c.out);
  WriteJson(out / "split.json", SplitManifest(ds.traces, split));
  TrainConfig tc;
  tc.seed = c.seed;
  if (epochs > 0) tc.epochs = epochs;
  const auto labels = ds.Labels();
  ModelSet set;
  for (int n : ds.config.checkpoints) {
    if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) {
      continue;
    }
    std::vector<FeatureSeries> train;
    for (std::size_t i : split.train) train.push_back(ds.features.at(n)[i]);
    TrainResult r = Train(train, labels, tc);
    WriteFile(out / ("loss_N" + std::to_string(n) + ".csv"),
              LossHistoryCsv(r.history));
    std::cout << "N=" << n << " final loss " << r.history.back().mean_loss
              << " train acc " << r.history.back().train_accuracy << "\n";
    set.Add(std::move(r.params));
  }
  if (set.empty()) throw ConfigError("no checkpoint selected for training");
  set.Save(out);
  return 0;
}

int RunEval(const Common& c, const std::string& models_dir,
            const std::string& campaign, const std::string& split_path) {
  const Dataset ds = LoadFeaturized(campaign);
  const ModelSet set = ModelSet::Load(models_dir);
  std::vector<std::size_t> test;
  if (split_path.empty()) {
    test = AllIndices(ds);
  } else {
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < ds.traces.size(); ++i) by_id[ds.traces[i].trace.id] = i;
    const json split = ReadJson(split_path);
    for (const auto& id : split.at("test")) {
      auto it = by_id.find(id.get<std::string>());
      if (it == by_id.end()) {
        throw ConfigError("split names unknown trace '" + id.get<std::string>() + "'");
      }
      test.push_back(it->second);
    }
  }
  json results = json::array();
  for (int n : set.rounds()) {
    auto it = ds.features.find(n);
    if (it == ds.features.end()) {
      throw SchemaError("campaign has no features at checkpoint " + std::to_string(n));
    }
    std::vector<const FeatureSeries*> ptrs;
    for (std::size_t i : test) ptrs.push_back(&it->second[i]);
    const Evaluation ev = Evaluate(set.at(n), ptrs);
    results.push_back({{"checkpoint", n},
                       {"n", ev.confusion.total()},
                       {"accuracy", ev.confusion.accuracy()},
                       {"confusion", ToJson(ev.confusion)}});
    std::cout << "N=" << n << " accuracy " << ev.confusion.accuracy() << " on "
              << ev.confusion.total() << " records\n";
  }
  WriteJson(fs::path(c.out) / "eval.json", results);
  return 0;
}

int RunRecognize(const Common& c, const std::string& models_dir,
                 const std::string& campaign, const std::string& trace_id,
                 const std::string& trace_path, std::optional<int> round) {
  const Dataset ds = ReadCampaign(campaign);
  const ModelSet set = ModelSet::Load(models_dir);
  Trace trace;
  if (!trace_path.empty()) {
    trace = TraceFromJson(ReadJson(trace_path));
  } else {
    bool found = false;
    for (const auto& r : ds.traces) {
      if (r.trace.id == trace_id) {
        trace = r.trace;
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("no trace '" + trace_id + "' in campaign");
  }
  const DomainSetup* setup = nullptr;
  for (const auto& s : ds.setups) {
    if (s.domain.id() == trace.domain_id) setup = &s;
  }
  if (setup == nullptr) {
    throw ConfigError("campaign has no domain '" + trace.domain_id + "'");
  }
  FeatureContext ctx;
  ctx.domain = &setup->domain;
  ctx.mine = &setup->detector;
  ctx.deadline = trace.deadline;
  const Scenario scenario = set.Select(1).scenario;
  if (KnowsOpponentProfile(scenario)) {
    for (const auto& o : setup->opponents) {
      if (o.profile.id() == trace.profile_o) ctx.opponent = &o.profile;
    }
  }
  const Recognition rec = Recognize(set, trace, scenario, ctx, round);
  json ranked = json::array();
  for (const auto& p : rec.ranked) {
    ranked.push_back({{"label", p.label}, {"probability", p.probability}});
  }
  const json out = {{"trace_id", trace.id},
                    {"round", rec.round},
                    {"model_round", rec.model_round},
                    {"ranked", ranked}};
  WriteJson(fs::path(c.out) / "recognition.json", out);
  std::cout << "model N=" << rec.model_round << "\n";
  for (const auto& p : rec.ranked) {
    std::cout << "  " << p.label << " " << p.probability << "\n";
  }
  return 0;
}

int RunScenario(const Common& c, const std::string& which,
                const CampaignFlags& f, int epochs, bool save_models) {
  const Scenario scenario = ScenarioFromString(which);
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = ExperimentConfigFromJson(ReadJson(f.config));
    cfg.campaign.scenario = scenario;
    cfg.campaign.seed = c.seed;
    cfg.train.seed = c.seed;
    cfg.split_seed = c.seed;
  } else {
    cfg = StandardExperiment(scenario, c.seed);
  }
  if (epochs > 0) cfg.train.epochs = epochs;
  ApplyCampaignFlags(f, cfg.campaign);
  const ExperimentResult res = RunExperiment(cfg);
  const fs::path out(c.out);
  WriteJson(out / "experiment_config.json", ToJson(cfg));
  WriteJson(out / "report.json", ToJson(res.report));
  WriteFile(out / "report.txt", ReportText(res.report));
  WriteFile(out / "report.csv", ReportCsv(res.report));
  WriteJson(out / "timings.json", TimingsJson(res.report));
  for (const auto& [group, hist] : res.histories) {
    std::string safe = group;
    std::replace(safe.begin(), safe.end(), '/', '_');
    for (const auto& [n, h] : hist) {
      WriteFile(out / "loss" / (safe + "_N" + std::to_string(n) + ".csv"),
                LossHistoryCsv(h));
    }
    if (save_models) res.models.at(group).Save(out / "models" / safe);
  }
  std::cout << ReportText(res.report);
  return 0;
}

int RunReport(const Common& c, const std::vector<std::string>& inputs) {
  const fs::path out(c.out);
  fs::create_directories(out);
  for (const auto& in : inputs) {
    const ExperimentReport r = ExperimentReportFromJson(ReadJson(in));
    const std::string stem = "report_" + ToString(r.scenario);
    WriteFile(out / (stem + ".txt"), ReportText(r));
    WriteFile(out / (stem + ".csv"), ReportCsv(r));
    std::cout << ReportText(r) << "\n";
  }
  return 0;
}

}  // namespace
}  // namespace negrec

int main(int argc, char** argv) {
  using namespace negrec;
  CLI::App app{"Opponent strategy recognition for bilateral negotiation"};
  app.require_subcommand(1);

  Common common;

  auto* gen_domain = app.add_subcommand("gen-domain", "Write a domain JSON");
  std::string preset, domain_id;
  std::vector<int> values;
  AddCommon(gen_domain, common);
  gen_domain->add_option("--preset", preset, "bank, car, uni or tram");
  gen_domain->add_option("--values", values, "Values per issue")->delimiter(',');
  gen_domain->add_option("--id", domain_id, "Domain id");

  auto* gen_profile = app.add_subcommand("gen-profile", "Write preference profiles");
  std::string domain_path, mine_path, profile_id;
  std::vector<std::string> profile_bands;
  AddCommon(gen_profile, common);
  gen_profile->add_option("--domain", domain_path, "Domain JSON")->required();
  gen_profile->add_option("--mine", mine_path, "Reference profile for --band");
  gen_profile->add_option("--band", profile_bands, "Opposition bands lo:hi")
      ->delimiter(',');
  gen_profile->add_option("--id", profile_id, "Profile id");

  auto* simulate = app.add_subcommand("simulate", "Run a simulation campaign");
  CampaignFlags sim_flags;
  bool sim_features = false;
  AddCommon(simulate, common);
  AddCampaignFlags(simulate, sim_flags);
  simulate->add_option("--scenario", sim_flags.scenario, "p1, p2, p3 or p4");
  simulate->add_flag("--featurize", sim_features, "Also write features");

  auto* featurize = app.add_subcommand("featurize", "Featurize a campaign");
  std::string campaign_dir;
  AddCommon(featurize, common);
  featurize->add_option("--campaign", campaign_dir, "Campaign directory")
      ->required();

  auto* train = app.add_subcommand("train", "Train a model per checkpoint");
  double ratio = 0.8;
  std::vector<int> only;
  int epochs = 0;
  bool use_all = false;
  AddCommon(train, common);
  train->add_option("--campaign", campaign_dir, "Campaign directory")->required();
  train->add_option("--ratio", ratio, "Train fraction")->capture_default_str();
  train->add_option("--checkpoints", only, "Only these rounds")->delimiter(',');
  train->add_option("--epochs", epochs, "Epochs (default 80)");
  train->add_flag("--all", use_all, "Train on every record");

  auto* eval = app.add_subcommand("eval", "Evaluate a model set");
  std::string models_dir, split_path;
  AddCommon(eval, common);
  eval->add_option("--models", models_dir, "Model directory")->required();
  eval->add_option("--campaign", campaign_dir, "Campaign directory")->required();
  eval->add_option("--split", split_path, "split.json; test side is used");

  auto* recognize = app.add_subcommand("recognize", "Rank strategies for a trace");
  std::string trace_id, trace_path;
  std::optional<int> round;
  AddCommon(recognize, common);
  recognize->add_option("--models", models_dir, "Model directory")->required();
  recognize->add_option("--campaign", campaign_dir, "Campaign with the setup")
      ->required();
  auto* id_opt = recognize->add_option("--trace-id", trace_id, "Trace in campaign");
  auto* path_opt = recognize->add_option("--trace", trace_path, "Trace JSON file");
  id_opt->excludes(path_opt);
  recognize->add_option("--round", round, "Round for model selection");

  auto* experiment = app.add_subcommand("experiment", "Run a scenario");
  std::string which;
  CampaignFlags exp_flags;
  int exp_epochs = 0;
  bool save_models = false;
  AddCommon(experiment, common);
  experiment->add_option("scenario", which, "p1, p2, p3 or p4")
      ->required()
      ->check(CLI::IsMember({"p1", "p2", "p3", "p4", "P1", "P2", "P3", "P4"}));
  AddCampaignFlags(experiment, exp_flags);
  experiment->add_option("--epochs", exp_epochs, "Epochs (default 80)");
  experiment->add_flag("--save-models", save_models, "Write model sets");

  auto* report = app.add_subcommand("report", "Render report JSON files");
  std::vector<std::string> inputs;
  AddCommon(report, common);
  report->add_option("inputs", inputs, "report.json files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ThreadCount();
    if (*gen_domain) return RunGenDomain(common, preset, values, domain_id);
    if (*gen_profile) {
      return RunGenProfile(common, domain_path, mine_path, profile_bands,
                           profile_id);
    }
    if (*simulate) {
      return RunSimulate(common, sim_flags, simulate->count("--seed") > 0,
                         sim_features);
    }
    if (*featurize) return RunFeaturize(common, campaign_dir);
    if (*train) {
      return RunTrain(common, campaign_dir, ratio, only, epochs, use_all);
    }
    if (*eval) return RunEval(common, models_dir, campaign_dir, split_path);
    if (*recognize) {
      if (trace_id.empty() && trace_path.empty()) {
        throw ConfigError("recognize needs --trace-id or --trace");
      }
      return RunRecognize(common, models_dir, campaign_dir, trace_id, trace_path,
                          round);
    }
    if (*experiment) {
      return RunScenario(common, which, exp_flags, exp_epochs, save_models);
    }
    if (*report) return RunReport(common, inputs);
  } catch (const std::exception& e) {
    std::cerr << "negrec: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
