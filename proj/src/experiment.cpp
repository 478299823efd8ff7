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

#include "negrec/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "negrec/errors.hpp"
#include "negrec/parallel.hpp"

namespace negrec {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr int kEvalChunk = 256;

std::string ProfileGroup(const std::string& domain, int profile) {
  return domain + "/p" + std::to_string(profile);
}

std::vector<DomainSpec> PresetSpecs() {
  std::vector<DomainSpec> out;
  for (const auto& name : PresetNames()) out.push_back({name, {}});
  return out;
}

// One model to train: which records, at which checkpoint.
struct Job {
  std::string group;
  int checkpoint = 0;
  std::vector<std::size_t> train;
};

// One evaluation: a job's model on a test subset.
struct Probe {
  std::size_t job = 0;
  std::string test_group;
  std::vector<std::size_t> test;
};

}  // namespace

ConfusionMatrix ConfusionMatrix::Zeros(std::vector<std::string> labels) {
  ConfusionMatrix m;
  const auto n = labels.size();
  m.labels = std::move(labels);
  m.counts.assign(n, std::vector<int>(n, 0));
  return m;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  if (o.labels != labels) {
    throw ArgumentError("cannot add confusion matrices with different labels");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts.size(); ++j) counts[i][j] += o.counts[i][j];
  }
  return *this;
}

int ConfusionMatrix::total() const {
  int t = 0;
  for (const auto& row : counts) {
    for (int c : row) t += c;
  }
  return t;
}

int ConfusionMatrix::correct() const {
  int t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

double ConfusionMatrix::accuracy() const {
  const int t = total();
  return t == 0 ? 0.0 : static_cast<double>(correct()) / t;
}

std::vector<int> ConfusionMatrix::row_sums() const {
  std::vector<int> out;
  for (const auto& row : counts) {
    int s = 0;
    for (int c : row) s += c;
    out.push_back(s);
  }
  return out;
}

double ConfusionMatrix::recall(int cls) const {
  const int n = row_sums().at(cls);
  return n == 0 ? -1.0 : static_cast<double>(counts[cls][cls]) / n;
}

int ConfusionMatrix::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

nlohmann::json ToJson(const ConfusionMatrix& m) {
  return {{"labels", m.labels}, {"counts", m.counts}};
}

namespace {

ConfusionMatrix ConfusionFromJson(const nlohmann::json& j) {
  ConfusionMatrix m;
  m.labels = j.at("labels").get<std::vector<std::string>>();
  m.counts = j.at("counts").get<std::vector<std::vector<int>>>();
  return m;
}

}  // namespace

int ArgMaxLowest(std::span<const double> probs) {
  int best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = static_cast<int>(i);
  }
  return best;
}

Evaluation Evaluate(const ModelParams& model,
                    std::span<const FeatureSeries* const> records) {
  Evaluation ev;
  ev.confusion = ConfusionMatrix::Zeros(model.labels);
  std::vector<int> truth;
  for (const FeatureSeries* fs : records) {
    if (SchemaHash(fs->scenario) != model.schema_hash ||
        fs->steps.cols != model.shape.input_dim ||
        static_cast<int>(fs->overall.size()) != model.shape.overall_dim) {
      throw SchemaError("record '" + fs->trace_id + "' (" +
                        ToString(fs->scenario) +
                        ") does not match the model's feature schema");
    }
    const int t = ev.confusion.index_of(fs->label);
    if (t < 0) {
      throw ArgumentError("record '" + fs->trace_id + "' has unknown label '" +
                          fs->label + "'");
    }
    truth.push_back(t);
  }
  ev.predictions.resize(records.size());
  for (std::size_t start = 0; start < records.size(); start += kEvalChunk) {
    const std::size_t end = std::min(records.size(), start + kEvalChunk);
    const auto items = records.subspan(start, end - start);
    const std::vector<int> labels(truth.begin() + start, truth.begin() + end);
    const Batch batch = MakeBatch(items, labels);
    const Eigen::MatrixXd probs = PredictBatch(model, batch);
    for (Eigen::Index b = 0; b < probs.cols(); ++b) {
      const Eigen::VectorXd col = probs.col(b);
      ev.predictions[start + b] =
          ArgMaxLowest(std::span<const double>(col.data(), col.size()));
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    ev.confusion.Add(truth[i], ev.predictions[i]);
  }
  return ev;
}

Evaluation Evaluate(const ModelParams& model,
                    std::span<const FeatureSeries> records) {
  std::vector<const FeatureSeries*> ptrs;
  for (const auto& r : records) ptrs.push_back(&r);
  return Evaluate(model, std::span<const FeatureSeries* const>(ptrs));
}

Recognition Recognize(const ModelSet& models, const Trace& trace,
                      Scenario scenario, const FeatureContext& ctx,
                      std::optional<int> round) {
  if (models.empty()) throw ArgumentError("recognition needs a model set");
  if (trace.end_round < 1 || trace.rounds.empty()) {
    throw ArgumentError("recognition needs at least one complete round");
  }
  Recognition out;
  out.round = round.value_or(trace.ended_by ? trace.deadline : trace.end_round);
  const ModelParams& model = models.Select(out.round);
  if (model.schema_hash != SchemaHash(scenario)) {
    throw SchemaError("model set was trained on a different feature schema than " +
                      ToString(scenario));
  }
  out.model_round = model.checkpoint_round;
  const FeatureSeries fs = Featurize(trace, scenario, ctx, model.checkpoint_round);
  const Eigen::VectorXd p = ModelForward(model, fs.steps, fs.overall);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    out.ranked.push_back({model.labels[i], p[i]});
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const Posterior& a, const Posterior& b) {
                     return a.probability > b.probability;
                   });
  return out;
}

nlohmann::json ToJson(const ExperimentConfig& c) {
  const TrainConfig& t = c.train;
  return {{"campaign", ToJson(c.campaign)},
          {"train",
           {{"learning_rate", t.adam.learning_rate},
            {"beta1", t.adam.beta1},
            {"beta2", t.adam.beta2},
            {"epsilon", t.adam.epsilon},
            {"batch_size", t.batch_size},
            {"epochs", t.epochs},
            {"hidden", t.hidden},
            {"early_stop", t.early_stop},
            {"patience", t.patience},
            {"min_delta", t.min_delta},
            {"clip_norm", t.clip_norm},
            {"seed", t.seed}}},
          {"train_ratio", c.train_ratio},
          {"split_seed", c.split_seed}};
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.campaign = CampaignConfigFromJson(j.at("campaign"));
    if (j.contains("train")) {
      const auto& jt = j.at("train");
      TrainConfig& t = c.train;
      t.adam.learning_rate = jt.value("learning_rate", t.adam.learning_rate);
      t.adam.beta1 = jt.value("beta1", t.adam.beta1);
      t.adam.beta2 = jt.value("beta2", t.adam.beta2);
      t.adam.epsilon = jt.value("epsilon", t.adam.epsilon);
      t.batch_size = jt.value("batch_size", t.batch_size);
      t.epochs = jt.value("epochs", t.epochs);
      t.hidden = jt.value("hidden", t.hidden);
      t.early_stop = jt.value("early_stop", t.early_stop);
      t.patience = jt.value("patience", t.patience);
      t.min_delta = jt.value("min_delta", t.min_delta);
      t.clip_norm = jt.value("clip_norm", t.clip_norm);
      t.seed = jt.value("seed", t.seed);
    }
    c.train_ratio = j.value("train_ratio", c.train_ratio);
    c.split_seed = j.value("split_seed", c.split_seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  const auto& a = c.train.adam;
  if (!(a.learning_rate > 0 && a.epsilon > 0 && a.beta1 > 0 && a.beta1 < 1 &&
        a.beta2 > 0 && a.beta2 < 1) ||
      c.train.batch_size < 1 || c.train.epochs < 1 || c.train.hidden < 1) {
    throw ConfigError("training settings out of range");
  }
  if (!(c.train_ratio > 0 && c.train_ratio < 1)) {
    throw ConfigError("train_ratio must lie in (0, 1)");
  }
  return c;
}

ExperimentConfig StandardExperiment(Scenario scenario, std::uint64_t seed) {
  ExperimentConfig c;
  CampaignConfig& k = c.campaign;
  k.domains = PresetSpecs();
  k.scenario = scenario;
  k.seed = seed;
  switch (scenario) {
    case Scenario::kP1:
      k.bands = {{0.1, 0.2}, {0.2, 0.3}, {0.3, std::numbers::sqrt2}};
      break;
    case Scenario::kP2:
      k.bands = {{0.18, 0.195}, {0.195, 0.205}, {0.205, 0.22}};
      break;
    case Scenario::kP3:
      k.bands = {{0.17, 0.20}, {0.05, 0.12}, {0.12, 0.17}, {0.20, 0.27},
                 {0.27, 0.40}};
      k.checkpoints = {60, 100};
      break;
    case Scenario::kP4:
      k.bands = {{0.17, 0.19}};
      k.checkpoints = {60, 100};
      break;
  }
  c.train.seed = seed;
  c.split_seed = seed;
  return c;
}

const ReportCell* ExperimentReport::Find(const std::string& train_group,
                                         const std::string& test_group,
                                         int checkpoint) const {
  for (const auto& c : cells) {
    if (c.train_group == train_group && c.test_group == test_group &&
        c.checkpoint == checkpoint) {
      return &c;
    }
  }
  return nullptr;
}

nlohmann::json ToJson(const ExperimentReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"train_group", c.train_group},
                     {"test_group", c.test_group},
                     {"checkpoint", c.checkpoint},
                     {"n", c.n()},
                     {"accuracy", c.accuracy()},
                     {"confusion", ToJson(c.confusion)}});
  }
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : r.models) {
    models.push_back({{"group", m.group},
                      {"checkpoint", m.checkpoint},
                      {"train_records", m.train_records},
                      {"first_loss", m.first_loss},
                      {"final_loss", m.final_loss},
                      {"final_train_accuracy", m.final_train_accuracy}});
  }
  return {{"scenario", ToString(r.scenario)},
          {"labels", r.labels},
          {"checkpoints", r.checkpoints},
          {"random_baseline", r.random_baseline},
          {"cells", std::move(cells)},
          {"models", std::move(models)},
          {"leakage", r.leakage},
          {"metadata", r.metadata},
          {"config_hash", r.config_hash},
          {"manifest_hash", r.manifest_hash},
          {"schema_hash", r.schema_hash},
          {"content_hash", r.content_hash}};
}

ExperimentReport ExperimentReportFromJson(const nlohmann::json& j) {
  ExperimentReport r;
  try {
    r.scenario = ScenarioFromString(j.at("scenario").get<std::string>());
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.checkpoints = j.at("checkpoints").get<std::vector<int>>();
    r.random_baseline = j.at("random_baseline").get<double>();
    for (const auto& jc : j.at("cells")) {
      r.cells.push_back({jc.at("train_group").get<std::string>(),
                         jc.at("test_group").get<std::string>(),
                         jc.at("checkpoint").get<int>(),
                         ConfusionFromJson(jc.at("confusion"))});
    }
    for (const auto& jm : j.at("models")) {
      r.models.push_back({jm.at("group").get<std::string>(),
                          jm.at("checkpoint").get<int>(),
                          jm.at("train_records").get<int>(),
                          jm.at("first_loss").get<double>(),
                          jm.at("final_loss").get<double>(),
                          jm.at("final_train_accuracy").get<double>()});
    }
    r.leakage = j.at("leakage").get<std::map<std::string, int>>();
    r.metadata = j.at("metadata");
    r.config_hash = j.at("config_hash").get<std::string>();
    r.manifest_hash = j.at("manifest_hash").get<std::string>();
    r.schema_hash = j.at("schema_hash").get<std::string>();
    r.content_hash = j.at("content_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string ReportText(const ExperimentReport& r) {
  std::ostringstream out;
  out << "scenario " << ToString(r.scenario) << "  classes " << r.labels.size()
      << "  config " << r.config_hash << "\n\n";
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& c : r.cells) {
    std::pair<std::string, std::string> key{c.train_group, c.test_group};
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
  }
  std::size_t w1 = 5, w2 = 4;
  for (const auto& [a, b] : rows) {
    w1 = std::max(w1, a.size());
    w2 = std::max(w2, b.size());
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-*s  %-*s", static_cast<int>(w1), "train",
                static_cast<int>(w2), "test");
  out << buf;
  for (int n : r.checkpoints) {
    std::snprintf(buf, sizeof(buf), "  %8s", ("N=" + std::to_string(n)).c_str());
    out << buf;
  }
  out << "\n";
  for (const auto& [a, b] : rows) {
    out << a << std::string(w1 - a.size(), ' ') << "  " << b
        << std::string(w2 - b.size(), ' ');
    for (int n : r.checkpoints) {
      const ReportCell* c = r.Find(a, b, n);
      if (c == nullptr) {
        std::snprintf(buf, sizeof(buf), "  %8s", "-");
      } else {
        std::snprintf(buf, sizeof(buf), "  %7.1f%%", 100.0 * c->accuracy());
      }
      out << buf;
    }
    out << "\n";
  }
  out << "random" << std::string(w1 + w2 - 4, ' ');
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "  %7.1f%%", 100.0 * r.random_baseline);
    out << buf;
  }
  out << "\n";

  bool any_leak = false;
  for (const auto& [group, n] : r.leakage) any_leak = any_leak || n > 0;
  out << "\nshared train/test traces: " << (any_leak ? "PRESENT" : "none") << "\n";

  for (const auto& c : r.cells) {
    if (c.train_group != "all" || c.test_group != "all") continue;
    out << "\nconfusion at N=" << c.checkpoint << " (rows true, cols predicted)\n";
    for (std::size_t i = 0; i < c.confusion.labels.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%2zu %-22s", i,
                    c.confusion.labels[i].c_str());
      out << buf;
      for (int v : c.confusion.counts[i]) {
        std::snprintf(buf, sizeof(buf), " %4d", v);
        out << buf;
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string ReportCsv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "train_group,test_group,checkpoint,n,accuracy\n";
  char buf[32];
  for (const auto& c : r.cells) {
    std::snprintf(buf, sizeof(buf), "%.6f", c.accuracy());
    out << c.train_group << ',' << c.test_group << ',' << c.checkpoint << ','
        << c.n() << ',' << buf << '\n';
  }
  return out.str();
}

nlohmann::json TimingsJson(const ExperimentReport& r) { return r.timings; }

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const Dataset& dataset) {
  const auto start = Clock::now();
  const CampaignConfig& camp = dataset.config;
  const Scenario scenario = camp.scenario;
  const auto& records = dataset.traces;
  const std::vector<std::string> labels = dataset.Labels();
  for (int n : camp.checkpoints) {
    if (!dataset.features.contains(n)) {
      throw ConfigError("dataset has no features at checkpoint " +
                        std::to_string(n));
    }
  }

  std::map<std::string, std::vector<std::size_t>> by_domain;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_domain[records[i].domain].push_back(i);
  }

  // Splits keyed by training group, in canonical domain order.
  struct GroupSplit {
    std::string group;
    Split split;
    // Named test subsets.
    std::vector<std::pair<std::string, std::vector<std::size_t>>> tests;
  };
  std::vector<GroupSplit> groups;
  ExperimentReport report;

  auto subset_of = [&](const std::vector<std::size_t>& idx, auto pred) {
    std::vector<std::size_t> out;
    for (std::size_t i : idx) {
      if (pred(records[i])) out.push_back(i);
    }
    return out;
  };

  for (const auto& setup : dataset.setups) {
    const std::string& d = setup.spec.name;
    const auto& idx = by_domain[d];
    switch (scenario) {
      case Scenario::kP1:
      case Scenario::kP2: {
        GroupSplit g{d, StratifiedSplit(records, idx, config.train_ratio,
                                        DeriveSeed(config.split_seed,
                                                   {HashTag(d)})),
                     {}};
        g.tests.push_back({d, g.split.test});
        if (scenario == Scenario::kP1 && setup.opponents.size() > 1) {
          for (std::size_t p = 0; p < setup.opponents.size(); ++p) {
            g.tests.push_back(
                {ProfileGroup(d, static_cast<int>(p)),
                 subset_of(g.split.test, [&](const TraceRecord& r) {
                   return r.profile == static_cast<int>(p);
                 })});
          }
        }
        groups.push_back(std::move(g));
        break;
      }
      case Scenario::kP3: {
        if (setup.opponents.size() < 2) {
          throw ConfigError("P3 needs at least two opponent profiles on '" + d +
                            "'");
        }
        std::vector<std::string> test_values;
        for (std::size_t p = 1; p < setup.opponents.size(); ++p) {
          test_values.push_back(ProfileGroup(d, static_cast<int>(p)));
        }
        GroupSplit g{ProfileGroup(d, 0),
                     SplitByTag(records, idx, "profile", ProfileGroup(d, 0),
                                test_values),
                     {}};
        for (const auto& v : test_values) {
          g.tests.push_back({v, subset_of(g.split.test, [&](const TraceRecord& r) {
                               return r.Tag("profile") == v;
                             })});
        }
        groups.push_back(std::move(g));
        break;
      }
      case Scenario::kP4: {
        if (dataset.setups.size() < 2) {
          throw ConfigError("P4 needs at least two domains");
        }
        std::vector<std::string> others;
        for (const auto& s : dataset.setups) {
          if (s.spec.name != d) others.push_back(s.spec.name);
        }
        std::vector<std::size_t> all(records.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        GroupSplit g{d, SplitByTag(records, all, "domain", d, others), {}};
        for (const auto& v : others) {
          g.tests.push_back({v, subset_of(g.split.test, [&](const TraceRecord& r) {
                               return r.domain == v;
                             })});
        }
        groups.push_back(std::move(g));
        break;
      }
    }
  }

  for (const auto& g : groups) {
    report.leakage[g.group] =
        static_cast<int>(SplitOverlap(records, g.split).size());
  }

  std::vector<Job> jobs;
  for (const auto& g : groups) {
    for (int n : camp.checkpoints) jobs.push_back({g.group, n, g.split.train});
  }

  std::vector<TrainResult> trained(jobs.size());
  const auto train_start = Clock::now();
  ParallelFor(jobs.size(), [&](std::size_t j) {
    const auto& feats = dataset.features.at(jobs[j].checkpoint);
    std::vector<FeatureSeries> train;
    train.reserve(jobs[j].train.size());
    for (std::size_t i : jobs[j].train) train.push_back(feats[i]);
    TrainConfig tc = config.train;
    tc.seed = DeriveSeed(config.train.seed,
                         {HashTag(jobs[j].group),
                          static_cast<std::uint64_t>(jobs[j].checkpoint)});
    trained[j] = Train(train, labels, tc);
  });
  report.timings["train_seconds"] = SecondsSince(train_start);

  ExperimentResult result;
  std::map<int, ConfusionMatrix> pooled;
  for (int n : camp.checkpoints) pooled[n] = ConfusionMatrix::Zeros(labels);
  std::map<std::string, ConfusionMatrix> pooled_profile;

  std::size_t j = 0;
  for (const auto& g : groups) {
    for (int n : camp.checkpoints) {
      const TrainResult& tr = trained[j++];
      const auto& feats = dataset.features.at(n);
      for (const auto& [test_group, idx] : g.tests) {
        std::vector<const FeatureSeries*> ptrs;
        for (std::size_t i : idx) ptrs.push_back(&feats[i]);
        Evaluation ev = Evaluate(tr.params, ptrs);
        report.cells.push_back({g.group, test_group, n, ev.confusion});
        if (scenario == Scenario::kP1 && test_group != g.group) {
          // Per-profile breakdown pooled over domains.
          const std::string key =
              std::to_string(n) + test_group.substr(test_group.rfind('/'));
          auto it = pooled_profile.find(key);
          if (it == pooled_profile.end()) {
            pooled_profile.emplace(key, ev.confusion);
          } else {
            it->second += ev.confusion;
          }
        }
      }
      // Pool the group's whole test side once.
      std::vector<const FeatureSeries*> ptrs;
      for (std::size_t i : g.split.test) ptrs.push_back(&feats[i]);
      pooled[n] += Evaluate(tr.params, ptrs).confusion;

      const auto& h = tr.history;
      report.models.push_back(
          {g.group, n, static_cast<int>(g.split.train.size()),
           h.empty() ? 0.0 : h.front().mean_loss,
           h.empty() ? 0.0 : h.back().mean_loss,
           h.empty() ? 0.0 : h.back().train_accuracy});
      result.histories[g.group][n] = h;
      result.models[g.group].Add(tr.params);
    }
  }
  for (int n : camp.checkpoints) {
    report.cells.push_back({"all", "all", n, pooled[n]});
  }
  for (const auto& [key, m] : pooled_profile) {
    const auto slash = key.find('/');
    report.cells.push_back(
        {"all", "all" + key.substr(slash), std::stoi(key.substr(0, slash)), m});
  }

  report.scenario = scenario;
  report.labels = labels;
  report.checkpoints = camp.checkpoints;
  report.random_baseline = 1.0 / static_cast<double>(labels.size());
  report.config_hash = HashHex(Fnv1a(ToJson(config).dump()));
  report.manifest_hash = dataset.ManifestHash();
  report.schema_hash = SchemaHash(scenario);
  report.content_hash = dataset.ContentHash();
  nlohmann::json domains = nlohmann::json::array();
  for (const auto& s : dataset.setups) {
    nlohmann::json profiles = nlohmann::json::array();
    for (std::size_t p = 0; p < s.opponents.size(); ++p) {
      const auto& o = s.opponents[p];
      const auto& band = camp.bands.at(o.band);
      profiles.push_back({{"tag", ProfileGroup(s.spec.name, static_cast<int>(p))},
                          {"opposition", o.opposition},
                          {"band", {band.lo, band.hi}}});
    }
    domains.push_back({{"name", s.spec.name},
                       {"issues", s.domain.num_issues()},
                       {"outcomes", s.domain.OutcomeSpaceSize()},
                       {"profiles", std::move(profiles)}});
  }
  report.metadata = {{"domains", std::move(domains)},
                     {"sessions_per_cell", camp.sessions_per_cell},
                     {"deadline", camp.deadline},
                     {"train_ratio", config.train_ratio},
                     {"records", records.size()}};
  report.timings["total_seconds"] = SecondsSince(start);
  result.report = std::move(report);
  return result;
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  const auto start = Clock::now();
  Dataset ds = BuildDataset(config.campaign);
  const double build = SecondsSince(start);
  ExperimentResult r = RunExperiment(config, ds);
  r.report.timings["dataset_seconds"] = build;
  r.report.timings["total_seconds"] += build;
  return r;
}

}  // namespace negrec
