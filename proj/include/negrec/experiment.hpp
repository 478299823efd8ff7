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

// Evaluation, recognition and the P1-P4 scenario runners.

#ifndef NEGREC_EXPERIMENT_HPP_
#define NEGREC_EXPERIMENT_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "negrec/dataset.hpp"
#include "negrec/features.hpp"
#include "negrec/nn.hpp"
#include "negrec/protocol.hpp"

namespace negrec {

// counts[true][predicted].
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> counts;

  static ConfusionMatrix Zeros(std::vector<std::string> labels);
  void Add(int truth, int predicted) { ++counts[truth][predicted]; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);

  int total() const;
  int correct() const;
  // 0 when empty.
  double accuracy() const;
  std::vector<int> row_sums() const;
  // -1 when the class has no test records.
  double recall(int cls) const;
  int index_of(const std::string& label) const;

  bool operator==(const ConfusionMatrix&) const = default;
};

nlohmann::json ToJson(const ConfusionMatrix& m);

// Index of the largest entry; ties go to the lowest index.
int ArgMaxLowest(std::span<const double> probs);

struct Evaluation {
  ConfusionMatrix confusion;
  std::vector<int> predictions;  // aligned with the input records
};

// Throws SchemaError when a record's schema or shape differs from the
// model's and ArgumentError on a label the model does not know.
Evaluation Evaluate(const ModelParams& model,
                    std::span<const FeatureSeries* const> records);
Evaluation Evaluate(const ModelParams& model,
                    std::span<const FeatureSeries> records);

struct Posterior {
  std::string label;
  double probability = 0.0;
};

struct Recognition {
  int round = 0;        // round used for model selection
  int model_round = 0;  // N of the selected model
  std::vector<Posterior> ranked;  // descending probability
};

// Featurizes `trace` at the selected model's N and ranks the posterior.
// The selection round defaults to the trace's last round, or the deadline
// for a finished negotiation. When no model has N <= round the smallest N
// is used on the padded trace.
Recognition Recognize(const ModelSet& models, const Trace& trace,
                      Scenario scenario, const FeatureContext& ctx,
                      std::optional<int> round = std::nullopt);

struct ExperimentConfig {
  CampaignConfig campaign;
  TrainConfig train;
  double train_ratio = 0.8;
  std::uint64_t split_seed = 0;
};

nlohmann::json ToJson(const ExperimentConfig& c);
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);

// The standard campaign for each scenario over the four preset domains.
ExperimentConfig StandardExperiment(Scenario scenario, std::uint64_t seed);

struct ReportCell {
  std::string train_group;
  std::string test_group;
  int checkpoint = 0;
  ConfusionMatrix confusion;

  int n() const { return confusion.total(); }
  double accuracy() const { return confusion.accuracy(); }
};

struct ModelSummary {
  std::string group;
  int checkpoint = 0;
  int train_records = 0;
  double first_loss = 0.0;
  double final_loss = 0.0;
  double final_train_accuracy = 0.0;
};

struct ExperimentReport {
  Scenario scenario = Scenario::kP1;
  std::vector<std::string> labels;
  std::vector<int> checkpoints;
  double random_baseline = 0.1;
  std::vector<ReportCell> cells;
  std::vector<ModelSummary> models;
  // Shared trace ids per split; every entry should be zero.
  std::map<std::string, int> leakage;
  nlohmann::json metadata;  // domains, profiles, oppositions
  std::string config_hash;
  std::string manifest_hash;
  std::string schema_hash;
  std::string content_hash;
  // Wall-clock seconds; kept out of ToJson so reports stay reproducible.
  std::map<std::string, double> timings;

  // First cell matching the groups and checkpoint, or nullptr.
  const ReportCell* Find(const std::string& train_group,
                         const std::string& test_group, int checkpoint) const;
};

nlohmann::json ToJson(const ExperimentReport& r);
ExperimentReport ExperimentReportFromJson(const nlohmann::json& j);
std::string ReportText(const ExperimentReport& r);
// train_group,test_group,checkpoint,n,accuracy
std::string ReportCsv(const ExperimentReport& r);
nlohmann::json TimingsJson(const ExperimentReport& r);

struct ExperimentResult {
  ExperimentReport report;
  // Keyed by training group.
  std::map<std::string, ModelSet> models;
  std::map<std::string, std::map<int, std::vector<EpochStats>>> histories;
};

// Trains one model per (training group, checkpoint) and evaluates it.
//   P1, P2: one group per domain, stratified split; P1 also reports each
//           opponent profile of the test side separately.
//   P3:     per domain, train on profile p0 and test on every other profile.
//   P4:     train on each domain and test on every other domain.
// Cells with train_group "all" pool every test record of the run.
// Throws ConfigError when a tag split has nothing to train or test on.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const Dataset& dataset);
// Builds the dataset first.
ExperimentResult RunExperiment(const ExperimentConfig& config);

}  // namespace negrec

#endif  // NEGREC_EXPERIMENT_HPP_
