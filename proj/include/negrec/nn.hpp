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

// Recurrent hybrid-feature classifier: an LSTM reads the per-round features,
// its last valid hidden state is concatenated with the overall features, and
// a dense layer plus softmax maps the result onto strategy labels. Trained
// with mean cross-entropy, backpropagation through time and Adam.

#ifndef NEGREC_NN_HPP_
#define NEGREC_NN_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "negrec/features.hpp"

namespace negrec {

inline constexpr int kDefaultHidden = 64;

struct ModelShape {
  int input_dim = 0;    // per-round feature width
  int hidden = kDefaultHidden;
  int overall_dim = 0;  // overall feature width
  int classes = 10;

  int dense_input() const { return hidden + overall_dim; }
  bool operator==(const ModelShape&) const = default;
};

// Gate blocks are stacked in the order input, forget, candidate, output.
struct ModelParams {
  ModelShape shape;
  Eigen::MatrixXd input_weights;      // 4H x F
  Eigen::MatrixXd recurrent_weights;  // 4H x H
  Eigen::VectorXd gate_bias;          // 4H
  Eigen::MatrixXd dense_weights;      // C x (H + F_o)
  Eigen::VectorXd dense_bias;         // C

  // Metadata carried into checkpoints.
  int checkpoint_round = 0;
  Scenario scenario = Scenario::kP1;
  std::vector<std::string> labels;
  std::string schema_hash;

  static ModelParams Zeros(const ModelShape& shape);
  // Uniform in +-1/sqrt(fan_in) with the forget-gate bias set to 1.
  static ModelParams Initialize(const ModelShape& shape, std::uint64_t seed);

  std::size_t num_parameters() const;
  // Mutable views of the five parameter blocks, in a fixed order.
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
  bool AllFinite() const;

  bool operator==(const ModelParams& o) const;
};

// A mini-batch in column layout. Column t * size + b of `inputs` holds round t
// of example b.
struct Batch {
  int size = 0;
  int steps = 0;
  Eigen::MatrixXd inputs;   // F x (steps * size)
  Eigen::MatrixXd mask;     // steps x size, entries 0 or 1
  Eigen::MatrixXd overall;  // F_o x size
  std::vector<int> labels;  // -1 when unknown
};

// Rows beyond the longest valid prefix in the batch are dropped. Throws
// StructuralError on inconsistent widths or a non-prefix mask and
// ArgumentError when an example has no valid round.
Batch MakeBatch(std::span<const FeatureSeries* const> items,
                std::span<const int> labels);

// Hidden state after the last mask-valid round, starting from h = c = 0.
Eigen::VectorXd LstmForward(const ModelParams& params, const StepMatrix& steps);

// Class probabilities for one example.
Eigen::VectorXd ModelForward(const ModelParams& params, const StepMatrix& steps,
                             std::span<const double> overall);

// Probabilities for a batch, one column per example.
Eigen::MatrixXd PredictBatch(const ModelParams& params, const Batch& batch);

struct LossResult {
  double mean_loss = 0.0;
  int correct = 0;
};

// Mean cross-entropy over the batch and its gradient with respect to every
// parameter, written into `grad` (same shape as `params`).
LossResult LossAndGradient(const ModelParams& params, const Batch& batch,
                           ModelParams& grad);
double Loss(const ModelParams& params, const Batch& batch);

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias-corrected moments over a flat parameter vector.
class Adam {
 public:
  Adam(const AdamConfig& config, std::size_t num_parameters);

  // One update. `params` and `grads` are walked block by block; their total
  // length must equal num_parameters.
  void Step(std::span<const std::span<double>> params,
            std::span<const std::span<const double>> grads);
  void Step(std::span<double> params, std::span<const double> grads);

  std::int64_t steps_taken() const { return t_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t t_ = 0;
};

struct TrainConfig {
  AdamConfig adam;
  int batch_size = 64;
  int epochs = 80;
  int hidden = kDefaultHidden;
  // Stop when the epoch loss improves by less than min_delta for `patience`
  // consecutive epochs. Off by default.
  bool early_stop = false;
  int patience = 5;
  double min_delta = 1e-5;
  // Global gradient-norm clipping; 0 disables.
  double clip_norm = 0.0;
  std::uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochStats> history;
};

// Trains on `records` whose labels index into `labels`. Throws
// ArgumentError on an empty set or unknown label, StructuralError on mixed
// shapes and NumericalError (with the batch index) on a non-finite loss.
TrainResult Train(std::span<const FeatureSeries> records,
                  std::span<const std::string> labels,
                  const TrainConfig& config);

// "epoch,mean_loss,train_acc" CSV.
std::string LossHistoryCsv(std::span<const EpochStats> history);

// Largest relative difference between the analytic gradient and central
// finite differences over every parameter; the denominator is
// max(|analytic|, |numeric|, 1e-12).
double GradCheck(const ModelParams& params, const Batch& batch, double eps);

nlohmann::json CheckpointJson(const ModelParams& params);
ModelParams ParamsFromCheckpoint(const nlohmann::json& j);
void SaveCheckpoint(const ModelParams& params,
                    const std::filesystem::path& path);
ModelParams LoadCheckpoint(const std::filesystem::path& path);
// Also throws SchemaError unless the checkpoint was trained on `scenario`'s
// feature schema.
ModelParams LoadCheckpoint(const std::filesystem::path& path,
                           Scenario scenario);

// Models trained at different checkpoint rounds, queried by current round.
class ModelSet {
 public:
  ModelSet() = default;

  void Add(ModelParams params);
  bool empty() const { return models_.empty(); }
  std::vector<int> rounds() const;
  const ModelParams& at(int round) const { return models_.at(round); }

  // The model with the largest N <= round; the smallest N when none
  // qualifies. Throws ArgumentError on an empty set.
  const ModelParams& Select(int round) const;

  // Files are named model_N<round>.json.
  void Save(const std::filesystem::path& dir) const;
  static ModelSet Load(const std::filesystem::path& dir);

 private:
  std::map<int, ModelParams> models_;
};

}  // namespace negrec

#endif  // NEGREC_NN_HPP_
