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

#include "negrec/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

#include "negrec/errors.hpp"
#include "negrec/random.hpp"

namespace negrec {

namespace {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowArray = Eigen::Array<double, 1, Eigen::Dynamic>;

constexpr char kCheckpointFormat[] = "negrec-lstm-v1";

MatrixXd Sigmoid(const MatrixXd& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

// Column-wise softmax.
MatrixXd Softmax(const MatrixXd& logits) {
  MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    const double top = logits.col(b).maxCoeff();
    p.col(b) = (logits.col(b).array() - top).exp().matrix();
    p.col(b) /= p.col(b).sum();
  }
  return p;
}

// Activations kept for the backward pass. Hidden and cell states are stored
// for t = -1 .. T-1, block 0 being the zero initial state.
struct Cache {
  int steps = 0;
  int size = 0;
  MatrixXd gates;   // 4H x (T * B), activated
  MatrixXd cells;   // H x ((T + 1) * B)
  MatrixXd hidden;  // H x ((T + 1) * B)
  MatrixXd hybrid;  // (H + F_o) x B
  MatrixXd logits;  // C x B
  MatrixXd probs;   // C x B
};

void CheckBatchShape(const ModelParams& params, const Batch& batch) {
  const ModelShape& s = params.shape;
  if (batch.inputs.rows() != s.input_dim) {
    throw StructuralError("batch has " + std::to_string(batch.inputs.rows()) +
                          " per-round features, model expects " +
                          std::to_string(s.input_dim));
  }
  if (batch.overall.rows() != s.overall_dim) {
    throw StructuralError("batch has " + std::to_string(batch.overall.rows()) +
                          " overall features, model expects " +
                          std::to_string(s.overall_dim));
  }
}

void Forward(const ModelParams& params, const Batch& batch, Cache& cache) {
  CheckBatchShape(params, batch);
  const int h = params.shape.hidden;
  const int t_len = batch.steps;
  const int b = batch.size;
  cache.steps = t_len;
  cache.size = b;

  cache.gates.resize(4 * h, static_cast<Eigen::Index>(t_len) * b);
  cache.cells.setZero(h, static_cast<Eigen::Index>(t_len + 1) * b);
  cache.hidden.setZero(h, static_cast<Eigen::Index>(t_len + 1) * b);

  // Input contributions for every round in one product.
  cache.gates.noalias() = params.input_weights * batch.inputs;
  MatrixXd z(4 * h, b);
  for (int t = 0; t < t_len; ++t) {
    const auto h_prev = cache.hidden.middleCols(static_cast<Eigen::Index>(t) * b, b);
    const auto c_prev = cache.cells.middleCols(static_cast<Eigen::Index>(t) * b, b);
    auto gates = cache.gates.middleCols(static_cast<Eigen::Index>(t) * b, b);
    z = gates;
    z.noalias() += params.recurrent_weights * h_prev;
    z.colwise() += params.gate_bias;

    gates.topRows(2 * h) = Sigmoid(z.topRows(2 * h));
    gates.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
    gates.bottomRows(h) = Sigmoid(z.bottomRows(h));

    const ArrayXXd c_new = gates.middleRows(h, h).array() * c_prev.array() +
                           gates.topRows(h).array() *
                               gates.middleRows(2 * h, h).array();
    const ArrayXXd h_new = gates.bottomRows(h).array() * c_new.tanh();

    // Rounds past an example's valid prefix leave its state untouched.
    const RowArray keep = batch.mask.row(t).array();
    const RowArray hold = 1.0 - keep;
    cache.cells.middleCols(static_cast<Eigen::Index>(t + 1) * b, b) =
        (c_new.rowwise() * keep + c_prev.array().rowwise() * hold).matrix();
    cache.hidden.middleCols(static_cast<Eigen::Index>(t + 1) * b, b) =
        (h_new.rowwise() * keep + h_prev.array().rowwise() * hold).matrix();
  }

  cache.hybrid.resize(params.shape.dense_input(), b);
  cache.hybrid.topRows(h) =
      cache.hidden.middleCols(static_cast<Eigen::Index>(t_len) * b, b);
  cache.hybrid.bottomRows(params.shape.overall_dim) = batch.overall;
  cache.logits.noalias() = params.dense_weights * cache.hybrid;
  cache.logits.colwise() += params.dense_bias;
  cache.probs = Softmax(cache.logits);
}

double ExampleLoss(const MatrixXd& logits, Eigen::Index b, int label) {
  const double top = logits.col(b).maxCoeff();
  const double lse =
      top + std::log((logits.col(b).array() - top).exp().sum());
  return lse - logits(label, b);
}

int ArgMax(const MatrixXd& probs, Eigen::Index b) {
  // First maximum wins, so ties resolve to the lowest class index.
  int best = 0;
  for (Eigen::Index c = 1; c < probs.rows(); ++c) {
    if (probs(c, b) > probs(best, b)) best = static_cast<int>(c);
  }
  return best;
}

void FillUniform(MatrixXd& m, double bound, Rng& rng) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      m(r, c) = rng.Uniform(-bound, bound);
    }
  }
}

nlohmann::json RowMajor(const MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  }
  return flat;
}

MatrixXd FromRowMajor(const nlohmann::json& j, Eigen::Index rows,
                      Eigen::Index cols, const char* name) {
  const auto flat = j.get<std::vector<double>>();
  if (flat.size() != static_cast<std::size_t>(rows * cols)) {
    throw StructuralError(std::string("checkpoint array '") + name +
                          "' has the wrong length");
  }
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[r * cols + c];
  }
  return m;
}

}  // namespace

ModelParams ModelParams::Zeros(const ModelShape& shape) {
  if (shape.input_dim < 1 || shape.hidden < 1 || shape.overall_dim < 0 ||
      shape.classes < 2) {
    throw ArgumentError("invalid model shape");
  }
  ModelParams p;
  p.shape = shape;
  const int h = shape.hidden;
  p.input_weights = MatrixXd::Zero(4 * h, shape.input_dim);
  p.recurrent_weights = MatrixXd::Zero(4 * h, h);
  p.gate_bias = VectorXd::Zero(4 * h);
  p.dense_weights = MatrixXd::Zero(shape.classes, shape.dense_input());
  p.dense_bias = VectorXd::Zero(shape.classes);
  return p;
}

ModelParams ModelParams::Initialize(const ModelShape& shape,
                                    std::uint64_t seed) {
  ModelParams p = Zeros(shape);
  Rng rng(seed);
  const int h = shape.hidden;
  const double gate_bound = 1.0 / std::sqrt(double(shape.input_dim + h));
  FillUniform(p.input_weights, gate_bound, rng);
  FillUniform(p.recurrent_weights, gate_bound, rng);
  for (int k = 0; k < 4 * h; ++k) p.gate_bias(k) = rng.Uniform(-gate_bound, gate_bound);
  p.gate_bias.segment(h, h).setOnes();
  const double dense_bound = 1.0 / std::sqrt(double(shape.dense_input()));
  FillUniform(p.dense_weights, dense_bound, rng);
  for (int k = 0; k < shape.classes; ++k) {
    p.dense_bias(k) = rng.Uniform(-dense_bound, dense_bound);
  }
  return p;
}

std::size_t ModelParams::num_parameters() const {
  return input_weights.size() + recurrent_weights.size() + gate_bias.size() +
         dense_weights.size() + dense_bias.size();
}

std::vector<std::span<double>> ModelParams::blocks() {
  return {{input_weights.data(), static_cast<std::size_t>(input_weights.size())},
          {recurrent_weights.data(),
           static_cast<std::size_t>(recurrent_weights.size())},
          {gate_bias.data(), static_cast<std::size_t>(gate_bias.size())},
          {dense_weights.data(), static_cast<std::size_t>(dense_weights.size())},
          {dense_bias.data(), static_cast<std::size_t>(dense_bias.size())}};
}

std::vector<std::span<const double>> ModelParams::blocks() const {
  auto* self = const_cast<ModelParams*>(this);
  std::vector<std::span<const double>> out;
  for (auto s : self->blocks()) out.emplace_back(s.data(), s.size());
  return out;
}

bool ModelParams::AllFinite() const {
  return input_weights.allFinite() && recurrent_weights.allFinite() &&
         gate_bias.allFinite() && dense_weights.allFinite() &&
         dense_bias.allFinite();
}

bool ModelParams::operator==(const ModelParams& o) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return shape == o.shape && same(input_weights, o.input_weights) &&
         same(recurrent_weights, o.recurrent_weights) &&
         same(gate_bias, o.gate_bias) && same(dense_weights, o.dense_weights) &&
         same(dense_bias, o.dense_bias) &&
         checkpoint_round == o.checkpoint_round && scenario == o.scenario &&
         labels == o.labels && schema_hash == o.schema_hash;
}

Batch MakeBatch(std::span<const FeatureSeries* const> items,
                std::span<const int> labels) {
  if (items.empty()) throw ArgumentError("empty batch");
  if (labels.size() != items.size()) {
    throw ArgumentError("one label per batch item required");
  }
  const int f = items.front()->steps.cols;
  const int fo = static_cast<int>(items.front()->overall.size());
  int longest = 0;
  for (const FeatureSeries* fs : items) {
    if (fs->steps.cols != f || static_cast<int>(fs->overall.size()) != fo) {
      throw StructuralError("batch items have different feature widths");
    }
    const int valid = fs->valid_rounds();
    if (valid == 0) throw ArgumentError("example '" + fs->trace_id +
                                        "' has no valid round");
    for (int r = 0; r < valid; ++r) {
      if (!fs->steps.mask[r]) {
        throw StructuralError("mask of '" + fs->trace_id +
                              "' is not a valid prefix");
      }
    }
    longest = std::max(longest, valid);
  }

  Batch batch;
  batch.size = static_cast<int>(items.size());
  batch.steps = longest;
  batch.inputs.setZero(f, static_cast<Eigen::Index>(longest) * batch.size);
  batch.mask.setZero(longest, batch.size);
  batch.overall.resize(fo, batch.size);
  batch.labels.assign(labels.begin(), labels.end());
  for (int b = 0; b < batch.size; ++b) {
    const FeatureSeries& fs = *items[b];
    const int valid = fs.valid_rounds();
    for (int t = 0; t < valid; ++t) {
      const double* row = &fs.steps.values[static_cast<std::size_t>(t) * f];
      batch.inputs.col(static_cast<Eigen::Index>(t) * batch.size + b) =
          Eigen::Map<const VectorXd>(row, f);
      batch.mask(t, b) = 1.0;
    }
    batch.overall.col(b) = Eigen::Map<const VectorXd>(fs.overall.data(), fo);
  }
  return batch;
}

namespace {

Batch SingleExample(const StepMatrix& steps, std::span<const double> overall) {
  FeatureSeries fs;
  fs.steps = steps;
  fs.overall.assign(overall.begin(), overall.end());
  const FeatureSeries* item = &fs;
  const int label = -1;
  return MakeBatch({&item, 1}, {&label, 1});
}

}  // namespace

VectorXd LstmForward(const ModelParams& params, const StepMatrix& steps) {
  if (steps.cols != params.shape.input_dim) {
    throw StructuralError("step width " + std::to_string(steps.cols) +
                          " does not match model input " +
                          std::to_string(params.shape.input_dim));
  }
  std::vector<double> overall(params.shape.overall_dim, 0.0);
  Cache cache;
  Forward(params, SingleExample(steps, overall), cache);
  return cache.hybrid.col(0).head(params.shape.hidden);
}

VectorXd ModelForward(const ModelParams& params, const StepMatrix& steps,
                      std::span<const double> overall) {
  if (static_cast<int>(overall.size()) != params.shape.overall_dim) {
    throw StructuralError("overall width " + std::to_string(overall.size()) +
                          " does not match model " +
                          std::to_string(params.shape.overall_dim));
  }
  if (steps.cols != params.shape.input_dim) {
    throw StructuralError("step width does not match model input");
  }
  Cache cache;
  Forward(params, SingleExample(steps, overall), cache);
  return cache.probs.col(0);
}

MatrixXd PredictBatch(const ModelParams& params, const Batch& batch) {
  Cache cache;
  Forward(params, batch, cache);
  return cache.probs;
}

double Loss(const ModelParams& params, const Batch& batch) {
  Cache cache;
  Forward(params, batch, cache);
  double total = 0.0;
  for (int b = 0; b < batch.size; ++b) {
    total += ExampleLoss(cache.logits, b, batch.labels[b]);
  }
  return total / batch.size;
}

LossResult LossAndGradient(const ModelParams& params, const Batch& batch,
                           ModelParams& grad) {
  for (int label : batch.labels) {
    if (label < 0 || label >= params.shape.classes) {
      throw ArgumentError("batch label outside the model's classes");
    }
  }
  Cache cache;
  Forward(params, batch, cache);
  const int h = params.shape.hidden;
  const int t_len = cache.steps;
  const int b = cache.size;
  const double scale = 1.0 / b;

  if (!(grad.shape == params.shape)) grad = ModelParams::Zeros(params.shape);

  LossResult result;
  MatrixXd d_logits = cache.probs;
  for (int k = 0; k < b; ++k) {
    result.mean_loss += ExampleLoss(cache.logits, k, batch.labels[k]);
    if (ArgMax(cache.probs, k) == batch.labels[k]) ++result.correct;
    d_logits(batch.labels[k], k) -= 1.0;
  }
  result.mean_loss *= scale;
  d_logits *= scale;

  grad.dense_weights.noalias() = d_logits * cache.hybrid.transpose();
  grad.dense_bias = d_logits.rowwise().sum();
  MatrixXd dh = params.dense_weights.leftCols(h).transpose() * d_logits;
  MatrixXd dc = MatrixXd::Zero(h, b);

  MatrixXd d_gates(4 * h, static_cast<Eigen::Index>(t_len) * b);
  MatrixXd dz(4 * h, b);
  for (int t = t_len - 1; t >= 0; --t) {
    const Eigen::Index col = static_cast<Eigen::Index>(t) * b;
    const auto gates = cache.gates.middleCols(col, b);
    const ArrayXXd gi = gates.topRows(h).array();
    const ArrayXXd gf = gates.middleRows(h, h).array();
    const ArrayXXd gg = gates.middleRows(2 * h, h).array();
    const ArrayXXd go = gates.bottomRows(h).array();
    const ArrayXXd c_prev = cache.cells.middleCols(col, b).array();
    // Recompute the unmasked cell so padded columns see the same algebra.
    const ArrayXXd tanh_c = (gf * c_prev + gi * gg).tanh();

    const RowArray keep = batch.mask.row(t).array();
    const RowArray hold = 1.0 - keep;

    const ArrayXXd dc_total = dc.array() + dh.array() * go * (1.0 - tanh_c.square());
    dz.topRows(h) = ((dc_total * gg) * gi * (1.0 - gi)).rowwise() * keep;
    dz.middleRows(h, h) = ((dc_total * c_prev) * gf * (1.0 - gf)).rowwise() * keep;
    dz.middleRows(2 * h, h) = ((dc_total * gi) * (1.0 - gg.square())).rowwise() * keep;
    dz.bottomRows(h) = ((dh.array() * tanh_c) * go * (1.0 - go)).rowwise() * keep;
    d_gates.middleCols(col, b) = dz;

    const MatrixXd dh_held = (dh.array().rowwise() * hold).matrix();
    dh.noalias() = params.recurrent_weights.transpose() * dz;
    dh += dh_held;
    dc = ((dc_total * gf).rowwise() * keep + dc.array().rowwise() * hold).matrix();
  }

  grad.input_weights.noalias() = d_gates * batch.inputs.transpose();
  grad.recurrent_weights.noalias() =
      d_gates * cache.hidden.leftCols(static_cast<Eigen::Index>(t_len) * b).transpose();
  grad.gate_bias = d_gates.rowwise().sum();
  return result;
}

Adam::Adam(const AdamConfig& config, std::size_t num_parameters)
    : config_(config), m_(num_parameters, 0.0), v_(num_parameters, 0.0) {
  if (!(config.learning_rate > 0.0) || !(config.epsilon > 0.0)) {
    throw ArgumentError("Adam needs a positive learning rate and epsilon");
  }
  if (!(config.beta1 > 0.0 && config.beta1 < 1.0) ||
      !(config.beta2 > 0.0 && config.beta2 < 1.0)) {
    throw ArgumentError("Adam betas must lie in (0, 1)");
  }
}

void Adam::Step(std::span<const std::span<double>> params,
                std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size()) {
    throw StructuralError("Adam: parameter and gradient blocks differ");
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  std::size_t k = 0;
  for (std::size_t blk = 0; blk < params.size(); ++blk) {
    if (params[blk].size() != grads[blk].size()) {
      throw StructuralError("Adam: block sizes differ");
    }
    for (std::size_t i = 0; i < params[blk].size(); ++i, ++k) {
      if (k >= m_.size()) throw StructuralError("Adam: too many parameters");
      const double g = grads[blk][i];
      m_[k] = b1 * m_[k] + (1.0 - b1) * g;
      v_[k] = b2 * v_[k] + (1.0 - b2) * g * g;
      const double m_hat = m_[k] / correction1;
      const double v_hat = v_[k] / correction2;
      params[blk][i] -=
          config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
  if (k != m_.size()) throw StructuralError("Adam: too few parameters");
}

void Adam::Step(std::span<double> params, std::span<const double> grads) {
  const std::span<double> p[] = {params};
  const std::span<const double> g[] = {grads};
  Step(p, g);
}

TrainResult Train(std::span<const FeatureSeries> records,
                  std::span<const std::string> labels,
                  const TrainConfig& config) {
  if (records.empty()) throw ArgumentError("empty training set");
  if (labels.size() < 2) throw ArgumentError("need at least two classes");
  if (config.batch_size < 1 || config.epochs < 1 || config.hidden < 1) {
    throw ArgumentError("batch size, epochs and hidden size must be positive");
  }
  std::map<std::string, int> index;
  for (std::size_t k = 0; k < labels.size(); ++k) index[labels[k]] = static_cast<int>(k);

  std::vector<int> targets(records.size());
  const FeatureSeries& first = records.front();
  for (std::size_t k = 0; k < records.size(); ++k) {
    const FeatureSeries& fs = records[k];
    auto it = index.find(fs.label);
    if (it == index.end()) {
      throw ArgumentError("training label '" + fs.label + "' not in label set");
    }
    targets[k] = it->second;
    if (fs.steps.cols != first.steps.cols ||
        fs.overall.size() != first.overall.size() ||
        fs.checkpoint != first.checkpoint || fs.scenario != first.scenario) {
      throw StructuralError("training records have mixed shapes");
    }
  }

  ModelShape shape;
  shape.input_dim = first.steps.cols;
  shape.hidden = config.hidden;
  shape.overall_dim = static_cast<int>(first.overall.size());
  shape.classes = static_cast<int>(labels.size());

  TrainResult result;
  ModelParams& params = result.params;
  params = ModelParams::Initialize(shape,
                                   DeriveSeed(config.seed, {HashTag("init")}));
  params.checkpoint_round = first.checkpoint;
  params.scenario = first.scenario;
  params.labels.assign(labels.begin(), labels.end());
  params.schema_hash = SchemaHash(first.scenario);

  ModelParams grad = ModelParams::Zeros(shape);
  Adam adam(config.adam, params.num_parameters());
  Rng rng(DeriveSeed(config.seed, {HashTag("shuffle")}));
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);

  int stale = 0;
  std::int64_t batch_index = 0;
  std::vector<const FeatureSeries*> items;
  std::vector<int> batch_labels;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(order);
    double loss_sum = 0.0;
    int correct = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size, ++batch_index) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      items.clear();
      batch_labels.clear();
      for (std::size_t k = start; k < stop; ++k) {
        items.push_back(&records[order[k]]);
        batch_labels.push_back(targets[order[k]]);
      }
      const Batch batch = MakeBatch(items, batch_labels);
      const LossResult lr = LossAndGradient(params, batch, grad);
      if (!std::isfinite(lr.mean_loss)) {
        throw NumericalError("non-finite loss at batch " +
                             std::to_string(batch_index) + " (epoch " +
                             std::to_string(epoch) + ")");
      }
      if (config.clip_norm > 0.0) {
        double sq = 0.0;
        for (auto blk : grad.blocks()) {
          for (double g : blk) sq += g * g;
        }
        const double norm = std::sqrt(sq);
        if (norm > config.clip_norm) {
          const double f = config.clip_norm / norm;
          for (auto blk : grad.blocks()) {
            for (double& g : blk) g *= f;
          }
        }
      }
      const auto p_blocks = params.blocks();
      const auto g_blocks = std::as_const(grad).blocks();
      adam.Step(p_blocks, g_blocks);
      loss_sum += lr.mean_loss * batch.size;
      correct += lr.correct;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_sum / static_cast<double>(records.size());
    stats.train_accuracy = static_cast<double>(correct) / records.size();
    if (config.early_stop && !result.history.empty()) {
      const double gain = result.history.back().mean_loss - stats.mean_loss;
      stale = gain < config.min_delta ? stale + 1 : 0;
    }
    result.history.push_back(stats);
    if (config.early_stop && stale >= config.patience) break;
  }
  if (!params.AllFinite()) {
    throw NumericalError("training produced non-finite parameters");
  }
  return result;
}

std::string LossHistoryCsv(std::span<const EpochStats> history) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,mean_loss,train_acc\n";
  for (const auto& e : history) {
    out << e.epoch << ',' << e.mean_loss << ',' << e.train_accuracy << '\n';
  }
  return out.str();
}

double GradCheck(const ModelParams& params, const Batch& batch, double eps) {
  ModelParams grad = ModelParams::Zeros(params.shape);
  LossAndGradient(params, batch, grad);
  ModelParams probe = params;
  auto p_blocks = probe.blocks();
  const auto g_blocks = std::as_const(grad).blocks();
  double worst = 0.0;
  for (std::size_t blk = 0; blk < p_blocks.size(); ++blk) {
    for (std::size_t i = 0; i < p_blocks[blk].size(); ++i) {
      double& w = p_blocks[blk][i];
      const double saved = w;
      w = saved + eps;
      const double up = Loss(probe, batch);
      w = saved - eps;
      const double down = Loss(probe, batch);
      w = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = g_blocks[blk][i];
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), 1e-12});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

nlohmann::json CheckpointJson(const ModelParams& p) {
  nlohmann::json j;
  j["format"] = kCheckpointFormat;
  j["scenario"] = ToString(p.scenario);
  j["checkpoint_round"] = p.checkpoint_round;
  j["input_dim"] = p.shape.input_dim;
  j["hidden"] = p.shape.hidden;
  j["overall_dim"] = p.shape.overall_dim;
  j["classes"] = p.shape.classes;
  j["labels"] = p.labels;
  j["schema_hash"] = p.schema_hash;
  j["gate_order"] = {"input", "forget", "candidate", "output"};
  j["input_weights"] = RowMajor(p.input_weights);
  j["recurrent_weights"] = RowMajor(p.recurrent_weights);
  j["gate_bias"] = RowMajor(p.gate_bias);
  j["dense_weights"] = RowMajor(p.dense_weights);
  j["dense_bias"] = RowMajor(p.dense_bias);
  return j;
}

ModelParams ParamsFromCheckpoint(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) {
      throw SchemaError("unknown checkpoint format");
    }
    ModelShape shape;
    shape.input_dim = j.at("input_dim").get<int>();
    shape.hidden = j.at("hidden").get<int>();
    shape.overall_dim = j.at("overall_dim").get<int>();
    shape.classes = j.at("classes").get<int>();
    ModelParams p = ModelParams::Zeros(shape);
    const int h = shape.hidden;
    p.input_weights = FromRowMajor(j.at("input_weights"), 4 * h,
                                   shape.input_dim, "input_weights");
    p.recurrent_weights = FromRowMajor(j.at("recurrent_weights"), 4 * h, h,
                                       "recurrent_weights");
    p.gate_bias = FromRowMajor(j.at("gate_bias"), 4 * h, 1, "gate_bias");
    p.dense_weights = FromRowMajor(j.at("dense_weights"), shape.classes,
                                   shape.dense_input(), "dense_weights");
    p.dense_bias = FromRowMajor(j.at("dense_bias"), shape.classes, 1,
                                "dense_bias");
    p.checkpoint_round = j.at("checkpoint_round").get<int>();
    p.scenario = ScenarioFromString(j.at("scenario").get<std::string>());
    p.labels = j.at("labels").get<std::vector<std::string>>();
    p.schema_hash = j.at("schema_hash").get<std::string>();
    if (static_cast<int>(p.labels.size()) != shape.classes) {
      throw StructuralError("checkpoint label count differs from classes");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const ModelParams& params,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write checkpoint " + path.string());
  out << CheckpointJson(params).dump() << '\n';
}

ModelParams LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read checkpoint " + path.string());
  return ParamsFromCheckpoint(nlohmann::json::parse(in));
}

ModelParams LoadCheckpoint(const std::filesystem::path& path,
                           Scenario scenario) {
  ModelParams p = LoadCheckpoint(path);
  const std::string expected = SchemaHash(scenario);
  if (p.schema_hash != expected || p.shape.input_dim != TimestepWidth(scenario) ||
      p.shape.overall_dim != OverallWidth(scenario)) {
    throw SchemaError("checkpoint " + path.string() + " was trained on schema " +
                      p.schema_hash + " (" + ToString(p.scenario) +
                      "), expected " + expected + " for " + ToString(scenario));
  }
  return p;
}

void ModelSet::Add(ModelParams params) {
  const int n = params.checkpoint_round;
  if (n < 1) throw ArgumentError("model has no checkpoint round");
  if (!models_.empty()) {
    const ModelParams& ref = models_.begin()->second;
    if (ref.schema_hash != params.schema_hash || ref.labels != params.labels) {
      throw SchemaError("model set members disagree on schema or labels");
    }
  }
  models_.insert_or_assign(n, std::move(params));
}

std::vector<int> ModelSet::rounds() const {
  std::vector<int> out;
  for (const auto& [n, _] : models_) out.push_back(n);
  return out;
}

const ModelParams& ModelSet::Select(int round) const {
  if (models_.empty()) throw ArgumentError("model set is empty");
  auto it = models_.upper_bound(round);
  if (it == models_.begin()) return it->second;
  return std::prev(it)->second;
}

void ModelSet::Save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [n, p] : models_) {
    SaveCheckpoint(p, dir / ("model_N" + std::to_string(n) + ".json"));
  }
}

ModelSet ModelSet::Load(const std::filesystem::path& dir) {
  static const std::regex kName(R"(model_N(\d+)\.json)");
  if (!std::filesystem::is_directory(dir)) {
    throw ArgumentError("no model set directory " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, kName)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ModelSet set;
  for (const auto& f : files) set.Add(LoadCheckpoint(f));
  if (set.empty()) throw ArgumentError("no checkpoints in " + dir.string());
  return set;
}

}  // namespace negrec
