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
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "negrec/errors.hpp"
#include "negrec/nn.hpp"
#include "negrec/random.hpp"

namespace negrec {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ModelParams RandomModel(int f, int h, int fo, int c, std::uint64_t seed,
                        double scale = 0.5) {
  ModelShape shape{f, h, fo, c};
  ModelParams p = ModelParams::Zeros(shape);
  Rng rng(seed);
  for (auto blk : p.blocks()) {
    for (double& w : blk) w = rng.Uniform(-scale, scale);
  }
  p.labels.resize(c);
  for (int k = 0; k < c; ++k) p.labels[k] = "c" + std::to_string(k);
  return p;
}

FeatureSeries RandomSeries(int rows, int valid, int f, int fo, Rng& rng,
                           std::string label = "c0") {
  FeatureSeries fs;
  fs.trace_id = "t";
  fs.label = std::move(label);
  fs.scenario = Scenario::kP2;
  fs.checkpoint = rows;
  fs.steps.rows = rows;
  fs.steps.cols = f;
  fs.steps.values.assign(static_cast<std::size_t>(rows) * f, 0.0);
  fs.steps.mask.assign(rows, 0);
  for (int r = 0; r < valid; ++r) {
    fs.steps.mask[r] = 1;
    for (int c = 0; c < f; ++c) fs.steps.values[r * f + c] = rng.Uniform(-1, 1);
  }
  fs.overall.resize(fo);
  for (double& v : fs.overall) v = rng.Uniform(-1, 1);
  return fs;
}

double Sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scalar, loop-based recurrence with gates in the order i, f, g, o.
std::vector<double> LstmOracle(const ModelParams& p, const StepMatrix& s) {
  const int h = p.shape.hidden;
  const int f = p.shape.input_dim;
  std::vector<double> hs(h, 0.0), cs(h, 0.0);
  for (int t = 0; t < s.rows && s.mask[t]; ++t) {
    std::vector<double> z(4 * h);
    for (int r = 0; r < 4 * h; ++r) {
      double acc = p.gate_bias(r);
      for (int k = 0; k < f; ++k) acc += p.input_weights(r, k) * s.at(t, k);
      for (int k = 0; k < h; ++k) acc += p.recurrent_weights(r, k) * hs[k];
      z[r] = acc;
    }
    for (int j = 0; j < h; ++j) {
      const double ig = Sigm(z[j]);
      const double fg = Sigm(z[h + j]);
      const double gg = std::tanh(z[2 * h + j]);
      const double og = Sigm(z[3 * h + j]);
      cs[j] = fg * cs[j] + ig * gg;
      hs[j] = og * std::tanh(cs[j]);
    }
  }
  return hs;
}

TEST_CASE("zero parameters give a zero hidden state and uniform output") {
  const ModelParams p = ModelParams::Zeros({22, 64, 23, 10});
  Rng rng(0);
  const FeatureSeries fs = RandomSeries(20, 20, 22, 23, rng);
  CHECK(LstmForward(p, fs.steps).cwiseAbs().maxCoeff() == 0.0);
  const VectorXd probs = ModelForward(p, fs.steps, fs.overall);
  for (int k = 0; k < 10; ++k) CHECK(probs(k) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("dense input widths") {
  CHECK(ModelShape{TimestepWidth(Scenario::kP1), 64, OverallWidth(Scenario::kP1), 10}
            .dense_input() == 87);
  CHECK(ModelShape{TimestepWidth(Scenario::kP2), 64, OverallWidth(Scenario::kP2), 10}
            .dense_input() == 83);
  const auto p = ModelParams::Initialize({22, 64, 23, 10}, 0);
  CHECK(p.dense_weights.cols() == 87);
  CHECK(p.input_weights.rows() == 256);
}

TEST_CASE("lstm matches the scalar oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ModelParams p = RandomModel(3, 4, 2, 3, seed);
    Rng rng(seed + 100);
    const FeatureSeries fs = RandomSeries(5, 5, 3, 2, rng);
    const VectorXd got = LstmForward(p, fs.steps);
    const auto want = LstmOracle(p, fs.steps);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(got(j) - want[j]) < 1e-12);
  }
}

TEST_CASE("masked steps are invisible") {
  const ModelParams p = RandomModel(3, 4, 2, 3, 9);
  Rng rng(1);
  FeatureSeries a = RandomSeries(6, 1, 3, 2, rng);
  FeatureSeries b = a;
  for (int r = 1; r < 6; ++r) {
    for (int c = 0; c < 3; ++c) b.steps.values[r * 3 + c] = 42.0 + r + c;
  }
  CHECK(LstmForward(p, a.steps) == LstmForward(p, b.steps));

  // Mask length L equals the L-row input.
  FeatureSeries full = RandomSeries(8, 5, 3, 2, rng);
  FeatureSeries cut = full;
  cut.steps.rows = 5;
  cut.steps.values.resize(15);
  cut.steps.mask.resize(5);
  CHECK((LstmForward(p, full.steps) - LstmForward(p, cut.steps)).norm() == 0.0);
}

TEST_CASE("shape mismatches are structural errors") {
  const ModelParams p = RandomModel(3, 4, 2, 3, 0);
  Rng rng(0);
  const FeatureSeries fs = RandomSeries(4, 4, 5, 2, rng);
  CHECK_THROWS_AS(LstmForward(p, fs.steps), StructuralError);
  const FeatureSeries ok = RandomSeries(4, 4, 3, 2, rng);
  const std::vector<double> wrong(3, 0.0);
  CHECK_THROWS_AS(ModelForward(p, ok.steps, wrong), StructuralError);
}

TEST_CASE("softmax output is a probability vector") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ModelParams p = RandomModel(6, 8, 4, 10, seed, 2.0);
    Rng rng(seed);
    const FeatureSeries fs = RandomSeries(10, 7, 6, 4, rng);
    const VectorXd probs = ModelForward(p, fs.steps, fs.overall);
    CHECK(std::abs(probs.sum() - 1.0) < 1e-9);
    CHECK(probs.minCoeff() > 0.0);
    CHECK(probs.maxCoeff() < 1.0);
  }
}

TEST_CASE("batches validate masks") {
  Rng rng(0);
  FeatureSeries a = RandomSeries(5, 3, 3, 2, rng);
  FeatureSeries hole = a;
  hole.steps.mask = {1, 0, 1, 0, 0};
  FeatureSeries none = a;
  none.steps.mask.assign(5, 0);
  FeatureSeries wide = RandomSeries(5, 3, 4, 2, rng);
  const int label = 0;
  const std::vector<int> two = {0, 0};
  const FeatureSeries* h = &hole;
  const FeatureSeries* n = &none;
  std::vector<const FeatureSeries*> mixed = {&a, &wide};
  CHECK_THROWS_AS(MakeBatch({&h, 1}, {&label, 1}), StructuralError);
  CHECK_THROWS_AS(MakeBatch({&n, 1}, {&label, 1}), ArgumentError);
  CHECK_THROWS_AS(MakeBatch(mixed, two), StructuralError);
  std::vector<const FeatureSeries*> ok = {&a, &a};
  const Batch b = MakeBatch(ok, two);
  CHECK(b.steps == 3);
  CHECK(b.inputs.cols() == 6);
}

TEST_CASE("gradient check on small random models") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ModelParams p = RandomModel(3, 5, 2, 4, seed);
    Rng rng(seed + 7);
    std::vector<FeatureSeries> items;
    std::vector<int> labels;
    for (int b = 0; b < 3; ++b) {
      items.push_back(RandomSeries(6, 3 + b, 3, 2, rng));
      labels.push_back(static_cast<int>(rng.UniformInt(4)));
    }
    std::vector<const FeatureSeries*> ptrs;
    for (const auto& it : items) ptrs.push_back(&it);
    const Batch batch = MakeBatch(ptrs, labels);
    const double e1 = GradCheck(p, batch, 1e-5);
    CHECK(e1 < 1e-4);
    const double e2 = GradCheck(p, batch, 2e-5);
    CHECK(e2 < 10.0 * std::max(e1, 1e-9));
  }
}

TEST_CASE("dense gradient has the closed softmax form") {
  const ModelParams p = RandomModel(3, 4, 2, 3, 5);
  Rng rng(2);
  FeatureSeries fs = RandomSeries(1, 1, 3, 2, rng);
  std::fill(fs.steps.values.begin(), fs.steps.values.end(), 0.0);
  const int label = 1;
  const FeatureSeries* item = &fs;
  const Batch batch = MakeBatch({&item, 1}, {&label, 1});
  ModelParams grad = ModelParams::Zeros(p.shape);
  LossAndGradient(p, batch, grad);
  VectorXd input(6);
  input << LstmForward(p, fs.steps), Eigen::Map<const VectorXd>(fs.overall.data(), 2);
  VectorXd delta = ModelForward(p, fs.steps, fs.overall);
  delta(label) -= 1.0;
  const MatrixXd want = delta * input.transpose();
  CHECK((grad.dense_weights - want).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((grad.dense_bias - delta).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("one Adam step on a scalar") {
  Adam adam(AdamConfig{}, 1);
  std::vector<double> w = {1.0};
  const std::vector<double> g = {1.0};
  adam.Step(std::span<double>(w), std::span<const double>(g));
  // m_hat = 1, v_hat = 1, so w = 1 - lr / (1 + eps).
  CHECK(std::abs(w[0] - (1.0 - 0.001 / (1.0 + 1e-8))) < 1e-12);
  CHECK(adam.steps_taken() == 1);
}

std::vector<FeatureSeries> ToySet(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureSeries> out;
  for (int k = 0; k < n; ++k) {
    FeatureSeries fs = RandomSeries(4, 4, 3, 2, rng, k % 2 ? "b" : "a");
    std::fill(fs.steps.values.begin(), fs.steps.values.end(), 0.0);
    const double sign = k % 2 ? 1.0 : -1.0;
    fs.overall = {sign * (0.5 + 0.5 * rng.Uniform()), rng.Uniform(-1, 1)};
    out.push_back(std::move(fs));
  }
  return out;
}

TEST_CASE("training separates a linearly separable toy set") {
  const auto data = ToySet(200, 3);
  const std::vector<std::string> labels = {"a", "b"};
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.seed = 1;
  const TrainResult r = Train(data, labels, cfg);
  CHECK(r.history.size() == 80);
  CHECK(r.history.back().train_accuracy >= 0.99);
  CHECK(r.history[9].mean_loss < r.history[0].mean_loss);
  for (const auto& e : r.history) CHECK(std::isfinite(e.mean_loss));
  CHECK(r.params.labels == labels);
  CHECK(r.params.checkpoint_round == 4);
}

TEST_CASE("training is deterministic in the seed") {
  const auto data = ToySet(70, 4);
  const std::vector<std::string> labels = {"a", "b"};
  TrainConfig cfg;
  cfg.hidden = 6;
  cfg.epochs = 5;
  cfg.seed = 9;
  const TrainResult a = Train(data, labels, cfg);
  const TrainResult b = Train(data, labels, cfg);
  CHECK(LossHistoryCsv(a.history) == LossHistoryCsv(b.history));
  CHECK(a.params == b.params);
  cfg.seed = 10;
  CHECK_FALSE(Train(data, labels, cfg).params == a.params);
}

TEST_CASE("early stopping and clipping") {
  const auto data = ToySet(40, 5);
  const std::vector<std::string> labels = {"a", "b"};
  TrainConfig cfg;
  cfg.hidden = 4;
  cfg.epochs = 500;
  cfg.early_stop = true;
  cfg.min_delta = 1.0;  // never improves enough
  const TrainResult r = Train(data, labels, cfg);
  CHECK(r.history.size() == 6);
  cfg.early_stop = false;
  cfg.epochs = 3;
  cfg.clip_norm = 1e-3;
  CHECK(Train(data, labels, cfg).history.size() == 3);
}

TEST_CASE("training errors") {
  const std::vector<std::string> labels = {"a", "b"};
  TrainConfig cfg;
  CHECK_THROWS_AS(Train(std::vector<FeatureSeries>{}, labels, cfg), ArgumentError);
  auto data = ToySet(10, 6);
  data[3].label = "zzz";
  CHECK_THROWS_AS(Train(data, labels, cfg), ArgumentError);
  data = ToySet(10, 6);
  data[4].overall[0] = std::numeric_limits<double>::infinity();
  cfg.epochs = 1;
  try {
    Train(data, labels, cfg);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("batch 0") != std::string::npos);
  }
}

TEST_CASE("checkpoints round trip and guard the schema") {
  const auto dir = std::filesystem::temp_directory_path() / "negrec_nn_ckpt";
  std::filesystem::create_directories(dir);
  ModelParams p = ModelParams::Initialize({22, 8, 23, 10}, 3);
  p.scenario = Scenario::kP1;
  p.schema_hash = SchemaHash(Scenario::kP1);
  p.checkpoint_round = 20;
  for (int k = 0; k < 10; ++k) p.labels.push_back("s" + std::to_string(k));
  SaveCheckpoint(p, dir / "p1.json");
  CHECK(LoadCheckpoint(dir / "p1.json") == p);
  CHECK(LoadCheckpoint(dir / "p1.json", Scenario::kP1) == p);
  CHECK_THROWS_AS(LoadCheckpoint(dir / "p1.json", Scenario::kP2), SchemaError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("model sets select the largest round not past the query") {
  ModelSet set;
  CHECK_THROWS_AS(set.Select(20), ArgumentError);
  for (int n : {20, 40, 60, 80, 100}) {
    ModelParams p = ModelParams::Initialize({18, 4, 19, 10}, n);
    p.scenario = Scenario::kP2;
    p.schema_hash = SchemaHash(Scenario::kP2);
    p.checkpoint_round = n;
    for (int k = 0; k < 10; ++k) p.labels.push_back("s" + std::to_string(k));
    set.Add(std::move(p));
  }
  CHECK(set.Select(20).checkpoint_round == 20);
  CHECK(set.Select(39).checkpoint_round == 20);
  CHECK(set.Select(40).checkpoint_round == 40);
  CHECK(set.Select(100).checkpoint_round == 100);
  CHECK(set.Select(250).checkpoint_round == 100);
  CHECK(set.Select(5).checkpoint_round == 20);

  const auto dir = std::filesystem::temp_directory_path() / "negrec_nn_set";
  std::filesystem::remove_all(dir);
  set.Save(dir);
  const ModelSet back = ModelSet::Load(dir);
  CHECK(back.rounds() == std::vector<int>{20, 40, 60, 80, 100});
  CHECK(back.at(60) == set.at(60));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace negrec
