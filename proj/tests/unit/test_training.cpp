// Copyright 2026 The MetaphorNet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "metaphornet/checkpoint.hpp"
#include "metaphornet/embedding_store.hpp"
#include "metaphornet/error.hpp"
#include "metaphornet/training.hpp"
#include "support.hpp"

namespace metaphornet {
namespace {

using testing::TempDir;
using testing::toy_dataset;

double bce(double score, double label) {
  Graph g;
  return ad::binary_cross_entropy(g.constant(Tensor::matrix({{score}})), label).item();
}

TEST(Bce, AnalyticValues) {
  EXPECT_NEAR(bce(0.5, 0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(bce(0.5, 1.0), 0.693147, 1e-6);
  EXPECT_NEAR(bce(0.99, 1.0), 0.01005, 1e-5);
}

TEST(Bce, FiniteAndNonNegativeEverywhere) {
  for (double s : {0.0, 1e-12, 0.2, 0.5, 0.8, 1.0 - 1e-12, 1.0}) {
    for (double y : {0.0, 1.0}) {
      const double l = bce(s, y);
      EXPECT_TRUE(std::isfinite(l)) << s;
      EXPECT_GE(l, 0.0) << s;
    }
  }
}

TEST(Bce, ScoreGradientMatchesFiniteDifference) {
  for (double s : {0.05, 0.3, 0.5, 0.77, 0.95}) {
    for (double y : {0.0, 1.0}) {
      Tensor score = Tensor::matrix({{s}});
      score.set_requires_grad(true);
      Graph g;
      g.backward(ad::binary_cross_entropy(g.parameter(score), y));
      const double h = 1e-6;
      const double numeric = (bce(s + h, y) - bce(s - h, y)) / (2 * h);
      const double analytic = score.grad()[0];
      EXPECT_LT(std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric)),
                1e-8)
          << s << ' ' << y;
    }
  }
}

TEST(TrainConfig, Validation) {
  EXPECT_NO_THROW(TrainConfig{}.validate());
  TrainConfig c;
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = TrainConfig{};
  c.beta2 = 1.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = TrainConfig{};
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Adam, FirstStepIsSignScaled) {
  Tensor p = Tensor::vector({1.0, -2.0, 0.5, 3.0}, true);
  const std::vector<double> g{0.3, -7.0, 1e-3, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) p.grad()[i] = g[i];
  std::vector<Tensor*> params{&p};
  OptimizerState state = make_optimizer_state(params);
  TrainConfig c;
  c.learning_rate = 0.01;
  adam_step(params, state, c);
  EXPECT_EQ(state.t, 1);
  const std::vector<double> before{1.0, -2.0, 0.5, 3.0};
  for (std::size_t i = 0; i < 3; ++i) {
    const double expected = -c.learning_rate * g[i] / (std::abs(g[i]) + c.epsilon);
    EXPECT_NEAR(p[i] - before[i], expected, 1e-12);
    EXPECT_NEAR(std::abs(p[i] - before[i]), c.learning_rate, 1e-7);
  }
  EXPECT_EQ(p[3], 3.0);
}

TEST(Adam, GradientScaleKeepsFirstStepSigns) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double scale = std::exp(rng.uniform(-5.0, 5.0));
    Tensor a(Shape{6}, true), b(Shape{6}, true);
    for (std::size_t i = 0; i < 6; ++i) {
      a.grad()[i] = rng.uniform(-1.0, 1.0);
      b.grad()[i] = scale * a.grad()[i];
    }
    std::vector<Tensor*> pa{&a}, pb{&b};
    OptimizerState sa = make_optimizer_state(pa), sb = make_optimizer_state(pb);
    adam_step(pa, sa, TrainConfig{});
    adam_step(pb, sb, TrainConfig{});
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(std::signbit(a[i]), std::signbit(b[i]));
  }
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Tensor p = Tensor::vector({0.25, -4.0}, true);
  std::vector<Tensor*> params{&p};
  OptimizerState state = make_optimizer_state(params);
  for (int i = 0; i < 100; ++i) adam_step(params, state, TrainConfig{});
  EXPECT_EQ(p[0], 0.25);
  EXPECT_EQ(p[1], -4.0);
}

TEST(Adam, QuadraticMatchesScalarSimulation) {
  Tensor theta = Tensor::scalar(1.0, true);
  std::vector<Tensor*> params{&theta};
  OptimizerState state = make_optimizer_state(params);
  TrainConfig c;
  c.learning_rate = 0.1;

  // Reference recurrence written out by hand.
  double x = 1.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 100; ++t) {
    Graph g;
    const Var p = g.parameter(theta);
    theta.zero_grad();
    g.backward(ad::sum(ad::mul(p, p)));
    adam_step(params, state, c);

    const double grad = 2.0 * x;
    m = 0.9 * m + 0.1 * grad;
    v = 0.999 * v + 0.001 * grad * grad;
    const double mh = m / (1.0 - std::pow(0.9, t));
    const double vh = v / (1.0 - std::pow(0.999, t));
    x -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    ASSERT_NEAR(theta[0], x, 1e-12) << "step " << t;
  }
  EXPECT_LT(std::abs(theta[0]), 0.5);
}

TEST(Adam, ShapeMismatchRejected) {
  Tensor a(Shape{3}, true), b(Shape{2}, true);
  std::vector<Tensor*> pa{&a}, pb{&b};
  OptimizerState state = make_optimizer_state(pa);
  EXPECT_THROW(adam_step(pb, state, TrainConfig{}), ShapeError);
}

ModelConfig tiny_model(std::size_t dim) {
  ModelConfig c;
  c.embed_dim = dim;
  c.lstm_hidden = 4;
  c.heads = 2;
  c.context_dim = 8;
  return c;
}

TEST(Train, OverfitsSingleExample) {
  const Dataset d = toy_dataset(2, 3);
  const EmbeddingSet emb = synth_embeddings(d, 8, 1, 0.0);
  const ModelConfig mc = tiny_model(8);
  for (const Example& e : d.examples) {
    ModelParams p = init_params(mc);
    p.set_requires_grad(true);
    std::vector<Tensor*> params;
    for (auto& [name, t] : p.named()) params.push_back(t);
    OptimizerState state = make_optimizer_state(params);
    TrainConfig tc;
    tc.learning_rate = 0.01;
    const Tensor x = emb.find(e.id)->to_tensor();
    double loss = 0.0;
    for (int step = 0; step < 200; ++step) {
      p.zero_grad();
      Graph g;
      const Var l = ad::binary_cross_entropy(model_forward(g, bind(g, p), mc, x).score, e.label);
      loss = l.item();
      g.backward(l);
      adam_step(params, state, tc);
    }
    EXPECT_LT(loss, 0.01) << e.id;
  }
}

TEST(Train, LearnsSeparableSyntheticData) {
  const Dataset d = toy_dataset(64, 21);
  const EmbeddingSet emb = synth_embeddings(d, 32, 4, 1.0);
  ModelConfig mc;
  mc.embed_dim = 32;
  mc.lstm_hidden = 16;
  mc.heads = 4;
  mc.context_dim = 32;
  std::size_t callbacks = 0;
  const TrainResult r = train(d, emb, mc, TrainConfig{}, [&](const EpochRecord&) { ++callbacks; });
  ASSERT_EQ(r.history.epochs.size(), 50u);
  EXPECT_EQ(callbacks, 50u);
  EXPECT_GE(r.history.epochs.back().train_accuracy, 0.95);
  EXPECT_LT(r.history.epochs.back().mean_loss, r.history.epochs.front().mean_loss);
  EXPECT_EQ(r.history.epochs.front().epoch, 1u);
  EXPECT_FALSE(r.params.forward.w_input.requires_grad());
}

TEST(Train, LossFallsForSeveralSeeds) {
  const Dataset d = toy_dataset(32, 4);
  const EmbeddingSet emb = synth_embeddings(d, 8, 4, 1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ModelConfig mc = tiny_model(8);
    mc.seed = seed;
    TrainConfig tc;
    tc.seed = seed;
    tc.epochs = 50;
    const TrainResult r = train(d, emb, mc, tc);
    EXPECT_LT(r.history.epochs.back().mean_loss, r.history.epochs.front().mean_loss) << seed;
  }
}

TEST(Train, BitwiseDeterministic) {
  const Dataset d = toy_dataset(20, 6);
  const EmbeddingSet emb = synth_embeddings(d, 6, 2, 0.7);
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 4;
  tc.learning_rate = 1e-3;
  const TrainResult a = train(d, emb, tiny_model(6), tc);
  const TrainResult b = train(d, emb, tiny_model(6), tc);
  const auto na = a.params.named(), nb = b.params.named();
  for (std::size_t i = 0; i < na.size(); ++i) {
    EXPECT_TRUE(std::ranges::equal(na[i].second->data(), nb[i].second->data())) << na[i].first;
  }
  tc.seed = 1;
  const TrainResult c = train(d, emb, tiny_model(6), tc);
  EXPECT_FALSE(std::ranges::equal(na[0].second->data(), c.params.named()[0].second->data()));
}

TEST(Train, CoverageCheckedBeforeTraining) {
  const Dataset d = toy_dataset(10, 6);
  EmbeddingSet emb = synth_embeddings(d, 6, 2, 0.7);
  emb.vectors.erase("toy-3");
  bool ran = false;
  EXPECT_THROW(train(d, emb, tiny_model(6), TrainConfig{}, [&](const EpochRecord&) { ran = true; }),
               CoverageError);
  EXPECT_FALSE(ran);
  EXPECT_THROW(train(d, synth_embeddings(d, 7, 2, 0.7), tiny_model(6), TrainConfig{}),
               CoverageError);
}

TEST(Train, ClipNormBoundsUpdates) {
  const Dataset d = toy_dataset(12, 6);
  const EmbeddingSet emb = synth_embeddings(d, 6, 2, 1.0);
  TrainConfig tc;
  tc.epochs = 2;
  tc.clip_norm = 1e-3;
  const TrainResult r = train(d, emb, tiny_model(6), tc);
  EXPECT_TRUE(r.params.all_finite());
}

TEST(Predict, ThresholdIsInclusive) {
  EXPECT_EQ(decide(0.999), 1);
  EXPECT_EQ(decide(0.001), 0);
  EXPECT_EQ(decide(0.5), 1);
  EXPECT_EQ(decide(std::nextafter(0.5, 0.0)), 0);
}

TEST(Predict, MissingEmbeddingIsError) {
  const Dataset d = toy_dataset(3, 1);
  EmbeddingSet emb = synth_embeddings(d, 6, 2, 1.0);
  const ModelConfig mc = tiny_model(6);
  const ModelParams p = init_params(mc);
  const Prediction pr = predict(p, mc, emb, d.examples[0]);
  EXPECT_GT(pr.score, 0.0);
  EXPECT_LT(pr.score, 1.0);
  EXPECT_EQ(pr.label, decide(pr.score));
  emb.vectors.erase("toy-1");
  EXPECT_THROW(predict(p, mc, emb, d.examples[1]), CoverageError);
}

TEST(History, CsvLayout) {
  TrainHistory h;
  h.epochs.push_back({1, 0.5, 0.75, 0.125});
  h.epochs.push_back({2, 0.25, 1.0, 0.0625});
  std::ostringstream out;
  write_history_csv(h, out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "epoch,mean_loss,train_accuracy,seconds");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.substr(text.find('\n') + 1, 2), "1,");
}

TEST(Checkpoint, RoundTripAndValidation) {
  const ModelConfig mc = tiny_model(5);
  Checkpoint ck{mc, init_params(mc), 17, 50};
  Rng rng(1);
  for (auto& [name, t] : ck.params.named()) {
    for (double& x : t->data()) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  TempDir dir("ckpt");
  write_checkpoint(ck, dir / "m.ckpt");
  const Checkpoint back = read_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(back.config, mc);
  EXPECT_EQ(back.seed, 17u);
  EXPECT_EQ(back.epoch, 50u);
  const auto a = ck.params.named();
  const auto b = back.params.named();
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(std::ranges::equal(a[i].second->data(), b[i].second->data())) << a[i].first;
  }

  const std::string bytes = testing::read_file(dir / "m.ckpt");
  testing::write_file(dir / "cut.ckpt", bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_checkpoint(dir / "cut.ckpt"), CorruptionError);
  testing::write_file(dir / "junk.ckpt", "not a checkpoint\n");
  EXPECT_THROW(read_checkpoint(dir / "junk.ckpt"), FormatError);

  std::string mismatched = bytes;
  const std::size_t pos = mismatched.find("\"heads\":2");
  ASSERT_NE(pos, std::string::npos);
  mismatched[pos + 8] = '3';
  testing::write_file(dir / "mismatch.ckpt", mismatched);
  EXPECT_THROW(read_checkpoint(dir / "mismatch.ckpt"), Error);
}

}  // namespace
}  // namespace metaphornet
