#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cdac/nn/adam.hpp"
#include "cdac/nn/ops.hpp"
#include "support/gradcheck.hpp"

using namespace cdac;
using nn::Mode;

TEST(Conv, PooledMapLengthAndIdentityFilter) {
  // Single filter, k=1, identity weight on a 1-dim embedding.
  nn::ConvBranchSpec spec{1, 1, 1};
  const double input[] = {1, -2, 3};
  const double w[] = {1}, b[] = {0};
  double pooled = 0;
  int arg = -1;
  nn::conv_pool_forward(input, 3, spec, w, b, &pooled, &arg);
  EXPECT_DOUBLE_EQ(pooled, 3.0);
  EXPECT_EQ(arg, 2);
}

TEST(Conv, PoolIgnoresPositionsPastLength) {
  // L=5, k=2: four valid positions; a large value in padding is never seen.
  nn::ConvBranchSpec spec{2, 1, 1};
  const double input[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.0, 0.0};
  const double w[] = {1, 1}, b[] = {0};
  double pooled = 0;
  int arg = -1;
  nn::conv_pool_forward(input, 5, spec, w, b, &pooled, &arg);
  EXPECT_EQ(arg, 3);
  EXPECT_NEAR(pooled, 0.9, 1e-12);
}

TEST(Conv, EmptyUtteranceIsZero) {
  nn::ConvBranchSpec spec{3, 2, 1};
  const double input[3] = {};
  const double w[6] = {1, 2, 3, 4, 5, 6}, b[2] = {1, 1};
  double pooled[2] = {9, 9};
  int arg[2];
  nn::conv_pool_forward(input, 0, spec, w, b, pooled, arg);
  EXPECT_EQ(pooled[0], 0.0);
  EXPECT_EQ(pooled[1], 0.0);
}

TEST(BatchNorm, TrainModeTwoElementColumn) {
  std::vector<double> x = {1, 3}, y(2), g = {1}, beta = {0}, rm = {0}, rv = {1};
  nn::batch_norm_forward<double>(x, 2, 1, g, beta, rm, rv, {}, Mode::train, y);
  // mean 2, biased variance 1: (x - 2) / sqrt(1 + 1e-5)
  const double expect = 1.0 / std::sqrt(1.0 + 1e-5);
  EXPECT_NEAR(y[0], -expect, 1e-12);
  EXPECT_NEAR(y[1], expect, 1e-12);
  EXPECT_NEAR(y[1], 0.999995, 1e-6);
}

TEST(BatchNorm, RunningMeanUpdate) {
  std::vector<double> x = {1, 3}, y(2), g = {1}, beta = {0}, rm = {0}, rv = {1};
  nn::batch_norm_forward<double>(x, 2, 1, g, beta, rm, rv, {}, Mode::train, y);
  EXPECT_NEAR(rm[0], 0.006, 1e-12);
}

TEST(BatchNorm, EvalModeIdentityWithUnitStats) {
  std::vector<double> x = {0.5, -2}, y(2), g = {1}, beta = {0}, rm = {0}, rv = {1};
  nn::batch_norm_forward<double>(x, 2, 1, g, beta, rm, rv, {}, Mode::eval, y);
  EXPECT_NEAR(y[0], 0.5, 1e-5);
  EXPECT_NEAR(y[1], -2, 1e-5);
}

TEST(BatchNorm, TrainBatchOfOneIsError) {
  std::vector<double> x = {1}, y(1), g = {1}, beta = {0}, rm = {0}, rv = {1};
  EXPECT_THROW(nn::batch_norm_forward<double>(x, 1, 1, g, beta, rm, rv, {}, Mode::train, y),
               NumericError);
}

TEST(BatchNorm, GradientBothModes) {
  for (auto mode : {Mode::train, Mode::eval}) {
    const std::size_t B = 4, C = 3;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0, 1);
    std::vector<double> x(B * C), g(C), beta(C), w(B * C);
    for (auto* v : {&x, &g, &beta, &w})
      for (auto& e : *v) e = n(rng);
    std::vector<double> rm = {0.1, -0.2, 0.3}, rv = {0.5, 1.5, 2.0};
    auto f = [&]() {
      auto m = rm, v = rv;
      std::vector<double> y(B * C);
      nn::batch_norm_forward<double>(x, B, C, g, beta, m, v, {}, mode, y);
      double s = 0;
      for (std::size_t i = 0; i < y.size(); ++i) s += w[i] * y[i];
      return s;
    };
    auto m = rm, v = rv;
    std::vector<double> y(B * C), dx(B * C), dg(C), db(C);
    nn::BatchNormCache<double> cache;
    nn::batch_norm_forward<double>(x, B, C, g, beta, m, v, {}, mode, y, &cache);
    nn::batch_norm_backward<double>(w, B, C, g, cache, dg, db, dx);
    EXPECT_LT(check::check_vector(f, x, dx, "x").max_rel_error, 1e-4);
    EXPECT_LT(check::check_vector(f, g, dg, "gamma").max_rel_error, 1e-4);
    EXPECT_LT(check::check_vector(f, beta, db, "beta").max_rel_error, 1e-4);
  }
}

TEST(FullyConnected, ShapeMismatchIsError) {
  std::vector<double> x(3), w(4), b(2), y(2);
  EXPECT_THROW(nn::fully_connected_forward<double>(x, 1, 3, w, b, 2, y), NumericError);
}

TEST(Softmax, UniformAndStable) {
  auto p = nn::softmax_copy<double>(std::vector<double>{0, 0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  auto q = nn::softmax_copy<float>(std::vector<float>{1000, 0});
  EXPECT_TRUE(std::isfinite(q[0]) && std::isfinite(q[1]));
  EXPECT_NEAR(q[0], 1.0f, 1e-6);
  EXPECT_GT(q[1], -1e-30f);
}

TEST(CrossEntropy, Values) {
  EXPECT_DOUBLE_EQ(nn::cross_entropy<double>(std::vector<double>{1, 0}, 0), 0.0);
  EXPECT_NEAR(nn::cross_entropy<double>(std::vector<double>{0.5, 0.5}, 1), std::log(2.0), 1e-12);
  EXPECT_NEAR(nn::cross_entropy<double>(std::vector<double>{0, 1}, 0), -std::log(1e-12), 1e-9);
  EXPECT_THROW(nn::cross_entropy<double>(std::vector<double>{0.5, 0.5}, 2), NumericError);
}

TEST(Dropout, EvalIsIdentityAndTrainScales) {
  std::vector<float> x = {1, 2, 3, 4}, mask;
  std::mt19937_64 rng(1);
  auto copy = x;
  nn::dropout<float>(std::span<float>(copy), 0.5, Mode::eval, rng, mask);
  EXPECT_EQ(copy, x);
  nn::dropout<float>(std::span<float>(copy), 0.5, Mode::train, rng, mask);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_TRUE(copy[i] == 0.0f || copy[i] == 2 * x[i]);
}

TEST(Adam, FirstStepIsLearningRate) {
  nn::ParameterSet<double> p;
  p.add(nn::Tensor<double>("w", {1}, 0.0));
  auto g = p.zeros_like();
  g[0].values[0] = 1.0;
  nn::Adam<double> adam(p, {1e-3, 0.9, 0.999, 1e-8});
  adam.step(p, g);
  EXPECT_NEAR(p[0].values[0], -1e-3 / (1 + 1e-8), 1e-15);
  EXPECT_EQ(adam.timestep(), 1);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  nn::ParameterSet<double> p;
  p.add(nn::Tensor<double>("w", {3}, 0.7));
  auto g = p.zeros_like();
  nn::Adam<double> adam(p, {});
  for (int i = 0; i < 3; ++i) adam.step(p, g);
  for (double v : p[0].values) EXPECT_EQ(v, 0.7);
}

TEST(Network, GradientCheckTrainMode) {
  auto r = check::check_network(Mode::train);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_GT(r.checked, 300u);
}

TEST(Network, GradientCheckEvalMode) {
  auto r = check::check_network(Mode::eval);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(Network, ProbabilitiesAndDeterminism) {
  const auto cfg = check::toy_config();
  model::DacNetwork<float> net(cfg, 10, features::PosVocabulary().size(), 1);
  auto inputs = check::toy_inputs(cfg, 2);
  std::vector<float> ctx(cfg.context_dim(), 0.0f);
  for (const auto& in : inputs) {
    auto p1 = net.predict(in, ctx);
    auto p2 = net.predict(in, ctx);
    EXPECT_EQ(p1, p2);
    double s = 0;
    for (float v : p1) {
      EXPECT_GT(v, 0.0f);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(Network, PadEmbeddingNeverMatters) {
  const auto cfg = check::toy_config();
  model::DacNetwork<float> net(cfg, 10, features::PosVocabulary().size(), 1);
  auto inputs = check::toy_inputs(cfg, 2);
  std::vector<float> ctx(cfg.context_dim(), 0.0f);
  std::vector<std::vector<float>> before;
  for (const auto& in : inputs) before.push_back(net.predict(in, ctx));
  auto& emb = net.word_embedding();
  for (std::size_t d = 0; d < emb.cols(); ++d) emb.row(0)[d] = 100.0f + static_cast<float>(d);
  for (std::size_t i = 0; i < inputs.size(); ++i) EXPECT_EQ(net.predict(inputs[i], ctx), before[i]);
}

TEST(Network, ZeroContextWindow) {
  auto cfg = check::toy_config();
  cfg.context_window = 0;
  model::DacNetwork<float> net(cfg, 10, features::PosVocabulary().size(), 1);
  auto inputs = check::toy_inputs(cfg, 2);
  auto p = net.predict(inputs[0], std::vector<float>{});
  EXPECT_EQ(p.size(), 3u);
  EXPECT_THROW(net.predict(inputs[0], std::vector<float>{1.0f}), NumericError);
}

TEST(Network, MaskedGroupsKeepParameterCount) {
  auto cfg = check::toy_config();
  model::DacNetwork<float> full(cfg, 10, 48, 1);
  cfg.use_lexical = false;
  cfg.use_syntactic = false;
  model::DacNetwork<float> masked(cfg, 10, 48, 1);
  EXPECT_EQ(full.params.trainable_count(), masked.params.trainable_count());
}
