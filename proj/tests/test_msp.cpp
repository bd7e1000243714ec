#include <gtest/gtest.h>

#include <cmath>

#include "loadguide/errors.hpp"
#include "loadguide/msp/msp.hpp"
#include "loadguide/ndkernel/checksum.hpp"
#include "loadguide/ndkernel/grad_check.hpp"
#include "msp_fixtures.hpp"
#include "test_util.hpp"

using namespace loadguide;
using nd::Matrix;

namespace {

msp::MspConfig small_config(std::uint64_t seed = 1) {
  msp::MspConfig c;
  c.lookback = 8;
  c.horizon = 3;
  c.variables = 2;
  c.state_counts = {2, 3};
  c.trunk_channels = 4;
  c.ue_channels = 3;
  c.kernel_width = 3;
  c.seed = seed;
  return c;
}

double full_loss(const msp::MspModel& m, const Matrix& window, const std::vector<int>& targets) {
  return msp::msp_loss(msp::msp_forward(m, window), targets).loss;
}

}  // namespace

TEST(Msp, OutputShape) {
  const auto m = msp::make_msp(small_config());
  const auto z = msp::msp_forward(m, test_util::random_matrix(8, 2, 3));
  EXPECT_EQ(z.z().rows(), 3u);
  EXPECT_EQ(z.z().cols(), 5u);
  EXPECT_EQ(z.groups(), 2u);
  EXPECT_EQ(z.group(1, 1).size(), 3u);
  EXPECT_THROW(msp::msp_forward(m, test_util::random_matrix(7, 2, 3)), DimensionError);
}

TEST(Msp, DeterministicForwardAndInit) {
  const auto a = msp::make_msp(small_config(4));
  const auto b = msp::make_msp(small_config(4));
  EXPECT_EQ(nd::checksum(a.layers()), nd::checksum(b.layers()));
  const Matrix x = test_util::random_matrix(8, 2, 3);
  EXPECT_EQ(msp::msp_forward(a, x).z(), msp::msp_forward(b, x).z());
  EXPECT_NE(nd::checksum(a.layers()), nd::checksum(msp::make_msp(small_config(5)).layers()));
}

TEST(Msp, ZeroFusionGivesBiasLogits) {
  auto m = msp::make_msp(small_config());
  for (auto& w : m.fusion.weights.data()) w = 0.0;
  m.fusion.bias = {0.5, -1.0, 2.0, 0.0, 3.0};
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto z = msp::msp_forward(m, test_util::random_matrix(8, 2, s));
    for (std::size_t h = 0; h < 3; ++h)
      for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(z.z()(h, j), m.fusion.bias[j]);
  }
}

TEST(Msp, ConfigValidation) {
  auto c = small_config();
  c.state_counts = {1, 3};
  EXPECT_THROW(msp::make_msp(c), ConfigError);
  c.state_counts = {2, 6};
  EXPECT_THROW(msp::make_msp(c), ConfigError);
  c.state_counts = {2};
  EXPECT_THROW(msp::make_msp(c), ConfigError);
  c = small_config();
  c.kernel_width = 18;
  EXPECT_THROW(msp::make_msp(c), ConfigError);
}

TEST(Decode, OneHotAndTieRule) {
  const msp::GroupedLogits z(Matrix{{0, 1, 0, 0, 1}, {1, 1, 5, 5, 5}}, {2, 3});
  EXPECT_EQ(msp::decode_states(z), (std::vector<int>{1, 2, 0, 0}));
}

TEST(Decode, ArgmaxInvariantUnderSoftmax) {
  const msp::GroupedLogits z(test_util::random_matrix(4, 5, 2, 3.0), {2, 3});
  const msp::GroupedLogits p(msp::group_probabilities(z), {2, 3});
  EXPECT_EQ(msp::decode_states(z), msp::decode_states(p));
  for (std::size_t h = 0; h < 4; ++h) {
    double s0 = 0, s1 = 0;
    for (double v : p.group(h, 0)) s0 += v;
    for (double v : p.group(h, 1)) s1 += v;
    EXPECT_NEAR(s0, 1.0, 1e-15);
    EXPECT_NEAR(s1, 1.0, 1e-15);
  }
}

TEST(MspLoss, HandComputed) {
  const msp::GroupedLogits z(Matrix{{std::log(2.0), 0.0}}, {2});
  const std::vector<int> t{0};
  EXPECT_NEAR(msp::msp_loss(z, t).loss, -std::log(2.0 / 3.0), 1e-15);
}

TEST(MspLoss, UniformAndSaturated) {
  const msp::GroupedLogits zeros(Matrix(3, 8), {4, 4});
  const std::vector<int> t{0, 1, 2, 3, 0, 1};
  EXPECT_NEAR(msp::msp_loss(zeros, t).loss, std::log(4.0), 1e-14);
  Matrix strong(3, 8, 0.0);
  for (std::size_t h = 0; h < 3; ++h) {
    strong(h, static_cast<std::size_t>(t[h * 2])) = 20.0;
    strong(h, 4 + static_cast<std::size_t>(t[h * 2 + 1])) = 20.0;
  }
  EXPECT_LT(msp::msp_loss(msp::GroupedLogits(strong, {4, 4}), t).loss, 1e-6);
}

TEST(MspLoss, GradientMatchesFiniteDifferences) {
  const msp::GroupedLogits z(test_util::random_matrix(3, 5, 7), {2, 3});
  const std::vector<int> t{1, 2, 0, 0, 1, 1};
  const auto lg = msp::msp_loss(z, t);
  auto f = [&](std::span<const double> v) {
    return msp::msp_loss(msp::GroupedLogits(Matrix(3, 5, std::vector<double>(v.begin(), v.end())), {2, 3}), t).loss;
  };
  const auto r = nd::grad_check(f, z.z().data(), lg.grad.data(), 1e-6);
  EXPECT_TRUE(r.passed) << r.max_rel_error;
}

TEST(MspGradCheck, FullModel) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto m = msp::make_msp(small_config(seed));
    const Matrix x = test_util::random_matrix(8, 2, seed + 50);
    const std::vector<int> t{0, 2, 1, 1, 1, 0};
    msp::MspActivations cache;
    const auto logits = msp::msp_forward(m, x, &cache);
    const auto lg = msp::msp_loss(logits, t);
    std::vector<nd::LayerGrads> acc;
    for (const auto* l : m.layers()) acc.push_back(nd::LayerGrads::zeros_like(*l));
    msp::msp_backward_accumulate(m, cache, lg.grad, acc);
    const auto layers = m.layers();
    const std::vector<const nd::LayerParams*> cl(layers.begin(), layers.end());
    const auto point = nd::flatten_params(cl);
    auto f = [&](std::span<const double> theta) {
      auto copy = m;
      nd::assign_params(copy.layers(), theta);
      return full_loss(copy, x, t);
    };
    const auto r = nd::grad_check(f, point, nd::flatten_grads(acc), 1e-4);
    EXPECT_TRUE(r.passed) << "seed " << seed << " max rel " << r.max_rel_error << " at " << r.worst_index;
  }
}

TEST(MspTraining, LearnsDeterministicTaskAndKeepsBestSnapshot) {
  const auto s = test_util::periodic_states(700, {2, 3}, {4, 3}, 3);
  const data::WindowSet train(s.frame.slice(0, 500), s.states.slice(0, 500), 12, 3);
  const data::WindowSet val(s.frame.slice(500, 700), s.states.slice(500, 700), 12, 3);
  msp::MspConfig c = small_config(2);
  c.lookback = 12;
  c.trunk_channels = 8;
  c.ue_channels = 4;
  TrainOptions opt;
  opt.lr = 0.01;
  opt.batch_size = 16;
  opt.max_epochs = 40;
  opt.seed = 5;
  const auto r = msp::train_msp(msp::make_msp(c), train, val, opt);
  EXPECT_GE(msp::state_accuracy(r.model, val), 0.99);
  EXPECT_LT(r.history.train_loss.back(), r.history.initial_train_loss);
  const double best = msp::msp_mean_loss(r.model, val);
  for (double v : r.history.val_loss) EXPECT_LE(best, v + 1e-12);
  EXPECT_DOUBLE_EQ(best, r.history.best_val_loss());
}

TEST(MspTraining, SameSeedSameModel) {
  const auto s = test_util::periodic_states(200, {2, 3}, {4, 3}, 3);
  const data::WindowSet train(s.frame.slice(0, 140), s.states.slice(0, 140), 8, 3);
  const data::WindowSet val(s.frame.slice(140, 200), s.states.slice(140, 200), 8, 3);
  TrainOptions opt;
  opt.batch_size = 8;
  opt.max_epochs = 3;
  opt.seed = 11;
  const auto a = msp::train_msp(msp::make_msp(small_config()), train, val, opt);
  const auto b = msp::train_msp(msp::make_msp(small_config()), train, val, opt);
  EXPECT_EQ(nd::checksum(a.model.layers()), nd::checksum(b.model.layers()));
}

TEST(MspTraining, RejectsMismatchedWindows) {
  const auto s = test_util::periodic_states(100, {2, 2}, {4, 3}, 3);
  const data::WindowSet train(s.frame, s.states, 8, 3);
  EXPECT_THROW(msp::train_msp(msp::make_msp(small_config()), train, train, {}), DimensionError);
  const data::WindowSet no_states(s.frame, 8, 3);
  auto c = small_config();
  c.state_counts = {2, 2};
  EXPECT_THROW(msp::train_msp(msp::make_msp(c), no_states, no_states, {}), DataError);
}

TEST(MajorityBaseline, CountsMostFrequentState) {
  data::SeriesFrame f;
  f.variable_names = {"a"};
  f.values = Matrix(6, 1);
  data::StateProfile s;
  s.variable_names = {"a"};
  s.counts = {2};
  s.labels = {1, 1, 0, 1, 0, 1};
  for (std::int64_t t = 0; t < 6; ++t) f.timestamps.push_back(t);
  s.timestamps = f.timestamps;
  const data::WindowSet w(f, s, 1, 1);
  // targets are rows 1..5: 1,0,1,0,1 -> majority 1 -> 3/5
  EXPECT_DOUBLE_EQ(msp::majority_class_accuracy(w, w), 0.6);
}
