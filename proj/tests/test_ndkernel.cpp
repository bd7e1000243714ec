#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "loadguide/errors.hpp"
#include "loadguide/ndkernel/adam.hpp"
#include "loadguide/ndkernel/checksum.hpp"
#include "loadguide/ndkernel/grad_check.hpp"
#include "loadguide/ndkernel/layers.hpp"
#include "loadguide/ndkernel/loss.hpp"
#include "loadguide/ndkernel/matrix.hpp"
#include "test_util.hpp"

using namespace loadguide;
using nd::Matrix;

namespace {

nd::LayerParams linear_with(Matrix w, std::vector<double> b) {
  nd::LayerParams p;
  p.name = "fc";
  p.kind = nd::LayerKind::linear;
  p.weights = std::move(w);
  p.bias = std::move(b);
  return p;
}

nd::LayerParams conv_with(std::size_t cin, std::size_t cout, std::size_t k, std::vector<double> w) {
  nd::LayerParams p;
  p.name = "conv";
  p.kind = nd::LayerKind::conv1d;
  p.conv = {k, cin, cout};
  p.weights = Matrix(cout, cin * k, std::move(w));
  p.bias.assign(cout, 0.0);
  return p;
}

// Scalar test loss sum(c .* y) with fixed random coefficients, whose gradient
// w.r.t. y is c.
double weighted_sum(const Matrix& y, const Matrix& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y.data()[i] * c.data()[i];
  return s;
}

nd::GradCheckReport check_layer(nd::LayerParams layer, const Matrix& input, std::uint64_t seed, double tol,
                                bool wrt_input) {
  const Matrix y0 = nd::layer_forward(layer, input);
  const Matrix c = test_util::random_matrix(y0.rows(), y0.cols(), seed + 99);
  const auto back = nd::layer_backward(layer, input, c);
  if (wrt_input) {
    auto f = [&](std::span<const double> x) {
      Matrix in(input.rows(), input.cols(), std::vector<double>(x.begin(), x.end()));
      return weighted_sum(nd::layer_forward(layer, in), c);
    };
    return nd::grad_check(f, input.data(), back.input.data(), tol);
  }
  std::vector<nd::LayerParams*> ptrs{&layer};
  const std::vector<const nd::LayerParams*> cptrs{&layer};
  const auto point = nd::flatten_params(cptrs);
  auto f = [&](std::span<const double> theta) {
    nd::LayerParams copy = layer;
    std::vector<nd::LayerParams*> cp{&copy};
    nd::assign_params(cp, theta);
    return weighted_sum(nd::layer_forward(copy, input), c);
  };
  const std::vector<nd::LayerGrads> grads{back.params};
  return nd::grad_check(f, point, nd::flatten_grads(grads), tol);
}

}  // namespace

TEST(Matrix, ConstructionAndAccess) {
  Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 2), 6.0);
  EXPECT_EQ(m.transposed()(2, 1), 6.0);
  EXPECT_EQ(m.shape_string(), "2x3");
  EXPECT_THROW(Matrix(2, 2, std::vector<double>(3)), DimensionError);
}

TEST(Matrix, FinitenessCheck) {
  Matrix m(2, 2, 1.0);
  EXPECT_NO_THROW(nd::require_finite(m, "m"));
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(m.all_finite());
  EXPECT_THROW(nd::require_finite(m, "m"), NumericError);
}

TEST(Linear, IdentityWeightsPassInputThrough) {
  const auto layer = linear_with(Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0, 0, 0});
  const Matrix x = test_util::random_matrix(4, 3, 1);
  EXPECT_EQ(nd::linear_forward(layer, x), x);
}

TEST(Linear, HandComputedExample) {
  const auto layer = linear_with(Matrix{{1}, {1}}, {0.5});
  const Matrix y = nd::linear_forward(layer, Matrix{{2, 3}});
  EXPECT_EQ(y, (Matrix{{5.5}}));
}

TEST(Linear, NanInputRejected) {
  const auto layer = linear_with(Matrix{{1}, {1}}, {0.0});
  EXPECT_THROW(nd::linear_forward(layer, Matrix{{std::nan(""), 1.0}}), NumericError);
}

TEST(Linear, ShapeMismatchRejected) {
  const auto layer = linear_with(Matrix{{1}, {1}}, {0.0});
  EXPECT_THROW(nd::linear_forward(layer, Matrix{{1.0, 2.0, 3.0}}), DimensionError);
}

TEST(Linear, SingleSampleGradIsOuterProduct) {
  const auto layer = linear_with(Matrix{{1, 2}, {3, 4}}, {0, 0});
  const Matrix x{{0.5, -1.5}};
  const Matrix g{{2.0, -3.0}};
  const auto back = nd::layer_backward(layer, x, g);
  EXPECT_EQ(back.params.weights, (Matrix{{1.0, -1.5}, {-3.0, 4.5}}));
  EXPECT_EQ(back.params.bias, (std::vector<double>{2.0, -3.0}));
  // dx = g * W^T
  EXPECT_EQ(back.input, (Matrix{{2.0 - 6.0, 6.0 - 12.0}}));
}

TEST(Linear, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(3);
  const auto layer = nd::make_linear("fc", 5, 4, rng);
  const auto back = nd::layer_backward(layer, test_util::random_matrix(3, 5, 2), Matrix(3, 4));
  for (double v : back.params.weights.data()) EXPECT_EQ(v, 0.0);
  for (double v : back.params.bias) EXPECT_EQ(v, 0.0);
  for (double v : back.input.data()) EXPECT_EQ(v, 0.0);
}

TEST(Linear, GlorotInitBoundsAndDeterminism) {
  std::mt19937_64 a(11), b(11);
  const auto la = nd::make_linear("fc", 30, 20, a);
  const auto lb = nd::make_linear("fc", 30, 20, b);
  EXPECT_EQ(la.weights, lb.weights);
  const double limit = std::sqrt(6.0 / 50.0);
  for (double v : la.weights.data()) EXPECT_LE(std::abs(v), limit);
  for (double v : la.bias) EXPECT_EQ(v, 0.0);
}

TEST(Conv1d, IdentityKernel) {
  const auto layer = conv_with(1, 1, 1, {1.0});
  const Matrix x{{0.3, -1.0, 2.5, 4.0}};
  EXPECT_EQ(nd::conv1d_forward(layer, x), x);
}

TEST(Conv1d, HandComputedDifferenceKernel) {
  const auto layer = conv_with(1, 1, 3, {1.0, 0.0, -1.0});
  const Matrix y = nd::conv1d_forward(layer, Matrix{{0, 1, 2, 3}});
  EXPECT_EQ(y, (Matrix{{1, 2, 2, -2}}));
}

TEST(Conv1d, KernelWiderThanPaddedInputRejected) {
  const auto layer = conv_with(1, 1, 5, {1, 1, 1, 1, 1});
  EXPECT_THROW(nd::conv1d_forward(layer, Matrix{{1.0}}), DimensionError);
  EXPECT_NO_THROW(nd::conv1d_forward(layer, Matrix{{1.0, 2.0}}));
}

TEST(Conv1d, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(5);
  const auto layer = nd::make_conv1d("conv", 2, 3, 3, rng);
  const auto back = nd::layer_backward(layer, test_util::random_matrix(2, 7, 1), Matrix(3, 7));
  for (double v : back.params.weights.data()) EXPECT_EQ(v, 0.0);
  for (double v : back.input.data()) EXPECT_EQ(v, 0.0);
}

TEST(GradCheck, LinearLayerParamsAndInput) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    auto layer = nd::make_linear("fc", 6, 4, rng);
    for (auto& b : layer.bias) b = std::normal_distribution<double>(0.0, 0.5)(rng);
    const Matrix x = test_util::random_matrix(3, 6, seed + 10);
    const auto rp = check_layer(layer, x, seed, 1e-6, false);
    const auto rx = check_layer(layer, x, seed, 1e-6, true);
    EXPECT_TRUE(rp.passed) << "max rel " << rp.max_rel_error;
    EXPECT_TRUE(rx.passed) << "max rel " << rx.max_rel_error;
  }
}

TEST(GradCheck, ConvLayerVariousWidths) {
  for (std::size_t k : {1u, 2u, 3u, 5u}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::mt19937_64 rng(seed * 7 + k);
      const auto layer = nd::make_conv1d("conv", 3, 2, k, rng);
      const Matrix x = test_util::random_matrix(3, 9, seed + 20);
      const auto rp = check_layer(layer, x, seed, 1e-5, false);
      const auto rx = check_layer(layer, x, seed, 1e-5, true);
      EXPECT_TRUE(rp.passed) << "k=" << k << " max rel " << rp.max_rel_error;
      EXPECT_TRUE(rx.passed) << "k=" << k << " max rel " << rx.max_rel_error;
    }
  }
}

TEST(GradCheck, DetectsWrongGradient) {
  auto f = [](std::span<const double> x) { return x[0] * x[0] + 3.0 * x[1]; };
  const std::vector<double> point{1.0, 2.0};
  EXPECT_TRUE(nd::grad_check(f, point, std::vector<double>{2.0, 3.0}, 1e-6).passed);
  const auto bad = nd::grad_check(f, point, std::vector<double>{2.0, 3.3}, 1e-6);
  EXPECT_FALSE(bad.passed);
  EXPECT_EQ(bad.worst_index, 1u);
}

TEST(Relu, ForwardAndBackwardMask) {
  const Matrix x{{-1.0, 0.0, 2.0}};
  EXPECT_EQ(nd::relu(x), (Matrix{{0.0, 0.0, 2.0}}));
  Matrix up{{5.0, 5.0, 5.0}};
  nd::relu_backward_inplace(x, up);
  EXPECT_EQ(up, (Matrix{{0.0, 0.0, 5.0}}));
}

TEST(Softmax, UniformForEqualLogits) {
  std::vector<double> z{0.0, 0.0, 0.0};
  nd::softmax_inplace(z);
  for (double p : z) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
}

TEST(Softmax, HandComputedLn2) {
  std::vector<double> z{std::log(2.0), 0.0};
  nd::softmax_inplace(z);
  EXPECT_NEAR(z[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(z[1], 1.0 / 3.0, 1e-15);
}

TEST(Softmax, ShiftInvariantAndStableForLargeLogits) {
  const Matrix z = test_util::random_matrix(4, 5, 8, 3.0);
  Matrix shifted = z;
  for (auto& v : shifted.data()) v += 700.0;
  test_util::expect_matrix_near(nd::softmax_rows(z), nd::softmax_rows(shifted), 1e-12);
  EXPECT_TRUE(nd::softmax_rows(shifted).all_finite());
}

TEST(CrossEntropy, PerfectPredictionAndUniform) {
  const std::vector<int> t{1};
  EXPECT_EQ(nd::cross_entropy(Matrix{{0.0, 1.0}}, t).loss, 0.0);
  const std::vector<int> t0{0};
  EXPECT_NEAR(nd::cross_entropy(Matrix{{0.25, 0.25, 0.25, 0.25}}, t0).loss, std::log(4.0), 1e-15);
}

TEST(CrossEntropy, TargetOutOfRange) {
  const std::vector<int> t{2};
  EXPECT_THROW(nd::cross_entropy(Matrix{{0.5, 0.5}}, t), DimensionError);
}

TEST(CrossEntropy, GradientThroughSoftmaxMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix z = test_util::random_matrix(3, 4, seed, 2.0);
    const std::vector<int> targets{static_cast<int>(seed % 4), 1, 3};
    const auto lg = nd::cross_entropy(nd::softmax_rows(z), targets);
    auto f = [&](std::span<const double> v) {
      return nd::cross_entropy(nd::softmax_rows(Matrix(3, 4, std::vector<double>(v.begin(), v.end()))), targets).loss;
    };
    const auto r = nd::grad_check(f, z.data(), lg.grad.data(), 1e-6);
    EXPECT_TRUE(r.passed) << "max rel " << r.max_rel_error;
  }
}

TEST(Adam, HandComputedFirstStep) {
  auto p = linear_with(Matrix{{1.0}}, {0.0});
  std::vector<nd::LayerParams*> ps{&p};
  const std::vector<const nd::LayerParams*> cps{&p};
  auto state = nd::AdamState::for_layers(cps);
  nd::LayerGrads g{Matrix{{0.5}}, {0.0}};
  const std::vector<nd::LayerGrads> gs{g};
  nd::adam_step(state, ps, gs);
  // m = 0.05, v = 0.00025; m_hat = 0.5, v_hat = 0.25
  const double expected = 1.0 - 0.001 * (0.5 / (std::sqrt(0.25) + 1e-8));
  EXPECT_NEAR(p.weights(0, 0), expected, 1e-15);
  EXPECT_EQ(p.bias[0], 0.0);
  EXPECT_EQ(state.step, 1u);
  EXPECT_NEAR(state.first[0].weights(0, 0), 0.05, 1e-15);
  EXPECT_NEAR(state.second[0].weights(0, 0), 0.00025, 1e-15);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  std::mt19937_64 rng(1);
  auto p = nd::make_linear("fc", 3, 2, rng);
  const auto before = p;
  std::vector<nd::LayerParams*> ps{&p};
  const std::vector<const nd::LayerParams*> cps{&p};
  auto state = nd::AdamState::for_layers(cps);
  const std::vector<nd::LayerGrads> gs{nd::LayerGrads::zeros_like(p)};
  for (int i = 0; i < 3; ++i) nd::adam_step(state, ps, gs);
  EXPECT_EQ(p.weights, before.weights);
  EXPECT_EQ(p.bias, before.bias);
}

TEST(Adam, ZeroLearningRateUpdatesOnlyMoments) {
  std::mt19937_64 rng(2);
  auto p = nd::make_linear("fc", 3, 2, rng);
  const auto before = p;
  std::vector<nd::LayerParams*> ps{&p};
  const std::vector<const nd::LayerParams*> cps{&p};
  auto state = nd::AdamState::for_layers(cps, {0.0, 0.9, 0.999, 1e-8});
  nd::LayerGrads g = nd::LayerGrads::zeros_like(p);
  g.weights(0, 0) = 1.0;
  const std::vector<nd::LayerGrads> gs{g};
  nd::adam_step(state, ps, gs);
  EXPECT_EQ(p.weights, before.weights);
  EXPECT_NEAR(state.first[0].weights(0, 0), 0.1, 1e-15);
}

TEST(Adam, NonFiniteGradientNamesBlock) {
  auto p = linear_with(Matrix{{1.0}}, {0.0});
  p.name = "head_3";
  std::vector<nd::LayerParams*> ps{&p};
  const std::vector<const nd::LayerParams*> cps{&p};
  auto state = nd::AdamState::for_layers(cps);
  const std::vector<nd::LayerGrads> gs{nd::LayerGrads{Matrix{{std::nan("")}}, {0.0}}};
  try {
    nd::adam_step(state, ps, gs);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("head_3.weights"), std::string::npos) << e.what();
  }
  EXPECT_EQ(p.weights(0, 0), 1.0);
}

TEST(Checksum, SensitiveToSingleBit) {
  std::mt19937_64 rng(4);
  auto p = nd::make_linear("fc", 4, 4, rng);
  const std::vector<const nd::LayerParams*> cps{&p};
  const auto c0 = nd::checksum(cps);
  EXPECT_EQ(c0, nd::checksum(cps));
  p.weights(2, 3) = std::nextafter(p.weights(2, 3), 10.0);
  EXPECT_NE(c0, nd::checksum(cps));
}
