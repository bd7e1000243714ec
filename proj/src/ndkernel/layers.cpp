#include "loadguide/ndkernel/layers.hpp"

#include <algorithm>
#include <cmath>

#include "loadguide/errors.hpp"

namespace loadguide::nd {

std::string to_string(LayerKind kind) { return kind == LayerKind::linear ? "linear" : "conv1d"; }

LayerKind layer_kind_from_string(const std::string& s) {
  if (s == "linear") return LayerKind::linear;
  if (s == "conv1d") return LayerKind::conv1d;
  throw ConfigError("unknown layer kind '" + s + "'");
}

LayerGrads LayerGrads::zeros_like(const LayerParams& p) {
  return {Matrix(p.weights.rows(), p.weights.cols()), std::vector<double>(p.bias.size(), 0.0)};
}

void LayerGrads::add(const LayerGrads& other) {
  auto& w = weights.data();
  const auto& ow = other.weights.data();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += ow[i];
  for (std::size_t i = 0; i < bias.size(); ++i) bias[i] += other.bias[i];
}

void LayerGrads::scale(double factor) {
  for (double& v : weights.data()) v *= factor;
  for (double& v : bias) v *= factor;
}

namespace {

void glorot_fill(Matrix& w, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : w.data()) v = dist(rng);
}

std::size_t conv_pad(std::size_t kernel_width) { return (kernel_width - 1) / 2; }

void check_conv(const LayerParams& p, const Matrix& input) {
  if (p.kind != LayerKind::conv1d) throw DimensionError("layer '" + p.name + "' is not conv1d");
  if (input.rows() != p.conv.in_channels) {
    throw DimensionError("conv1d '" + p.name + "' expects " + std::to_string(p.conv.in_channels) +
                         " input channels, got input " + input.shape_string());
  }
  if (p.conv.kernel_width > 2 * input.cols() + 1) {
    throw DimensionError("conv1d '" + p.name + "' kernel width " + std::to_string(p.conv.kernel_width) +
                         " exceeds 2*time+1 for input " + input.shape_string());
  }
}

void check_linear(const LayerParams& p, const Matrix& input) {
  if (p.kind != LayerKind::linear) throw DimensionError("layer '" + p.name + "' is not linear");
  if (input.cols() != p.weights.rows()) {
    throw DimensionError("linear '" + p.name + "' weights " + p.weights.shape_string() +
                         " incompatible with input " + input.shape_string());
  }
}

void check_upstream(const LayerParams& p, const Matrix& upstream, std::size_t rows, std::size_t cols) {
  if (upstream.rows() != rows || upstream.cols() != cols) {
    throw DimensionError("layer '" + p.name + "' upstream gradient " + upstream.shape_string() +
                         " does not match output " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

LayerParams make_linear(std::string name, std::size_t in, std::size_t out, std::mt19937_64& rng) {
  LayerParams p;
  p.name = std::move(name);
  p.kind = LayerKind::linear;
  p.weights = Matrix(in, out);
  p.bias.assign(out, 0.0);
  glorot_fill(p.weights, in, out, rng);
  return p;
}

LayerParams make_conv1d(std::string name, std::size_t in_channels, std::size_t out_channels,
                        std::size_t kernel_width, std::mt19937_64& rng) {
  if (kernel_width == 0) throw ConfigError("conv1d kernel width must be >= 1");
  LayerParams p;
  p.name = std::move(name);
  p.kind = LayerKind::conv1d;
  p.conv = {kernel_width, in_channels, out_channels};
  p.weights = Matrix(out_channels, in_channels * kernel_width);
  p.bias.assign(out_channels, 0.0);
  glorot_fill(p.weights, in_channels * kernel_width, out_channels * kernel_width, rng);
  return p;
}

Matrix linear_forward(const LayerParams& p, const Matrix& input) {
  check_linear(p, input);
  require_finite(input, "linear '" + p.name + "' input");
  const std::size_t n = input.rows(), in = p.weights.rows(), out = p.weights.cols();
  Matrix y(n, out);
  for (std::size_t r = 0; r < n; ++r) {
    double* yr = y.row(r).data();
    for (std::size_t o = 0; o < out; ++o) yr[o] = p.bias[o];
    const double* xr = input.row(r).data();
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = xr[i];
      const double* wi = p.weights.row(i).data();
      for (std::size_t o = 0; o < out; ++o) yr[o] += xi * wi[o];
    }
  }
  return y;
}

Matrix conv1d_forward(const LayerParams& p, const Matrix& input) {
  check_conv(p, input);
  require_finite(input, "conv1d '" + p.name + "' input");
  const auto [kw, cin, cout] = p.conv;
  const auto time = static_cast<std::ptrdiff_t>(input.cols());
  const auto pad = static_cast<std::ptrdiff_t>(conv_pad(kw));
  Matrix y(cout, input.cols());
  for (std::size_t o = 0; o < cout; ++o) {
    double* yo = y.row(o).data();
    for (std::ptrdiff_t t = 0; t < time; ++t) yo[t] = p.bias[o];
    for (std::size_t c = 0; c < cin; ++c) {
      const double* xc = input.row(c).data();
      for (std::size_t k = 0; k < kw; ++k) {
        const double w = p.weights(o, c * kw + k);
        // y[t] += w * x[t + shift] for all t with 0 <= t + shift < time
        const std::ptrdiff_t shift = pad - static_cast<std::ptrdiff_t>(k);
        const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
        const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(time, time - shift);
        for (std::ptrdiff_t t = t0; t < t1; ++t) yo[t] += w * xc[t + shift];
      }
    }
  }
  return y;
}

Matrix layer_forward(const LayerParams& p, const Matrix& input) {
  return p.kind == LayerKind::linear ? linear_forward(p, input) : conv1d_forward(p, input);
}

void layer_backward_accumulate(const LayerParams& p, const Matrix& input, const Matrix& upstream,
                               LayerGrads& acc, Matrix* input_grad) {
  if (p.kind == LayerKind::linear) {
    check_linear(p, input);
    const std::size_t n = input.rows(), in = p.weights.rows(), out = p.weights.cols();
    check_upstream(p, upstream, n, out);
    if (input_grad) *input_grad = Matrix(n, in);
    for (std::size_t r = 0; r < n; ++r) {
      const double* ur = upstream.row(r).data();
      const double* xr = input.row(r).data();
      for (std::size_t o = 0; o < out; ++o) acc.bias[o] += ur[o];
      for (std::size_t i = 0; i < in; ++i) {
        const double xi = xr[i];
        double* gw = acc.weights.row(i).data();
        const double* wi = p.weights.row(i).data();
        double dx = 0.0;
        for (std::size_t o = 0; o < out; ++o) {
          gw[o] += xi * ur[o];
          dx += wi[o] * ur[o];
        }
        if (input_grad) (*input_grad)(r, i) = dx;
      }
    }
    return;
  }

  check_conv(p, input);
  check_upstream(p, upstream, p.conv.out_channels, input.cols());
  const auto [kw, cin, cout] = p.conv;
  const auto time = static_cast<std::ptrdiff_t>(input.cols());
  const auto pad = static_cast<std::ptrdiff_t>(conv_pad(kw));
  if (input_grad) *input_grad = Matrix(cin, input.cols());
  for (std::size_t o = 0; o < cout; ++o) {
    const double* uo = upstream.row(o).data();
    double bsum = 0.0;
    for (std::ptrdiff_t t = 0; t < time; ++t) bsum += uo[t];
    acc.bias[o] += bsum;
    for (std::size_t c = 0; c < cin; ++c) {
      const double* xc = input.row(c).data();
      double* dxc = input_grad ? input_grad->row(c).data() : nullptr;
      for (std::size_t k = 0; k < kw; ++k) {
        const std::size_t widx = c * kw + k;
        const double w = p.weights(o, widx);
        const std::ptrdiff_t shift = pad - static_cast<std::ptrdiff_t>(k);
        const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
        const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(time, time - shift);
        double gw = 0.0;
        for (std::ptrdiff_t t = t0; t < t1; ++t) gw += uo[t] * xc[t + shift];
        acc.weights(o, widx) += gw;
        if (dxc)
          for (std::ptrdiff_t t = t0; t < t1; ++t) dxc[t + shift] += w * uo[t];
      }
    }
  }
}

BackwardResult layer_backward(const LayerParams& p, const Matrix& input, const Matrix& upstream) {
  BackwardResult r{LayerGrads::zeros_like(p), Matrix()};
  layer_backward_accumulate(p, input, upstream, r.params, &r.input);
  return r;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

void relu_backward_inplace(const Matrix& activation, Matrix& upstream) {
  if (activation.rows() != upstream.rows() || activation.cols() != upstream.cols())
    throw DimensionError("relu backward shape mismatch: " + activation.shape_string() + " vs " +
                         upstream.shape_string());
  const auto& a = activation.data();
  auto& u = upstream.data();
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!(a[i] > 0.0)) u[i] = 0.0;
}

}  // namespace loadguide::nd
