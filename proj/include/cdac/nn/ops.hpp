#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cdac/error.hpp"
#include "cdac/nn/kernels.hpp"

namespace cdac::nn {

enum class Mode { train, eval };

inline void check_shape(bool ok, const std::string& what) {
  if (!ok) throw NumericError("shape mismatch: " + what);
}

// ---------------------------------------------------------------------------
// Convolution over time with full-width kernels, followed by max-pooling over
// the valid positions 0 .. max(L - k + 1, 1) - 1.

struct ConvBranchSpec {
  std::size_t kernel_size = 1;
  std::size_t filters = 100;
  std::size_t input_width = 300;

  std::size_t window() const { return kernel_size * input_width; }
};

// `input` holds at least max(length, kernel_size) rows of `input_width`
// values; rows at or beyond `length` must be zero. With length 0 the pooled
// output is zero and argmax is -1.
template <typename T>
void conv_pool_forward(const T* input, std::size_t length, const ConvBranchSpec& spec,
                       const T* weight, const T* bias, T* pooled, int* argmax) {
  const std::size_t k = spec.kernel_size, w = spec.window();
  if (length == 0) {
    std::fill(pooled, pooled + spec.filters, T(0));
    std::fill(argmax, argmax + spec.filters, -1);
    return;
  }
  const std::size_t positions = length >= k ? length - k + 1 : 1;
  for (std::size_t f = 0; f < spec.filters; ++f) {
    const T* wf = weight + f * w;
    T best = -std::numeric_limits<T>::infinity();
    int best_pos = 0;
    for (std::size_t p = 0; p < positions; ++p) {
      const T v = kernels::dot(wf, input + p * spec.input_width, w);
      if (v > best) {
        best = v;
        best_pos = static_cast<int>(p);
      }
    }
    pooled[f] = best + bias[f];
    argmax[f] = best_pos;
  }
}

// Accumulates into dweight/dbias and (when non-null) dinput.
template <typename T>
void conv_pool_backward(const T* input, const ConvBranchSpec& spec, const T* weight,
                        const T* dpooled, const int* argmax, T* dweight, T* dbias,
                        T* dinput) {
  const std::size_t w = spec.window();
  for (std::size_t f = 0; f < spec.filters; ++f) {
    if (argmax[f] < 0) continue;
    const T g = dpooled[f];
    if (g == T(0)) continue;
    const std::size_t off = static_cast<std::size_t>(argmax[f]) * spec.input_width;
    kernels::axpy(g, input + off, dweight + f * w, w);
    dbias[f] += g;
    if (dinput) kernels::axpy(g, weight + f * w, dinput + off, w);
  }
}

// ---------------------------------------------------------------------------
// Batch normalization over a (batch x channels) matrix.

struct BatchNormSpec {
  double momentum = 0.997;
  double epsilon = 1e-5;
};

template <typename T>
struct BatchNormCache {
  std::vector<T> xhat;     // batch x channels
  std::vector<T> inv_std;  // channels
  Mode mode = Mode::eval;
};

// Train mode normalizes by the batch statistics (biased variance) and folds
// them into the running averages: running <- M * running + (1 - M) * batch.
template <typename T>
void batch_norm_forward(std::span<const T> x, std::size_t batch, std::size_t channels,
                        std::span<const T> gamma, std::span<const T> beta,
                        std::span<T> running_mean, std::span<T> running_var,
                        const BatchNormSpec& spec, Mode mode, std::span<T> y,
                        BatchNormCache<T>* cache = nullptr) {
  check_shape(x.size() == batch * channels && y.size() == x.size(),
              "batch_norm input/output");
  check_shape(gamma.size() == channels && beta.size() == channels &&
                  running_mean.size() == channels && running_var.size() == channels,
              "batch_norm parameters");
  if (mode == Mode::train && batch < 2)
    throw NumericError("batch normalization in train mode needs a batch of at least 2");
  std::vector<T> mean(channels), inv_std(channels);
  if (mode == Mode::train) {
    const T m = static_cast<T>(spec.momentum);
    for (std::size_t c = 0; c < channels; ++c) {
      T mu = 0;
      for (std::size_t b = 0; b < batch; ++b) mu += x[b * channels + c];
      mu /= static_cast<T>(batch);
      T var = 0;
      for (std::size_t b = 0; b < batch; ++b) {
        const T d = x[b * channels + c] - mu;
        var += d * d;
      }
      var /= static_cast<T>(batch);
      mean[c] = mu;
      inv_std[c] = T(1) / std::sqrt(var + static_cast<T>(spec.epsilon));
      running_mean[c] = m * running_mean[c] + (T(1) - m) * mu;
      running_var[c] = m * running_var[c] + (T(1) - m) * var;
    }
  } else {
    for (std::size_t c = 0; c < channels; ++c) {
      mean[c] = running_mean[c];
      inv_std[c] = T(1) / std::sqrt(std::max(running_var[c], T(0)) +
                                    static_cast<T>(spec.epsilon));
    }
  }
  if (cache) {
    cache->xhat.resize(batch * channels);
    cache->inv_std = inv_std;
    cache->mode = mode;
  }
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < channels; ++c) {
      const T xh = (x[b * channels + c] - mean[c]) * inv_std[c];
      if (cache) cache->xhat[b * channels + c] = xh;
      y[b * channels + c] = gamma[c] * xh + beta[c];
    }
}

template <typename T>
void batch_norm_backward(std::span<const T> dy, std::size_t batch, std::size_t channels,
                         std::span<const T> gamma, const BatchNormCache<T>& cache,
                         std::span<T> dgamma, std::span<T> dbeta, std::span<T> dx) {
  for (std::size_t c = 0; c < channels; ++c) {
    T sum_dy = 0, sum_dy_xhat = 0;
    for (std::size_t b = 0; b < batch; ++b) {
      const T g = dy[b * channels + c];
      sum_dy += g;
      sum_dy_xhat += g * cache.xhat[b * channels + c];
    }
    dgamma[c] += sum_dy_xhat;
    dbeta[c] += sum_dy;
    const T scale = gamma[c] * cache.inv_std[c];
    if (cache.mode == Mode::eval) {
      for (std::size_t b = 0; b < batch; ++b)
        dx[b * channels + c] = scale * dy[b * channels + c];
    } else {
      const T n = static_cast<T>(batch);
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t i = b * channels + c;
        dx[i] = scale * (dy[i] - sum_dy / n - cache.xhat[i] * sum_dy_xhat / n);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Dense layer: y = W x + b for each row of x; W is (out x in).

template <typename T>
void fully_connected_forward(std::span<const T> x, std::size_t batch, std::size_t in,
                             std::span<const T> weight, std::span<const T> bias,
                             std::size_t out, std::span<T> y) {
  check_shape(x.size() == batch * in, "fully_connected input");
  check_shape(weight.size() == out * in && bias.size() == out, "fully_connected weight");
  check_shape(y.size() == batch * out, "fully_connected output");
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t o = 0; o < out; ++o)
      y[b * out + o] = kernels::dot(weight.data() + o * in, x.data() + b * in, in) + bias[o];
}

// Accumulates dW and db; overwrites dx when non-empty.
template <typename T>
void fully_connected_backward(std::span<const T> dy, std::span<const T> x,
                              std::size_t batch, std::size_t in, std::span<const T> weight,
                              std::size_t out, std::span<T> dweight, std::span<T> dbias,
                              std::span<T> dx) {
  if (!dx.empty()) std::fill(dx.begin(), dx.end(), T(0));
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < out; ++o) {
      const T g = dy[b * out + o];
      if (g == T(0)) continue;
      dbias[o] += g;
      kernels::axpy(g, x.data() + b * in, dweight.data() + o * in, in);
      if (!dx.empty()) kernels::axpy(g, weight.data() + o * in, dx.data() + b * in, in);
    }
  }
}

template <typename T>
void relu(std::span<T> x) {
  for (auto& v : x) v = v > T(0) ? v : T(0);
}

// dx = dy where the forward output was positive.
template <typename T>
void relu_backward(std::span<const T> out, std::span<T> grad) {
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!(out[i] > T(0))) grad[i] = T(0);
}

// Inverted dropout. In eval mode the input is untouched and the mask is all
// ones; in train mode surviving units are scaled by 1 / (1 - rate).
template <typename T, typename Rng>
void dropout(std::span<T> x, double rate, Mode mode, Rng& rng, std::vector<T>& mask) {
  if (rate < 0.0 || rate >= 1.0) throw NumericError("dropout rate must be in [0, 1)");
  mask.assign(x.size(), T(1));
  if (mode == Mode::eval || rate == 0.0) return;
  std::bernoulli_distribution keep(1.0 - rate);
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask[i] = keep(rng) ? scale : T(0);
    x[i] *= mask[i];
  }
}

// Max-subtracted softmax, in place.
template <typename T>
void softmax(std::span<T> z) {
  if (z.empty()) return;
  const T mx = *std::max_element(z.begin(), z.end());
  T sum = 0;
  for (auto& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

template <typename T>
std::vector<T> softmax_copy(std::span<const T> z) {
  std::vector<T> out(z.begin(), z.end());
  softmax(std::span<T>(out));
  return out;
}

inline constexpr double kProbabilityFloor = 1e-12;

// -ln(max(p[gold], 1e-12)).
template <typename T>
T cross_entropy(std::span<const T> probs, std::size_t gold) {
  if (gold >= probs.size())
    throw NumericError("gold index " + std::to_string(gold) + " out of range for " +
                       std::to_string(probs.size()) + " classes");
  return -std::log(std::max(probs[gold], static_cast<T>(kProbabilityFloor)));
}

}  // namespace cdac::nn
