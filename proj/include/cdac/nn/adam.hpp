#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cdac/nn/ops.hpp"
#include "cdac/nn/tensor.hpp"

namespace cdac::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over the trainable tensors of a ParameterSet.
template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(const ParameterSet<T>& params, AdamConfig config) : config_(config) {
    first_ = params.zeros_like();
    second_ = params.zeros_like();
  }

  const AdamConfig& config() const { return config_; }
  std::int64_t timestep() const { return t_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

  void step(ParameterSet<T>& params, const ParameterSet<T>& grads) {
    check_shape(params.size() == grads.size() && first_.size() == params.size(),
                "adam parameter/gradient sets");
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    const T b1 = static_cast<T>(config_.beta1), b2 = static_cast<T>(config_.beta2);
    const T lr = static_cast<T>(config_.learning_rate);
    const T eps = static_cast<T>(config_.epsilon);
    const T inv_c1 = static_cast<T>(1.0 / c1), inv_c2 = static_cast<T>(1.0 / c2);
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!params.trainable[i]) continue;
      auto& p = params[i].values;
      const auto& g = grads[i].values;
      auto& m = first_[i].values;
      auto& v = second_[i].values;
      check_shape(p.size() == g.size() && p.size() == m.size(), params[i].name);
      for (std::size_t j = 0; j < p.size(); ++j) {
        m[j] = b1 * m[j] + (T(1) - b1) * g[j];
        v[j] = b2 * v[j] + (T(1) - b2) * g[j] * g[j];
        const T mhat = m[j] * inv_c1;
        const T vhat = v[j] * inv_c2;
        p[j] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
    }
  }

 private:
  AdamConfig config_;
  ParameterSet<T> first_;
  ParameterSet<T> second_;
  std::int64_t t_ = 0;
};

}  // namespace cdac::nn
