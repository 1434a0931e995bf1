#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "cdac/baselines/sparse.hpp"
#include "cdac/error.hpp"

namespace cdac::baselines {

namespace detail {

inline std::vector<std::size_t> present_classes(const std::vector<std::size_t>& labels,
                                                std::size_t n_classes) {
  std::set<std::size_t> s(labels.begin(), labels.end());
  for (auto c : s)
    if (c >= n_classes) throw DataError("class id out of range");
  if (s.size() < 2) throw DataError("training data must contain at least 2 classes");
  return {s.begin(), s.end()};
}

inline void check_training_set(const std::vector<SparseVector>& x,
                               const std::vector<std::size_t>& y) {
  if (x.size() != y.size()) throw DataError("feature/label count mismatch");
  if (x.empty()) throw DataError("empty training set");
}

}  // namespace detail

// Multinomial naive Bayes with additive smoothing over nonnegative features.
class MultinomialNB {
 public:
  static MultinomialNB fit(const std::vector<SparseVector>& x,
                           const std::vector<std::size_t>& y, std::size_t dim,
                           std::size_t n_classes, double alpha = 1.0) {
    detail::check_training_set(x, y);
    MultinomialNB m;
    m.dim_ = dim;
    m.classes_ = detail::present_classes(y, n_classes);
    std::vector<int> slot(n_classes, -1);
    for (std::size_t k = 0; k < m.classes_.size(); ++k) slot[m.classes_[k]] = static_cast<int>(k);
    std::vector<std::vector<double>> counts(m.classes_.size(), std::vector<double>(dim, 0.0));
    std::vector<double> docs(m.classes_.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto k = static_cast<std::size_t>(slot[y[i]]);
      docs[k] += 1;
      for (std::size_t j = 0; j < x[i].nnz(); ++j) {
        if (x[i].value[j] < 0) throw DataError("multinomial naive Bayes needs nonnegative features");
        counts[k][x[i].index[j]] += x[i].value[j];
      }
    }
    m.log_prior_.resize(m.classes_.size());
    m.log_theta_.assign(m.classes_.size(), std::vector<double>(dim));
    for (std::size_t k = 0; k < m.classes_.size(); ++k) {
      m.log_prior_[k] = std::log(docs[k] / static_cast<double>(x.size()));
      const double total =
          std::accumulate(counts[k].begin(), counts[k].end(), 0.0) + alpha * static_cast<double>(dim);
      for (std::size_t j = 0; j < dim; ++j)
        m.log_theta_[k][j] = std::log((counts[k][j] + alpha) / total);
    }
    return m;
  }

  // Unnormalized log posterior per present class.
  std::vector<double> joint_log_likelihood(const SparseVector& v) const {
    std::vector<double> out(log_prior_);
    for (std::size_t k = 0; k < classes_.size(); ++k) out[k] += v.dot(log_theta_[k]);
    return out;
  }

  std::vector<double> posterior(const SparseVector& v) const {
    auto jll = joint_log_likelihood(v);
    const double mx = *std::max_element(jll.begin(), jll.end());
    double s = 0;
    for (auto& x : jll) s += (x = std::exp(x - mx));
    for (auto& x : jll) x /= s;
    return jll;
  }

  std::size_t predict(const SparseVector& v) const {
    const auto jll = joint_log_likelihood(v);
    return classes_[static_cast<std::size_t>(std::max_element(jll.begin(), jll.end()) - jll.begin())];
  }

  const std::vector<std::size_t>& classes() const { return classes_; }
  const std::vector<double>& log_prior() const { return log_prior_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> classes_;
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_theta_;
};

struct SvmConfig {
  double lambda = 1e-4;
  std::size_t epochs = 20;
  std::uint64_t seed = 7;
};

// One-vs-rest linear SVMs trained by stochastic subgradient descent on the
// L2-regularized hinge loss (step 1 / (lambda t)); the bias is a constant
// feature.
class LinearSvm {
 public:
  static LinearSvm fit(const std::vector<SparseVector>& x, const std::vector<std::size_t>& y,
                       std::size_t dim, std::size_t n_classes, const SvmConfig& cfg = {}) {
    detail::check_training_set(x, y);
    if (!(cfg.lambda > 0)) throw UsageError("SVM regularization must be positive");
    LinearSvm m;
    m.classes_ = detail::present_classes(y, n_classes);
    const std::size_t K = m.classes_.size(), D = dim + 1;  // last: bias
    std::vector<std::vector<double>> v(K, std::vector<double>(D, 0.0));
    std::vector<double> scale(K, 1.0);
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed);
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (auto i : order) {
        ++t;
        const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
        const double shrink = 1.0 - eta * cfg.lambda;
        const auto& xi = x[i];
        for (std::size_t k = 0; k < K; ++k) {
          const double target = m.classes_[k] == y[i] ? 1.0 : -1.0;
          const double margin = target * scale[k] * (xi.dot(v[k]) + v[k][dim]);
          if (shrink <= 0) {
            std::fill(v[k].begin(), v[k].end(), 0.0);
            scale[k] = 1.0;
          } else {
            scale[k] *= shrink;
          }
          if (margin < 1.0) {
            const double step = eta * target / scale[k];
            for (std::size_t j = 0; j < xi.nnz(); ++j) v[k][xi.index[j]] += step * xi.value[j];
            v[k][dim] += step;
          }
          if (scale[k] < 1e-9) {
            for (auto& w : v[k]) w *= scale[k];
            scale[k] = 1.0;
          }
        }
      }
    }
    m.weights_.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      m.weights_[k].resize(D);
      for (std::size_t j = 0; j < D; ++j) m.weights_[k][j] = v[k][j] * scale[k];
    }
    m.dim_ = dim;
    return m;
  }

  std::vector<double> decision(const SparseVector& v) const {
    std::vector<double> out(classes_.size());
    for (std::size_t k = 0; k < classes_.size(); ++k) out[k] = v.dot(weights_[k]) + weights_[k][dim_];
    return out;
  }

  std::size_t predict(const SparseVector& v) const {
    const auto d = decision(v);
    return classes_[static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin())];
  }

  const std::vector<std::size_t>& classes() const { return classes_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> classes_;
  std::vector<std::vector<double>> weights_;
};

}  // namespace cdac::baselines
