#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "cdac/error.hpp"
#include "cdac/features/lexical.hpp"

namespace cdac::features {

// Per-dimension z-scoring of the lexical block; population std floored at
// kMinStd.
struct FeatureNormalizer {
  static constexpr double kMinStd = 1e-8;

  std::array<double, kLexicalDim> mean{};
  std::array<double, kLexicalDim> stddev{1, 1, 1, 1, 1, 1};

  static FeatureNormalizer fit(std::span<const std::array<double, kLexicalDim>> rows) {
    if (rows.size() < 2)
      throw DataError("normalizer needs at least 2 training rows, got " +
                      std::to_string(rows.size()));
    FeatureNormalizer n;
    const double count = static_cast<double>(rows.size());
    for (std::size_t d = 0; d < kLexicalDim; ++d) {
      double sum = 0;
      for (const auto& r : rows) sum += r[d];
      const double mu = sum / count;
      double ss = 0;
      for (const auto& r : rows) ss += (r[d] - mu) * (r[d] - mu);
      n.mean[d] = mu;
      n.stddev[d] = std::max(std::sqrt(ss / count), kMinStd);
    }
    return n;
  }

  std::array<double, kLexicalDim> apply(const std::array<double, kLexicalDim>& x) const {
    std::array<double, kLexicalDim> z{};
    for (std::size_t d = 0; d < kLexicalDim; ++d) z[d] = (x[d] - mean[d]) / stddev[d];
    return z;
  }

  bool operator==(const FeatureNormalizer&) const = default;
};

}  // namespace cdac::features
