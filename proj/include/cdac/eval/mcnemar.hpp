#pragma once

#include <cmath>
#include <vector>

#include "json.hpp"

#include "cdac/error.hpp"

namespace cdac::eval {

struct McNemarResult {
  std::size_t b = 0;  // A correct, B wrong
  std::size_t c = 0;  // A wrong, B correct
  double statistic = 0;
  double p_value = 1;
  bool exact = false;
  bool significant = false;
};

inline void to_json(nlohmann::json& j, const McNemarResult& r) {
  j = {{"test", "mcnemar"}, {"b", r.b}, {"c", r.c}, {"statistic", r.statistic},
       {"p_value", r.p_value}, {"exact_binomial", r.exact}, {"significant_0_05", r.significant}};
}

inline constexpr double kChiSquare1Df95 = 3.841;

// Two-sided exact binomial p-value for min(b, c) successes out of b + c at 1/2.
inline double exact_binomial_p(std::size_t b, std::size_t c) {
  const std::size_t n = b + c, k = std::min(b, c);
  double tail = 0;
  for (std::size_t i = 0; i <= k; ++i)
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                     static_cast<double>(n) * std::log(2.0));
  return std::min(1.0, 2.0 * tail);
}

inline McNemarResult mcnemar_counts(std::size_t b, std::size_t c) {
  McNemarResult r;
  r.b = b;
  r.c = c;
  if (b + c == 0) return r;
  const double diff = std::abs(static_cast<double>(b) - static_cast<double>(c)) - 1.0;
  r.statistic = std::max(diff, 0.0) * std::max(diff, 0.0) / static_cast<double>(b + c);
  if (b + c < 10) {
    r.exact = true;
    r.p_value = exact_binomial_p(b, c);
    r.significant = r.p_value < 0.05;
  } else {
    r.p_value = std::erfc(std::sqrt(r.statistic / 2.0));
    r.significant = r.statistic > kChiSquare1Df95;
  }
  return r;
}

inline McNemarResult mcnemar(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                             const std::vector<std::size_t>& gold) {
  if (a.size() != gold.size() || b.size() != gold.size())
    throw DataError("McNemar inputs must be aligned");
  std::size_t nb = 0, nc = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool ra = a[i] == gold[i], rb = b[i] == gold[i];
    nb += ra && !rb;
    nc += !ra && rb;
  }
  return mcnemar_counts(nb, nc);
}

}  // namespace cdac::eval
