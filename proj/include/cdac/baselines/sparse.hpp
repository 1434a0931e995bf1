#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace cdac::baselines {

// Index-sorted sparse vector.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }

  void push(std::uint32_t i, double v) {
    index.push_back(i);
    value.push_back(v);
  }

  double norm() const {
    double s = 0;
    for (double v : value) s += v * v;
    return std::sqrt(s);
  }

  double dot(const std::vector<double>& dense) const {
    double s = 0;
    for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * dense[index[k]];
    return s;
  }

  bool operator==(const SparseVector&) const = default;
};

// Appends `v` shifted by `offset`.
inline void append_block(SparseVector& out, const SparseVector& v, std::uint32_t offset) {
  for (std::size_t k = 0; k < v.nnz(); ++k) out.push(v.index[k] + offset, v.value[k]);
}

}  // namespace cdac::baselines
