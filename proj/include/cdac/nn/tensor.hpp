#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cdac/error.hpp"

namespace cdac::nn {

// Named dense array, row-major.
template <typename T>
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<T> values;

  Tensor() = default;
  Tensor(std::string n, std::vector<std::size_t> s, T fill = T(0))
      : name(std::move(n)), shape(std::move(s)) {
    values.assign(element_count(shape), fill);
  }

  static std::size_t element_count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t size() const { return values.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : size() / shape[0]; }

  T* row(std::size_t r) { return values.data() + r * cols(); }
  const T* row(std::size_t r) const { return values.data() + r * cols(); }

  std::span<T> span() { return values; }
  std::span<const T> span() const { return values; }

  void zero() { std::fill(values.begin(), values.end(), T(0)); }

  bool all_finite() const {
    for (const T v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.name = name;
    out.shape = shape;
    out.values.assign(values.begin(), values.end());
    return out;
  }
};

// Ordered collection of parameters; only trainable ones receive gradients.
template <typename T>
struct ParameterSet {
  std::vector<Tensor<T>> tensors;
  std::vector<bool> trainable;

  std::size_t add(Tensor<T> t, bool is_trainable = true) {
    tensors.push_back(std::move(t));
    trainable.push_back(is_trainable);
    return tensors.size() - 1;
  }

  Tensor<T>& operator[](std::size_t i) { return tensors[i]; }
  const Tensor<T>& operator[](std::size_t i) const { return tensors[i]; }
  std::size_t size() const { return tensors.size(); }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < tensors.size(); ++i)
      if (tensors[i].name == name) return i;
    throw DataError("no parameter named '" + name + "'");
  }

  std::size_t trainable_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < tensors.size(); ++i)
      if (trainable[i]) n += tensors[i].size();
    return n;
  }

  // Zero-filled twin with identical names and shapes.
  ParameterSet zeros_like() const {
    ParameterSet g;
    for (std::size_t i = 0; i < tensors.size(); ++i)
      g.add(Tensor<T>(tensors[i].name, tensors[i].shape), trainable[i]);
    return g;
  }

  void zero() {
    for (auto& t : tensors) t.zero();
  }

  template <typename U>
  ParameterSet<U> cast() const {
    ParameterSet<U> out;
    for (std::size_t i = 0; i < tensors.size(); ++i)
      out.add(tensors[i].template cast<U>(), trainable[i]);
    return out;
  }
};

}  // namespace cdac::nn
