#pragma once

#include <deque>
#include <span>
#include <vector>

#include "cdac/error.hpp"

namespace cdac::model {

// Last m per-turn DA vectors of one conversation; slot 0 is the most recent.
// Slots not yet filled read as zero vectors.
class ContextState {
 public:
  ContextState(std::size_t window, std::size_t num_classes)
      : window_(window), classes_(num_classes) {}

  std::size_t window() const { return window_; }
  std::size_t num_classes() const { return classes_; }
  std::size_t dim() const { return window_ * classes_; }
  std::size_t filled() const { return slots_.size(); }

  void push_label(std::size_t label) {
    if (label >= classes_) throw NumericError("context label out of range");
    std::vector<float> v(classes_, 0.0f);
    v[label] = 1.0f;
    push(std::move(v));
  }

  void push_distribution(std::span<const float> probs) {
    if (probs.size() != classes_) throw NumericError("context distribution size");
    push(std::vector<float>(probs.begin(), probs.end()));
  }

  // Unlabeled turn during teacher forcing: occupies a slot with zeros.
  void push_empty() { push(std::vector<float>(classes_, 0.0f)); }

  template <typename T>
  void write(std::span<T> out) const {
    if (out.size() != dim()) throw NumericError("context output size");
    std::fill(out.begin(), out.end(), T(0));
    for (std::size_t s = 0; s < slots_.size(); ++s)
      for (std::size_t c = 0; c < classes_; ++c)
        out[s * classes_ + c] = static_cast<T>(slots_[s][c]);
  }

  template <typename T>
  std::vector<T> vector() const {
    std::vector<T> out(dim());
    write(std::span<T>(out));
    return out;
  }

  void reset() { slots_.clear(); }

 private:
  void push(std::vector<float> v) {
    if (window_ == 0) return;
    slots_.push_front(std::move(v));
    if (slots_.size() > window_) slots_.pop_back();
  }

  std::size_t window_, classes_;
  std::deque<std::vector<float>> slots_;
};

}  // namespace cdac::model
