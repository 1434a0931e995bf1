#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdac/baselines/sparse.hpp"
#include "cdac/corpus/tagset.hpp"
#include "cdac/corpus/types.hpp"

namespace cdac::baselines {

struct ContextAugmentation {
  std::size_t window = 3;
  bool previous = true;
  bool ssi = true;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ContextAugmentation, window, previous, ssi)

// Block widths of the augmented space. A disabled block has width zero; an
// enabled block with no available context is all-zero at its full width.
struct AugmentedLayout {
  std::size_t tfidf = 0;
  std::size_t previous = 0;
  std::size_t ssi = 0;

  static AugmentedLayout make(std::size_t tfidf_dim, std::size_t n_topics,
                              const ContextAugmentation& cfg) {
    AugmentedLayout l;
    l.tfidf = tfidf_dim;
    l.previous = cfg.previous && cfg.window > 0 ? tfidf_dim : 0;
    // topic one-hot, suggested topic one-hot with "none" slot, has-item flag
    l.ssi = cfg.ssi ? n_topics + (n_topics + 1) + 1 : 0;
    return l;
  }

  std::size_t dim() const { return tfidf + previous + ssi; }
};

// Sum of the given tf-idf vectors, re-normalized to unit length.
inline SparseVector pool(std::span<const SparseVector> docs) {
  std::map<std::uint32_t, double> sum;
  for (const auto& d : docs)
    for (std::size_t k = 0; k < d.nnz(); ++k) sum[d.index[k]] += d.value[k];
  SparseVector v;
  for (const auto& [i, x] : sum)
    if (x != 0.0) v.push(i, x);
  const double n = v.norm();
  if (n > 0)
    for (auto& x : v.value) x /= n;
  return v;
}

// `previous_docs` are the tf-idf vectors of the preceding eligible turns of
// the conversation, oldest first; only the last `window` are pooled.
inline SparseVector augment_context(const SparseVector& doc,
                                    std::span<const SparseVector> previous_docs,
                                    const corpus::SystemState* state,
                                    const corpus::TopicVocab& topics,
                                    const ContextAugmentation& cfg,
                                    const AugmentedLayout& layout) {
  SparseVector out = doc;
  if (layout.previous > 0) {
    const std::size_t n = std::min(cfg.window, previous_docs.size());
    append_block(out, pool(previous_docs.subspan(previous_docs.size() - n)),
                 static_cast<std::uint32_t>(layout.tfidf));
  }
  if (layout.ssi > 0) {
    const auto base = static_cast<std::uint32_t>(layout.tfidf + layout.previous);
    const auto t = static_cast<std::uint32_t>(topics.size());
    // Unit L2 norm, like the text blocks, so no block dominates by scale.
    const bool item = state && state->suggested_item;
    const double v = 1.0 / std::sqrt((state ? 2.0 : 1.0) + (item ? 1.0 : 0.0));
    if (state) out.push(base + static_cast<std::uint32_t>(topics.id(state->topic)), v);
    const std::uint32_t sug =
        state && state->suggested_topic
            ? static_cast<std::uint32_t>(topics.id(*state->suggested_topic))
            : t;
    out.push(base + t + sug, v);
    if (item) out.push(base + t + t + 1, v);
  }
  return out;
}

}  // namespace cdac::baselines
