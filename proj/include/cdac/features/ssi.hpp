#pragma once

#include <optional>
#include <vector>

#include "cdac/corpus/tagset.hpp"
#include "cdac/corpus/types.hpp"
#include "cdac/features/embeddings.hpp"
#include "cdac/features/tokenize.hpp"

namespace cdac::features {

struct SSIFeatures {
  std::vector<float> topic_one_hot;            // F8, |topics|
  std::vector<float> suggested_topic_one_hot;  // F9, |topics| + 1 (last = none)
  std::vector<float> suggested_item_embedding; // F10, word-vector dim
  std::vector<float> speaker_indicator;        // F11, 2

  std::vector<float> to_vector() const {
    std::vector<float> v;
    v.reserve(size());
    for (const auto* block : {&topic_one_hot, &suggested_topic_one_hot,
                              &suggested_item_embedding, &speaker_indicator})
      v.insert(v.end(), block->begin(), block->end());
    return v;
  }
  std::size_t size() const {
    return topic_one_hot.size() + suggested_topic_one_hot.size() +
           suggested_item_embedding.size() + speaker_indicator.size();
  }
};

inline std::size_t ssi_dim(std::size_t n_topics, std::size_t item_dim) {
  return n_topics + (n_topics + 1) + item_dim + 2;
}

// Mean vector of the item's word tokens that have vectors; zero if none do.
inline std::vector<float> item_embedding(const std::string& item,
                                         const WordVectorLookup& vectors) {
  std::vector<float> sum(vectors.dim(), 0.0f);
  std::size_t found = 0;
  for (const auto& tok : tokenize(item)) {
    if (!is_word_token(tok)) continue;
    auto v = vectors.find(tok);
    if (v.empty()) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
    ++found;
  }
  if (found > 1)
    for (auto& x : sum) x /= static_cast<float>(found);
  return sum;
}

// Without a state (human-human data) the topic blocks are zero apart from the
// "none" slot of the suggested-topic block.
inline SSIFeatures extract_ssi(const corpus::SystemState* state, corpus::Speaker speaker,
                               const corpus::TopicVocab& topics,
                               const WordVectorLookup& vectors) {
  const std::size_t t = topics.size();
  SSIFeatures f;
  f.topic_one_hot.assign(t, 0.0f);
  f.suggested_topic_one_hot.assign(t + 1, 0.0f);
  f.suggested_item_embedding.assign(vectors.dim(), 0.0f);
  f.speaker_indicator.assign(2, 0.0f);
  const bool first_party =
      speaker == corpus::Speaker::caller_a || speaker == corpus::Speaker::user;
  f.speaker_indicator[first_party ? 0 : 1] = 1.0f;
  if (!state) {
    f.suggested_topic_one_hot[t] = 1.0f;
    return f;
  }
  f.topic_one_hot[topics.id(state->topic)] = 1.0f;
  if (state->suggested_topic)
    f.suggested_topic_one_hot[topics.id(*state->suggested_topic)] = 1.0f;
  else
    f.suggested_topic_one_hot[t] = 1.0f;
  if (state->previous_topic) (void)topics.id(*state->previous_topic);
  if (state->suggested_item)
    f.suggested_item_embedding = item_embedding(*state->suggested_item, vectors);
  return f;
}

}  // namespace cdac::features
