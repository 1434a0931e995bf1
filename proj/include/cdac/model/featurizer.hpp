#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cdac/corpus/tagset.hpp"
#include "cdac/corpus/types.hpp"
#include "cdac/features/embeddings.hpp"
#include "cdac/features/lexical.hpp"
#include "cdac/features/normalizer.hpp"
#include "cdac/features/pos.hpp"
#include "cdac/features/ssi.hpp"
#include "cdac/features/tokenize.hpp"
#include "cdac/features/vocabulary.hpp"

namespace cdac::model {

// SSI block in compact form; expands to the dense F8..F11 layout.
struct CompactSsi {
  int topic = -1;      // -1: no state
  int suggested = -1;  // -1: "none" slot
  std::vector<float> item;  // empty: zero vector
  int speaker_slot = 0;

  template <typename T>
  void write_dense(std::span<T> out, std::size_t n_topics, std::size_t item_dim) const {
    std::fill(out.begin(), out.end(), T(0));
    if (topic >= 0) out[static_cast<std::size_t>(topic)] = T(1);
    const std::size_t sug = n_topics;
    out[sug + (suggested >= 0 ? static_cast<std::size_t>(suggested) : n_topics)] = T(1);
    const std::size_t item_off = sug + n_topics + 1;
    for (std::size_t i = 0; i < item.size() && i < item_dim; ++i)
      out[item_off + i] = static_cast<T>(item[i]);
    out[item_off + item_dim + static_cast<std::size_t>(speaker_slot)] = T(1);
  }
};

// Everything the utterance-level network needs for one turn, except context.
struct DacInput {
  std::vector<int> token_ids;  // max_len, PAD-padded
  std::size_t length = 0;
  std::vector<int> pos_ids;    // max_len, aligned with token_ids
  std::array<double, features::kLexicalDim> lexical_raw{};
  std::array<double, features::kLexicalDim> lexical{};  // normalized
  CompactSsi ssi;
};

// Per-conversation running state (speaker histories for F4/F5).
struct FeaturizerState {
  std::map<corpus::Speaker, std::vector<features::LexicalFeatures>> history;
};

class Featurizer {
 public:
  Featurizer(const features::Vocabulary& vocab, const features::PosTagger& tagger,
             const corpus::TopicVocab& topics, const features::WordVectorLookup& item_vectors,
             std::size_t max_len, const features::FeatureNormalizer* normalizer)
      : vocab_(vocab), tagger_(tagger), topics_(topics), items_(item_vectors),
        max_len_(max_len), normalizer_(normalizer) {}

  // Consumes one turn (eligible or not) and returns its input.
  DacInput featurize(const corpus::Utterance& u, const corpus::SystemState* state,
                     FeaturizerState& st) const {
    DacInput in;
    const auto tokens = features::tokenize(u.text);
    auto vec = features::vectorize(tokens, vocab_, max_len_);
    in.token_ids = std::move(vec.ids);
    in.length = vec.length;
    in.pos_ids.assign(max_len_, features::PosVocabulary::kPad);
    const auto tags = tagger_.tag(tokens, u.pos);
    for (std::size_t i = 0; i < in.length; ++i) in.pos_ids[i] = pos_vocab_.id(tags[i]);

    auto& hist = st.history[u.speaker];
    const auto lex = features::extract_lexical(u.text, hist);
    hist.push_back(lex);
    in.lexical_raw = lex.to_array();
    in.lexical = normalizer_ ? normalizer_->apply(in.lexical_raw) : in.lexical_raw;

    const bool first_party =
        u.speaker == corpus::Speaker::caller_a || u.speaker == corpus::Speaker::user;
    in.ssi.speaker_slot = first_party ? 0 : 1;
    if (state) {
      in.ssi.topic = static_cast<int>(topics_.id(state->topic));
      if (state->suggested_topic)
        in.ssi.suggested = static_cast<int>(topics_.id(*state->suggested_topic));
      if (state->previous_topic) (void)topics_.id(*state->previous_topic);
      if (state->suggested_item) {
        in.ssi.item = features::item_embedding(*state->suggested_item, items_);
        if (std::all_of(in.ssi.item.begin(), in.ssi.item.end(),
                        [](float v) { return v == 0.0f; }))
          in.ssi.item.clear();
      }
    }
    return in;
  }

  // Inputs for every turn of a conversation, in order.
  std::vector<DacInput> featurize_all(const corpus::Conversation& c) const {
    FeaturizerState st;
    std::vector<DacInput> out;
    out.reserve(c.turns.size());
    for (std::size_t i = 0; i < c.turns.size(); ++i)
      out.push_back(featurize(c.turns[i], c.states ? &(*c.states)[i] : nullptr, st));
    return out;
  }

  std::size_t max_len() const { return max_len_; }

 private:
  const features::Vocabulary& vocab_;
  const features::PosTagger& tagger_;
  const corpus::TopicVocab& topics_;
  const features::WordVectorLookup& items_;
  std::size_t max_len_;
  const features::FeatureNormalizer* normalizer_;
  features::PosVocabulary pos_vocab_;
};

}  // namespace cdac::model
