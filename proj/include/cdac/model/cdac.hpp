#pragma once

// The contextual classifier: utterance-level network plus everything needed
// to turn raw conversations into its inputs, and causal conversation-level
// prediction.

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdac/corpus/tagset.hpp"
#include "cdac/corpus/types.hpp"
#include "cdac/error.hpp"
#include "cdac/features/embeddings.hpp"
#include "cdac/features/normalizer.hpp"
#include "cdac/features/pos.hpp"
#include "cdac/features/vocabulary.hpp"
#include "cdac/model/config.hpp"
#include "cdac/model/context.hpp"
#include "cdac/model/featurizer.hpp"
#include "cdac/model/network.hpp"

namespace cdac::model {

enum class TaggerKind { lexicon, pass_through };

NLOHMANN_JSON_SERIALIZE_ENUM(TaggerKind, {{TaggerKind::lexicon, "lexicon"},
                                          {TaggerKind::pass_through, "pass_through"}})

class CdacModel {
 public:
  ModelConfig config;
  corpus::TagSet tagset;
  corpus::TopicVocab topics;
  features::Vocabulary vocab;
  features::FeatureNormalizer normalizer;
  TaggerKind tagger_kind = TaggerKind::lexicon;
  features::LexiconTagger lexicon_tagger;
  features::Embeddings item_vectors{300};
  // Output classes considered at prediction time; empty means all.
  std::vector<std::size_t> allowed_labels;
  DacNetwork<float> net;
  nlohmann::json provenance = nlohmann::json::object();

  const features::PosTagger& tagger() const {
    if (tagger_kind == TaggerKind::pass_through) return pass_through_;
    return lexicon_tagger;
  }

  Featurizer featurizer() const {
    return Featurizer(vocab, tagger(), topics, item_vectors, config.max_len, &normalizer);
  }

  std::size_t predict_label(std::span<const float> probs) const {
    if (allowed_labels.empty())
      return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) -
                                      probs.begin());
    std::size_t best = allowed_labels.front();
    for (auto c : allowed_labels)
      if (probs[c] > probs[best]) best = c;
    return best;
  }

  // Restricts predictions to `labels`, which must all be in the tag set.
  void restrict_labels(const std::vector<std::string>& labels) {
    allowed_labels.clear();
    for (const auto& l : labels) {
      if (!tagset.contains(l))
        throw DataError("label '" + l + "' is not in the model's tag set");
      allowed_labels.push_back(tagset.id(l));
    }
    std::sort(allowed_labels.begin(), allowed_labels.end());
  }

 private:
  features::PassThroughTagger pass_through_;
};

// Labels of eligible turns that carry gold annotations, in order.
inline std::vector<std::size_t> gold_ids(const corpus::Conversation& c,
                                         const corpus::TagSet& tagset) {
  std::vector<std::size_t> out;
  for (const auto& u : c.turns)
    if (corpus::is_eligible(u) && u.da) out.push_back(tagset.id(*u.da));
  return out;
}

struct BuildOptions {
  ModelConfig config;
  corpus::TagSet tagset = corpus::TagSet::swda42();
  corpus::TopicVocab topics;
  TaggerKind tagger_kind = TaggerKind::lexicon;
  features::LexiconTagger lexicon_tagger;
  const features::Embeddings* pretrained = nullptr;
  std::uint64_t seed = 7;
};

// Restricts human-machine models to the annotated human-machine label subset.
inline void apply_label_policy(CdacModel& m, const corpus::ConversationSet& train) {
  const bool hm = std::any_of(train.begin(), train.end(),
                              [](const auto& c) { return c.human_machine(); });
  m.allowed_labels.clear();
  if (!hm) return;
  std::vector<std::string> labels;
  for (const auto& l : corpus::TagSet::human_machine_labels())
    if (m.tagset.contains(l)) labels.push_back(l);
  m.restrict_labels(labels);
}

// Vocabulary, normalizer, item-vector table and freshly initialized network,
// all estimated from the training split only.
inline CdacModel build_model(const corpus::ConversationSet& train, BuildOptions opt) {
  if (corpus::count_utterances(train) == 0) throw DataError("empty training set");
  CdacModel m;
  m.config = opt.config;
  m.config.num_classes = opt.tagset.size();
  m.config.topic_vocab_size = opt.topics.size();
  m.config.validate();
  m.tagset = std::move(opt.tagset);
  m.topics = std::move(opt.topics);
  m.tagger_kind = opt.tagger_kind;
  m.lexicon_tagger = std::move(opt.lexicon_tagger);

  std::vector<std::vector<std::string>> docs;
  std::set<std::string> item_tokens;
  for (const auto& c : train) {
    for (std::size_t i = 0; i < c.turns.size(); ++i) {
      if (corpus::is_eligible(c.turns[i])) docs.push_back(features::tokenize(c.turns[i].text));
      if (c.states && (*c.states)[i].suggested_item)
        for (auto& t : features::tokenize(*(*c.states)[i].suggested_item)) item_tokens.insert(t);
    }
  }
  m.vocab = features::Vocabulary::build(docs, m.config.min_count);

  m.item_vectors = features::Embeddings(m.config.word_embedding_dim);
  if (opt.pretrained) {
    if (opt.pretrained->dim() != m.config.word_embedding_dim)
      throw DataError("embedding dimension " + std::to_string(opt.pretrained->dim()) +
                      " does not match configured " +
                      std::to_string(m.config.word_embedding_dim));
    auto keep = [&](const std::string& t) {
      auto v = opt.pretrained->find(t);
      if (!v.empty()) m.item_vectors.set(t, std::vector<float>(v.begin(), v.end()));
    };
    for (const auto& t : m.vocab.tokens()) keep(t);
    for (const auto& t : item_tokens) keep(t);
  }

  // Lexical statistics over eligible training turns.
  {
    Featurizer raw(m.vocab, m.tagger(), m.topics, m.item_vectors, m.config.max_len, nullptr);
    std::vector<std::array<double, features::kLexicalDim>> rows;
    for (const auto& c : train) {
      FeaturizerState st;
      for (std::size_t i = 0; i < c.turns.size(); ++i) {
        auto in = raw.featurize(c.turns[i], c.states ? &(*c.states)[i] : nullptr, st);
        if (corpus::is_eligible(c.turns[i])) rows.push_back(in.lexical_raw);
      }
    }
    m.normalizer = features::FeatureNormalizer::fit(rows);
  }

  m.net = DacNetwork<float>(m.config, m.vocab.size(), features::PosVocabulary().size(),
                            opt.seed);
  if (opt.pretrained) {
    auto& emb = m.net.word_embedding();
    for (std::size_t id = 2; id < m.vocab.size(); ++id) {
      auto v = opt.pretrained->find(m.vocab.token(id));
      if (!v.empty()) std::copy(v.begin(), v.end(), emb.row(id));
    }
  }
  apply_label_policy(m, train);
  m.provenance["build_seed"] = opt.seed;
  m.provenance["train_conversations"] = train.size();
  m.provenance["trained_with_states"] =
      std::any_of(train.begin(), train.end(), [](const auto& c) { return c.human_machine(); });
  return m;
}

// Adapts a model to a new domain before fine-tuning. Tokens reaching the
// vocabulary's min_count in `train` are appended: their rows start from the
// pretrained vector when one exists, else as copies of the UNK row, so they
// behave like UNK until trained. Suggested items gain pretrained vectors.
// Returns the number of tokens added.
inline std::size_t extend_vocabulary(CdacModel& m, const corpus::ConversationSet& train,
                                     const features::Embeddings* pretrained = nullptr) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& c : train)
    for (std::size_t i = 0; i < c.turns.size(); ++i) {
      if (corpus::is_eligible(c.turns[i])) docs.push_back(features::tokenize(c.turns[i].text));
      if (pretrained && c.states && (*c.states)[i].suggested_item)
        for (const auto& t : features::tokenize(*(*c.states)[i].suggested_item)) {
          auto v = pretrained->find(t);
          if (!v.empty() && m.item_vectors.find(t).empty())
            m.item_vectors.set(t, std::vector<float>(v.begin(), v.end()));
        }
    }
  const auto fresh = features::Vocabulary::build(docs, m.vocab.min_count());
  const std::size_t old_size = m.vocab.size();
  const std::size_t added = m.vocab.extend(fresh.tokens());
  if (added == 0) return 0;
  auto& emb = m.net.word_embedding();
  const std::size_t dim = emb.cols();
  const std::vector<float> unk(emb.row(features::Vocabulary::kUnk),
                               emb.row(features::Vocabulary::kUnk) + dim);
  emb.values.resize((old_size + added) * dim);
  emb.shape[0] = old_size + added;
  for (std::size_t id = old_size; id < m.vocab.size(); ++id) {
    auto v = pretrained ? pretrained->find(m.vocab.token(id)) : std::span<const float>{};
    if (v.size() == dim)
      std::copy(v.begin(), v.end(), emb.row(id));
    else
      std::copy(unk.begin(), unk.end(), emb.row(id));
  }
  return added;
}

// A model trained without system states has only ever seen zeros in the
// topic, suggested-topic and suggested-item inputs, so their FC weights are
// untouched random values. Zeroing them before training on data with states
// lets the newly populated inputs start neutral. Returns true if applied.
inline bool neutralize_unseen_ssi(CdacModel& m, const corpus::ConversationSet& train) {
  const auto it = m.provenance.find("trained_with_states");
  if (it == m.provenance.end() || !it->is_boolean() || it->get<bool>()) return false;
  if (std::none_of(train.begin(), train.end(), [](const auto& c) { return c.human_machine(); }))
    return false;
  const auto& c = m.config;
  const std::size_t in = c.fc_input_dim(), t = c.topic_vocab_size, dim = c.word_embedding_dim;
  const std::size_t ssi = 2 * c.pipeline_width() + c.lexical_dim;
  auto& w = m.net.params[m.net.params.index_of("fc.weight")];
  for (std::size_t h = 0; h < c.hidden_size; ++h) {
    float* row = w.values.data() + h * in + ssi;
    std::fill_n(row, 2 * t, 0.0f);           // topic, suggested topic (not "none")
    std::fill_n(row + 2 * t + 1, dim, 0.0f);  // suggested item
  }
  m.provenance["trained_with_states"] = true;
  return true;
}

struct TurnPrediction {
  std::size_t turn_index = 0;
  std::size_t label = 0;
  std::vector<float> probs;
};

// Causal per-conversation prediction: turns must arrive in order; each
// eligible turn is classified from its own features and the context built
// from earlier predictions only.
class PredictionSession {
 public:
  explicit PredictionSession(const CdacModel& model)
      : model_(&model), featurizer_(model.featurizer()),
        context_(model.config.context_window, model.config.num_classes) {}

  std::optional<TurnPrediction> push(const corpus::Utterance& u,
                                     const corpus::SystemState* state) {
    auto input = featurizer_.featurize(u, state, state_);
    const std::size_t index = next_turn_++;
    if (!corpus::is_eligible(u)) return std::nullopt;
    const auto ctx = context_.vector<float>();
    TurnPrediction p;
    p.turn_index = index;
    p.probs = model_->net.predict(input, ctx);
    p.label = model_->predict_label(p.probs);
    if (model_->config.context_representation == ContextRepresentation::soft)
      context_.push_distribution(p.probs);
    else
      context_.push_label(p.label);
    return p;
  }

  std::size_t turns_seen() const { return next_turn_; }

 private:
  const CdacModel* model_;
  Featurizer featurizer_;
  FeaturizerState state_;
  ContextState context_;
  std::size_t next_turn_ = 0;
};

inline std::vector<TurnPrediction> predict_conversation(const CdacModel& model,
                                                        const corpus::Conversation& c) {
  PredictionSession session(model);
  std::vector<TurnPrediction> out;
  for (std::size_t i = 0; i < c.turns.size(); ++i)
    if (auto p = session.push(c.turns[i], c.states ? &(*c.states)[i] : nullptr))
      out.push_back(std::move(*p));
  return out;
}

// Gold and predicted ids over every labeled eligible turn of a set.
struct PredictionPairs {
  std::vector<std::size_t> gold, predicted;
};

inline PredictionPairs predict_labeled(const CdacModel& model,
                                       const corpus::ConversationSet& set) {
  PredictionPairs out;
  for (const auto& c : set) {
    auto preds = predict_conversation(model, c);
    for (const auto& p : preds) {
      const auto& u = c.turns[p.turn_index];
      if (!u.da) continue;
      out.gold.push_back(model.tagset.id(*u.da));
      out.predicted.push_back(p.label);
    }
  }
  return out;
}

}  // namespace cdac::model
