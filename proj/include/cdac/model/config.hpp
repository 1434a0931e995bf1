#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdac/error.hpp"
#include "cdac/features/lexical.hpp"
#include "cdac/features/ssi.hpp"

namespace cdac::model {

// How previous-turn predictions enter the context slots at inference.
enum class ContextRepresentation { one_hot, soft };

NLOHMANN_JSON_SERIALIZE_ENUM(ContextRepresentation,
                             {{ContextRepresentation::one_hot, "one_hot"},
                              {ContextRepresentation::soft, "soft"}})

struct ModelConfig {
  std::size_t num_classes = 42;
  std::size_t context_window = 3;
  std::size_t hidden_size = 100;
  double dropout = 0.5;
  std::size_t word_embedding_dim = 300;
  std::size_t pos_embedding_dim = 50;
  std::size_t max_len = 60;
  std::size_t topic_vocab_size = 0;
  std::size_t lexical_dim = features::kLexicalDim;
  std::size_t filters = 100;
  std::vector<std::size_t> kernel_sizes{1, 2, 3};
  double bn_momentum = 0.997;
  double bn_epsilon = 1e-5;
  std::size_t min_count = 2;
  // Ablation switches: a disabled group is fed as a zero block of the same
  // width, so the architecture does not change.
  bool use_lexical = true;
  bool use_syntactic = true;
  ContextRepresentation context_representation = ContextRepresentation::one_hot;

  std::size_t pipeline_width() const { return filters * kernel_sizes.size(); }
  std::size_t ssi_dim() const {
    return features::ssi_dim(topic_vocab_size, word_embedding_dim);
  }
  std::size_t context_dim() const { return context_window * num_classes; }
  std::size_t fc_input_dim() const {
    return 2 * pipeline_width() + lexical_dim + ssi_dim() + context_dim();
  }
  std::size_t max_kernel() const {
    std::size_t k = 1;
    for (auto s : kernel_sizes) k = std::max(k, s);
    return k;
  }

  void validate() const {
    if (num_classes < 2) throw UsageError("num_classes must be at least 2");
    if (lexical_dim != features::kLexicalDim)
      throw UsageError("lexical_dim must be " + std::to_string(features::kLexicalDim));
    if (dropout < 0.0 || dropout >= 1.0) throw UsageError("dropout must be in [0, 1)");
    if (max_len == 0 || hidden_size == 0 || filters == 0 || kernel_sizes.empty())
      throw UsageError("max_len, hidden_size, filters and kernel_sizes must be positive");
    for (auto k : kernel_sizes)
      if (k == 0) throw UsageError("kernel sizes must be positive");
    if (!(bn_momentum > 0.0 && bn_momentum < 1.0))
      throw UsageError("batch-norm momentum must be in (0, 1)");
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    ModelConfig, num_classes, context_window, hidden_size, dropout, word_embedding_dim,
    pos_embedding_dim, max_len, topic_vocab_size, lexical_dim, filters, kernel_sizes,
    bn_momentum, bn_epsilon, min_count, use_lexical, use_syntactic,
    context_representation)

struct TrainingConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 30;
  std::size_t patience = 3;
  std::uint64_t seed = 7;
  // Probability of replacing a gold context label by the model's own
  // prediction (0 = pure teacher forcing).
  double scheduled_sampling = 0.0;
  bool verbose = false;

  void validate() const {
    if (batch_size < 2)
      throw UsageError("batch_size must be at least 2 (batch normalization)");
    if (!(learning_rate > 0)) throw UsageError("learning_rate must be positive");
    if (scheduled_sampling < 0 || scheduled_sampling > 1)
      throw UsageError("scheduled_sampling must be in [0, 1]");
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainingConfig, learning_rate,
                                                batch_size, max_epochs, patience, seed,
                                                scheduled_sampling, verbose)

inline constexpr double kPretrainLearningRate = 1e-3;
inline constexpr double kFinetuneLearningRate = 1e-4;

inline TrainingConfig default_finetune_config() {
  TrainingConfig c;
  c.learning_rate = kFinetuneLearningRate;
  return c;
}

}  // namespace cdac::model
