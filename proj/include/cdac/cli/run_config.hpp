#pragma once

// Flat user-facing tunables shared by the CLI subcommands. Values come from
// built-in defaults, then an optional JSON config file, then flags.

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdac/corpus/splits.hpp"
#include "cdac/error.hpp"
#include "cdac/model/config.hpp"

namespace cdac::cli {

struct RunConfig {
  std::size_t context_window = 3;
  double learning_rate = 1e-3;
  double finetune_learning_rate = 1e-4;
  std::size_t batch_size = 64;
  double dropout = 0.5;
  std::size_t embedding_dim = 300;
  std::size_t pos_embedding_dim = 50;
  std::size_t max_len = 60;
  std::size_t hidden_size = 100;
  std::size_t filters = 100;
  std::size_t min_count = 2;
  std::size_t max_epochs = 30;
  std::size_t patience = 3;
  double scheduled_sampling = 0.0;
  model::ContextRepresentation context_representation = model::ContextRepresentation::one_hot;
  bool use_lexical = true;
  bool use_syntactic = true;
  // Splits for corpora without validation partitions.
  double validation_fraction = 0.1;
  double test_fraction = 0.2;
  std::size_t official_validation_size = 115;
  std::uint64_t seed = 7;

  model::ModelConfig model_config() const {
    model::ModelConfig m;
    m.context_window = context_window;
    m.dropout = dropout;
    m.word_embedding_dim = embedding_dim;
    m.pos_embedding_dim = pos_embedding_dim;
    m.max_len = max_len;
    m.hidden_size = hidden_size;
    m.filters = filters;
    m.min_count = min_count;
    m.context_representation = context_representation;
    m.use_lexical = use_lexical;
    m.use_syntactic = use_syntactic;
    return m;
  }

  model::TrainingConfig training_config(bool finetune = false) const {
    model::TrainingConfig t;
    t.learning_rate = finetune ? finetune_learning_rate : learning_rate;
    t.batch_size = batch_size;
    t.max_epochs = max_epochs;
    t.patience = patience;
    t.seed = seed;
    t.scheduled_sampling = scheduled_sampling;
    return t;
  }

  void validate() const {
    model_config().validate();
    training_config().validate();
    if (!(finetune_learning_rate > 0)) throw UsageError("finetune_learning_rate must be positive");
    if (validation_fraction < 0 || test_fraction < 0 || validation_fraction + test_fraction >= 1)
      throw UsageError("split fractions must be non-negative and sum below 1");
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    RunConfig, context_window, learning_rate, finetune_learning_rate, batch_size, dropout,
    embedding_dim, pos_embedding_dim, max_len, hidden_size, filters, min_count, max_epochs,
    patience, scheduled_sampling, context_representation, use_lexical, use_syntactic,
    validation_fraction, test_fraction, official_validation_size, seed)

// Reads a config file as raw JSON. Unknown keys are usage errors so a typo
// never silently falls back to a default.
inline nlohmann::json read_run_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object: " + path);
  const nlohmann::json known = RunConfig{};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw UsageError("unknown config key '" + key + "' in " + path);
  return j;
}

// Layers JSON patches over the defaults, in order.
inline RunConfig merge_run_config(const std::vector<nlohmann::json>& layers) {
  nlohmann::json j = RunConfig{};
  for (const auto& layer : layers) j.merge_patch(layer);
  try {
    auto cfg = j.get<RunConfig>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad run config value: ") + e.what());
  }
}

inline RunConfig load_run_config(const std::string& path) {
  return merge_run_config({read_run_config_file(path)});
}

// Official corpora carry train/test labels and get a validation carve-out;
// fully labelled corpora keep their partitions; anything else is split by
// fraction.
inline corpus::Splits resolve_splits(const corpus::ConversationSet& set, const RunConfig& cfg) {
  std::set<std::string> parts;
  bool all_labelled = !set.empty();
  for (const auto& c : set) {
    if (c.partition) parts.insert(*c.partition);
    else all_labelled = false;
  }
  if (all_labelled && parts.count("test") && !parts.count("validation") &&
      parts.size() == 2 && parts.count("train"))
    return corpus::make_official_splits(set, cfg.seed, cfg.official_validation_size);
  return corpus::splits_from_partitions_or(set, cfg.seed, cfg.validation_fraction,
                                           cfg.test_fraction);
}

inline const corpus::ConversationSet& split_named(const corpus::Splits& s, const std::string& name) {
  if (name == "train") return s.train;
  if (name == "validation") return s.validation;
  if (name == "test") return s.test;
  throw UsageError("unknown split '" + name + "' (expected train, validation or test)");
}

}  // namespace cdac::cli
