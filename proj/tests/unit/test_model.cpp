#include <gtest/gtest.h>

#include <filesystem>

#include "cdac/corpus/synthetic.hpp"
#include "cdac/eval/experiment.hpp"
#include "cdac/eval/metrics.hpp"
#include "cdac/model/checkpoint.hpp"
#include "cdac/model/trainer.hpp"

using namespace cdac;
using namespace cdac::model;

namespace {

ModelConfig tiny_config(std::size_t window = 2) {
  ModelConfig c;
  c.context_window = window;
  c.word_embedding_dim = 8;
  c.pos_embedding_dim = 4;
  c.filters = 6;
  c.hidden_size = 12;
  c.max_len = 12;
  c.min_count = 1;
  c.bn_momentum = 0.9;  // running statistics settle within a few dozen steps
  return c;
}

// Human-human corpus whose label is fixed by a keyword in the utterance.
corpus::ConversationSet keyword_corpus(std::size_t n, std::uint64_t seed) {
  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"okay", "b"}, {"think", "sv"}, {"what", "qw"}, {"yes", "ny"}, {"bye", "fc"}};
  const std::vector<std::string> filler = {"the", "weather", "is", "very", "nice", "today",
                                           "my", "dog", "and", "cat"};
  std::mt19937_64 rng(seed);
  corpus::ConversationSet set;
  for (std::size_t c = 0; c < n; ++c) {
    corpus::Conversation conv;
    conv.conversation_id = "toy" + std::to_string(c);
    for (std::size_t t = 0; t < 12; ++t) {
      const auto& [key, da] = kinds[rng() % kinds.size()];
      std::string text = filler[rng() % filler.size()] + " " + key;
      for (int k = 0; k < 2; ++k) text += " " + filler[rng() % filler.size()];
      corpus::Utterance u;
      u.turn_index = t;
      u.speaker = t % 2 ? corpus::Speaker::caller_b : corpus::Speaker::caller_a;
      u.text = text;
      u.da = da;
      conv.turns.push_back(u);
    }
    set.push_back(std::move(conv));
  }
  return set;
}

BuildOptions tiny_build(std::uint64_t seed = 3, std::size_t window = 2) {
  BuildOptions b;
  b.config = tiny_config(window);
  b.seed = seed;
  b.topics = corpus::TopicVocab::from_file(corpus::data_dir() + "/topics.txt");
  b.lexicon_tagger = features::LexiconTagger::from_file(corpus::data_dir() + "/pos_lexicon.tsv");
  return b;
}

TrainingConfig quick_training(std::size_t epochs) {
  TrainingConfig t;
  t.max_epochs = epochs;
  t.batch_size = 16;
  t.learning_rate = 5e-3;
  t.seed = 11;
  return t;
}

struct Trained {
  corpus::ConversationSet train, validation;
  CdacModel model;
  TrainingHistory history;
};

const Trained& trained_toy() {
  static const Trained t = [] {
    Trained r;
    r.train = keyword_corpus(24, 1);
    r.validation = keyword_corpus(6, 2);
    r.model = build_model(r.train, tiny_build());
    r.history = train(r.model, r.train, r.validation, quick_training(5));
    return r;
  }();
  return t;
}

}  // namespace

TEST(EarlyStop, PatienceRule) {
  EarlyStopper s(3);
  const double acc[] = {0.5, 0.6, 0.7, 0.65, 0.6, 0.55, 0.5};
  std::size_t stopped_at = 0;
  for (std::size_t e = 1; e <= 7; ++e) {
    s.update(e, acc[e - 1]);
    if (s.should_stop()) {
      stopped_at = e;
      break;
    }
  }
  EXPECT_EQ(stopped_at, 6u);  // best at epoch 3, three non-improving epochs
  EXPECT_EQ(s.best_epoch(), 3u);
  EarlyStopper ties(2);
  ties.update(1, 0.5);
  ties.update(2, 0.5);  // equal is not an improvement
  ties.update(3, 0.5);
  EXPECT_TRUE(ties.should_stop());
}

TEST(Trainer, KeywordCorpusIsLearned) {
  const auto& t = trained_toy();
  EXPECT_EQ(t.history.epochs.size(), 5u);
  const auto p = predict_labeled(t.model, t.train);
  EXPECT_GE(eval::micro_accuracy(p.predicted, p.gold), 0.95);
}

TEST(Trainer, SeedDeterminism) {
  const auto& t = trained_toy();
  auto again = build_model(t.train, tiny_build());
  auto h = train(again, t.train, t.validation, quick_training(5));
  EXPECT_EQ(h.losses(), t.history.losses());
  EXPECT_EQ(serialize_checkpoint(again), serialize_checkpoint(t.model));
  auto other = build_model(t.train, tiny_build());
  auto tc = quick_training(2);
  tc.seed = 12;
  auto h2 = train(other, t.train, t.validation, tc);
  EXPECT_NE(h2.losses()[1], t.history.losses()[1]);
}

TEST(Trainer, KeepsBestValidationEpoch) {
  const auto& t = trained_toy();
  ASSERT_TRUE(t.history.best_validation_accuracy);
  const auto p = predict_labeled(t.model, t.validation);
  EXPECT_DOUBLE_EQ(eval::micro_accuracy(p.predicted, p.gold), *t.history.best_validation_accuracy);
}

TEST(Trainer, UnknownLabelIsDataError) {
  const auto& t = trained_toy();
  auto bad = t.validation;
  bad[0].turns[0].da = "not-a-label";
  auto m = t.model;
  EXPECT_THROW(train(m, t.train, bad, quick_training(1)), DataError);
}

TEST(Causality, FutureEditsNeverChangePast) {
  const auto& t = trained_toy();
  const auto& conv = t.validation[0];
  const auto base = predict_conversation(t.model, conv);
  for (std::size_t cut = 0; cut + 1 < conv.turns.size(); ++cut) {
    auto edited = conv;
    for (std::size_t k = cut + 1; k < edited.turns.size(); ++k)
      edited.turns[k].text = "what completely different words okay";
    const auto p = predict_conversation(t.model, edited);
    for (std::size_t i = 0; i <= cut; ++i) {
      EXPECT_EQ(p[i].label, base[i].label);
      EXPECT_EQ(p[i].probs, base[i].probs);
    }
  }
}

TEST(Causality, StreamingSessionMatchesBatch) {
  const auto& t = trained_toy();
  const auto& conv = t.validation[1];
  PredictionSession s(t.model);
  const auto batch = predict_conversation(t.model, conv);
  for (std::size_t i = 0; i < conv.turns.size(); ++i) {
    auto p = s.push(conv.turns[i], nullptr);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->probs, batch[i].probs);
  }
}

TEST(Checkpoint, RoundTripIsBitIdentical) {
  const auto& t = trained_toy();
  const auto path = (std::filesystem::temp_directory_path() / "cdac_test.ckpt").string();
  save_checkpoint(t.model, path);
  const auto loaded = load_checkpoint(path);
  std::filesystem::remove(path);
  std::size_t compared = 0;
  for (const auto& c : t.validation) {
    const auto a = predict_conversation(t.model, c), b = predict_conversation(loaded, c);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].probs, b[i].probs);
    compared += a.size();
  }
  EXPECT_GE(compared, 10u);
  EXPECT_EQ(serialize_checkpoint(loaded), serialize_checkpoint(t.model));
}

TEST(Checkpoint, CorruptionAndVersionErrors) {
  const auto& t = trained_toy();
  const auto bytes = serialize_checkpoint(t.model);
  auto bad_magic = bytes;
  bad_magic[0] ^= 0x1;
  try {
    deserialize_checkpoint(bad_magic);
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_EQ(e.reason(), CheckpointError::Reason::corrupt);
  }
  auto future = bytes;
  future[8] = static_cast<char>(kCheckpointVersion + 1);
  try {
    deserialize_checkpoint(future);
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_EQ(e.reason(), CheckpointError::Reason::unsupported_version);
  }
  auto flipped = bytes;
  flipped[bytes.size() - 10] ^= 0x40;
  EXPECT_THROW(deserialize_checkpoint(flipped), CheckpointError);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() / 2)), CheckpointError);
}

TEST(Finetune, ZeroEpochsIsNoOpAndHighRateWarns) {
  const auto& t = trained_toy();
  auto hm = corpus::generate_synthetic_hm(
      6, corpus::read_distribution(corpus::data_dir() + "/hm_distribution.json"),
      corpus::TopicVocab::from_file(corpus::data_dir() + "/topics.txt"), 4);
  auto m = t.model;
  auto cfg = default_finetune_config();
  cfg.max_epochs = 0;
  cfg.batch_size = 16;
  auto h = finetune(m, hm, {}, cfg);
  EXPECT_TRUE(h.epochs.empty());
  EXPECT_TRUE(h.warnings.empty());
  // Tokens new to the model are appended as copies of the UNK row.
  const auto& before = t.model.net.word_embedding();
  const auto& after = m.net.word_embedding();
  ASSERT_GT(m.vocab.size(), t.model.vocab.size());
  EXPECT_TRUE(std::equal(before.values.begin(), before.values.end(), after.values.begin()));
  for (std::size_t id = t.model.vocab.size(); id < m.vocab.size(); ++id)
    EXPECT_TRUE(std::equal(after.row(id), after.row(id) + after.cols(),
                           after.row(features::Vocabulary::kUnk)));
  // The toy model never saw system states, so only its state columns in the
  // FC layer change, and they change to zero.
  EXPECT_TRUE(m.provenance.at("finetune_neutralized_ssi").get<bool>());
  std::size_t zeroed = 0;
  for (std::size_t i = 0; i < m.net.params.tensors.size(); ++i) {
    const auto& a = m.net.params.tensors[i];
    const auto& b = t.model.net.params.tensors[i];
    if (a.name == "word.embedding") continue;
    if (a.name != "fc.weight") {
      EXPECT_EQ(a.values, b.values) << a.name;
      continue;
    }
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      if (a.values[k] == b.values[k]) continue;
      EXPECT_EQ(a.values[k], 0.0f);
      ++zeroed;
    }
  }
  EXPECT_GT(zeroed, 0u);
  // Predictions are masked to the human-machine labels after fine-tuning.
  for (const auto& p : predict_conversation(m, hm[0])) {
    const auto& label = m.tagset.label(p.label);
    const auto hml = corpus::TagSet::human_machine_labels();
    EXPECT_NE(std::find(hml.begin(), hml.end(), label), hml.end());
  }
  auto loud = default_finetune_config();
  loud.learning_rate = 1e-3;
  loud.max_epochs = 0;
  auto m2 = t.model;
  EXPECT_FALSE(finetune(m2, hm, {}, loud).warnings.empty());
}

TEST(Experiment, FullCellMatchesPlainRun) {
  corpus::Splits s;
  s.train = keyword_corpus(12, 5);
  s.validation = keyword_corpus(3, 6);
  s.test = keyword_corpus(3, 7);
  const auto run = eval::cdac_runner(s, tiny_build(), quick_training(2));
  eval::AblationPlan plan;
  plan.context_window = 2;
  plan.seeds = {21};
  const auto cells = eval::run_ablation(run, tiny_config(2), plan);
  EXPECT_DOUBLE_EQ(eval::full_cell(cells).mean_accuracy, run(tiny_config(2), 21).accuracy);
  for (const auto& c : cells) EXPECT_EQ(c.parameter_count, cells[0].parameter_count);
  const auto rows = eval::context_sweep(run, tiny_config(), {0}, {21});
  EXPECT_DOUBLE_EQ(rows[0].mean_accuracy, run(tiny_config(0), 21).accuracy);
}
