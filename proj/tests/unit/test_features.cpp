#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cdac/features/embeddings.hpp"
#include "cdac/features/lexical.hpp"
#include "cdac/features/normalizer.hpp"
#include "cdac/features/pos.hpp"
#include "cdac/features/ssi.hpp"
#include "cdac/features/tokenize.hpp"
#include "cdac/features/vocabulary.hpp"

using namespace cdac;
using namespace cdac::features;

using Tokens = std::vector<std::string>;

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("Do you have a dog?"), (Tokens{"do", "you", "have", "a", "dog", "?"}));
  EXPECT_TRUE(tokenize("").empty());
  auto t = tokenize("i want some recent music from drake");
  EXPECT_EQ(t.size(), 7u);
  EXPECT_EQ(count_word_tokens(t), 7u);
  EXPECT_EQ(tokenize("Hey,  there!!"), (Tokens{"hey", ",", "there", "!", "!"}));
}

TEST(Lexical, QuestionWithEmptyHistory) {
  auto f = extract_lexical("Do you have a dog?", {});
  EXPECT_EQ(f.word_count, 5);
  EXPECT_EQ(f.char_count, 18);
  EXPECT_EQ(f.sentence_count, 1);
  EXPECT_EQ(f.avg_word_count, 5.0);
  EXPECT_EQ(f.avg_char_count, 18.0);
  EXPECT_EQ(f.is_question, 1);
}

TEST(Lexical, EmptyAndRunningMean) {
  auto z = extract_lexical("", {});
  for (double v : z.to_array()) EXPECT_EQ(v, 0.0);
  std::vector<LexicalFeatures> history(2);
  history[0].word_count = 2;
  history[1].word_count = 4;
  auto f = extract_lexical("one two three", history);
  EXPECT_EQ(f.word_count, 3);
  EXPECT_DOUBLE_EQ(f.avg_word_count, 3.0);
  EXPECT_EQ(f.is_question, 0);
}

TEST(Lexical, SentenceRuns) {
  EXPECT_EQ(sentence_count("Hi. How are you?! Fine"), 2u);
  EXPECT_EQ(sentence_count("no punctuation"), 1u);
}

TEST(Pos, Taggers) {
  PassThroughTagger pass;
  EXPECT_TRUE(pass.tag({}, std::nullopt).empty());
  EXPECT_EQ(pass.tag({"i", "like"}, Tokens{"PRP", "VBP"}), (Tokens{"PRP", "VBP"}));
  EXPECT_THROW(pass.tag({"i"}, std::nullopt), DataError);
  EXPECT_THROW(pass.tag({"i", "x"}, Tokens{"PRP"}), DataError);

  LexiconTagger lex({{"the", "DT"}, {"dog", "NN"}});
  EXPECT_EQ(lex.tag({"the", "dog"}, std::nullopt), (Tokens{"DT", "NN"}));
  EXPECT_TRUE(lex.tag({}, std::nullopt).empty());
  EXPECT_EQ(lex.tag({"?"}, std::nullopt).size(), 1u);
}

TEST(Pos, VocabularyReservesPadAndUnk) {
  PosVocabulary v;
  EXPECT_EQ(v.id("NN") >= 2, true);
  EXPECT_EQ(v.id("not-a-tag"), PosVocabulary::kUnk);
}

TEST(Ssi, StateWithSuggestion) {
  corpus::TopicVocab topics({"Music", "Animal", "News", "Phatic"});
  corpus::SystemState s;
  s.topic = "Music";
  s.suggested_topic = "News";
  Embeddings none(4);
  auto f = extract_ssi(&s, corpus::Speaker::user, topics, none);
  EXPECT_EQ(f.topic_one_hot, (std::vector<float>{1, 0, 0, 0}));
  EXPECT_EQ(f.suggested_topic_one_hot, (std::vector<float>{0, 0, 1, 0, 0}));
  EXPECT_EQ(f.speaker_indicator, (std::vector<float>{1, 0}));
  EXPECT_EQ(f.size(), ssi_dim(4, 4));
}

TEST(Ssi, HumanHumanAndItemVector) {
  corpus::TopicVocab topics({"Music", "Animal"});
  Embeddings emb(3);
  emb.set("drake", {0.5f, -1.0f, 2.0f});
  auto hh = extract_ssi(nullptr, corpus::Speaker::caller_b, topics, emb);
  EXPECT_EQ(hh.topic_one_hot, (std::vector<float>{0, 0}));
  EXPECT_EQ(hh.suggested_topic_one_hot, (std::vector<float>{0, 0, 1}));
  EXPECT_EQ(hh.speaker_indicator, (std::vector<float>{0, 1}));

  corpus::SystemState s;
  s.topic = "Music";
  s.suggested_item = "Drake";
  auto f = extract_ssi(&s, corpus::Speaker::user, topics, emb);
  EXPECT_EQ(f.suggested_item_embedding, (std::vector<float>{0.5f, -1.0f, 2.0f}));

  s.topic = "Cooking";
  EXPECT_THROW(extract_ssi(&s, corpus::Speaker::user, topics, emb), DataError);
}

TEST(Vocabulary, VectorizeRules) {
  Vocabulary v({"<pad>", "<unk>", "a", "b", "c", "hello"});
  auto x = vectorize({"hello"}, v, 4);
  EXPECT_EQ(x.ids, (std::vector<int>{5, 0, 0, 0}));
  EXPECT_EQ(x.length, 1u);
  EXPECT_EQ(vectorize({"zebra"}, v, 4).ids, (std::vector<int>{1, 0, 0, 0}));
  Tokens many(70, "a");
  auto t = vectorize(many, v, 60);
  EXPECT_EQ(t.length, 60u);
  EXPECT_EQ(t.ids.size(), 60u);
  EXPECT_EQ(t.ids.back(), 2);
}

TEST(Vocabulary, BuildHonoursMinCount) {
  auto v = Vocabulary::build(std::vector<Tokens>{{"a", "b", "a"}, {"c", "a", "b"}}, 2);
  EXPECT_EQ(v.tokens(), (Tokens{"<pad>", "<unk>", "a", "b"}));
  EXPECT_EQ(v.id("c"), Vocabulary::kUnk);
}

TEST(Normalizer, PopulationZScore) {
  using Row = std::array<double, kLexicalDim>;
  std::vector<Row> rows{{2, 5, 0, 0, 0, 0}, {4, 5, 1, 0, 0, 1}};
  auto n = FeatureNormalizer::fit(rows);
  EXPECT_DOUBLE_EQ(n.mean[0], 3.0);
  EXPECT_DOUBLE_EQ(n.stddev[0], 1.0);
  EXPECT_DOUBLE_EQ(n.apply(rows[0])[0], -1.0);
  EXPECT_DOUBLE_EQ(n.apply(rows[0])[1], 0.0);  // constant column
  double col = 0;
  for (const auto& r : rows) col += n.apply(r)[2];
  EXPECT_NEAR(col / 2, 0.0, 1e-9);
  EXPECT_THROW(FeatureNormalizer::fit(std::vector<Row>{rows[0]}), DataError);
}

TEST(Embeddings, TextFileRoundTripAndFiltering) {
  const auto path = (std::filesystem::temp_directory_path() / "cdac_emb_test.txt").string();
  Embeddings e(2);
  e.set("dog", {1.0f, 2.0f});
  e.set("cat", {-0.5f, 0.25f});
  write_embeddings(path, e);
  auto all = load_embeddings(path, 2);
  EXPECT_EQ(all.size(), 2u);
  EXPECT_EQ(all.find("cat")[1], 0.25f);
  std::unordered_set<std::string> keep{"dog"};
  auto some = load_embeddings(path, 2, &keep);
  EXPECT_EQ(some.size(), 1u);
  EXPECT_TRUE(some.find("cat").empty());
  EXPECT_THROW(load_embeddings(path, 3), DataError);
  std::remove(path.c_str());
}
