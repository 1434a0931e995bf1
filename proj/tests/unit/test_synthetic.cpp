#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "cdac/corpus/annotations.hpp"
#include "cdac/corpus/canonical.hpp"
#include "cdac/corpus/synthetic.hpp"

using namespace cdac;
using namespace cdac::corpus;

namespace {

const Distribution& reference() {
  static const auto d = read_distribution(data_dir() + "/hm_distribution.json");
  return d;
}

const TopicVocab& topics() {
  static const auto t = TopicVocab::from_file(data_dir() + "/topics.txt");
  return t;
}

std::map<std::string, double> frequencies(const ConversationSet& set) {
  std::map<std::string, double> out;
  for (const auto& row : label_frequency(set, TagSet::swda42())) out[row.label] = row.percentage;
  return out;
}

std::string dump(const ConversationSet& set) {
  std::stringstream s;
  write_corpus(s, set);
  return s.str();
}

}  // namespace

TEST(SyntheticHm, AcceptFrequencyAtReferenceSize) {
  auto set = generate_synthetic_hm(200, reference(), topics(), 1);
  ASSERT_EQ(set.size(), 200u);
  EXPECT_NEAR(frequencies(set)["aa"], 21.7, 3.0);
}

TEST(SyntheticHm, LargeSampleMatchesDistribution) {
  auto f = frequencies(generate_synthetic_hm(1000, reference(), topics(), 2));
  for (const auto& [label, p] : reference()) EXPECT_NEAR(f[label], 100 * p, 2.0) << label;
}

TEST(SyntheticHm, EmptyAndDeterministic) {
  EXPECT_TRUE(generate_synthetic_hm(0, reference(), topics(), 1).empty());
  EXPECT_EQ(dump(generate_synthetic_hm(20, reference(), topics(), 5)),
            dump(generate_synthetic_hm(20, reference(), topics(), 5)));
  EXPECT_NE(dump(generate_synthetic_hm(20, reference(), topics(), 5)),
            dump(generate_synthetic_hm(20, reference(), topics(), 6)));
}

TEST(SyntheticHm, ConversationShape) {
  auto set = generate_synthetic_hm(30, reference(), topics(), 3);
  for (const auto& c : set) {
    ASSERT_TRUE(c.states);
    ASSERT_EQ(c.states->size(), c.turns.size());
    EXPECT_EQ(c.turns.front().speaker, Speaker::user);
    EXPECT_EQ(c.turns.back().speaker, Speaker::system);
    for (std::size_t i = 0; i < c.turns.size(); ++i) {
      EXPECT_EQ(c.turns[i].speaker, i % 2 ? Speaker::system : Speaker::user);
      EXPECT_EQ(c.turns[i].da.has_value(), c.turns[i].speaker == Speaker::user);
      EXPECT_TRUE(topics().contains((*c.states)[i].topic));
    }
    validate_conversation(c);
  }
}

TEST(SyntheticHm, BadDistributionsAreErrors) {
  auto d = reference();
  d["aa"] += 0.1;
  EXPECT_THROW(generate_synthetic_hm(5, d, topics(), 1), DataError);
  Distribution foreign{{"aa", 0.5}, {"nn", 0.5}};  // nn is not a human-machine label
  EXPECT_THROW(generate_synthetic_hm(5, foreign, topics(), 1), DataError);
  Distribution negative{{"aa", 1.5}, {"sv", -0.5}};
  EXPECT_THROW(generate_synthetic_hm(5, negative, topics(), 1), DataError);
}

TEST(SyntheticHm, StylesMixBackToTarget) {
  const auto& bank = TemplateBank::shipped();
  auto [chatty, terse] = split_by_style(reference(), bank);
  for (const auto& [label, p] : reference())
    EXPECT_NEAR(0.5 * chatty.at(label) + 0.5 * terse.at(label), p, 1e-12) << label;
}

TEST(SyntheticHm, LabelChainIsStationaryAtTarget) {
  const auto& bank = TemplateBank::shipped();
  synth::LabelChain chain(reference(), bank.hm.transitions, bank.hm.persistence);
  const auto& k = chain.kernel();
  const auto& labels = chain.labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    double mass = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) mass += reference().at(labels[i]) * k[i][j];
    EXPECT_NEAR(mass, reference().at(labels[j]), 1e-9) << labels[j];
  }
}

TEST(SyntheticHh, CallersAndLabels) {
  auto set = generate_synthetic_hh(10, 4);
  ASSERT_EQ(set.size(), 10u);
  const auto tags = TagSet::swda42();
  for (const auto& c : set) {
    EXPECT_FALSE(c.states);
    for (const auto& u : c.turns) {
      EXPECT_TRUE(u.speaker == Speaker::caller_a || u.speaker == Speaker::caller_b);
      ASSERT_TRUE(u.da);
      EXPECT_TRUE(tags.contains(*u.da));
    }
  }
  EXPECT_EQ(dump(set), dump(generate_synthetic_hh(10, 4)));
}

TEST(SyntheticEmbeddings, DeterministicAndScaled) {
  const auto& bank = TemplateBank::shipped();
  auto a = synthetic_embeddings(bank, 16, 3);
  auto b = synthetic_embeddings(bank, 16, 3);
  ASSERT_GT(a.size(), 100u);
  auto va = a.find("dog"), vb = b.find("dog");
  ASSERT_EQ(va.size(), 16u);
  EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin()));
  double norm = 0;
  for (float x : va) norm += double(x) * x;
  EXPECT_GT(norm, 0.0);
}
