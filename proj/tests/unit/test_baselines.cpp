#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cdac/baselines/classifiers.hpp"
#include "cdac/baselines/context.hpp"
#include "cdac/baselines/cross_validate.hpp"
#include "cdac/corpus/synthetic.hpp"

using namespace cdac;
using namespace cdac::baselines;

namespace {

SparseVector dense(std::initializer_list<double> xs) {
  SparseVector v;
  std::uint32_t i = 0;
  for (double x : xs) {
    if (x != 0) v.push(i, x);
    ++i;
  }
  return v;
}

// Small human-machine corpus: label is a function of the first word.
corpus::ConversationSet keyword_corpus(const std::string& prefix, std::size_t n) {
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"sure sounds good", "aa"}, {"hello there alexa", "fp"},
      {"i love that song", "sv"}, {"what about dogs", "qo"},
      {"goodbye for now", "fc"}, {"no thanks", "ar"}};
  corpus::ConversationSet set;
  for (std::size_t c = 0; c < n; ++c) {
    corpus::Conversation conv;
    conv.conversation_id = prefix + std::to_string(c);
    conv.states.emplace();
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto& [text, da] = rows[(t + c) % rows.size()];
      corpus::Utterance u;
      u.turn_index = conv.turns.size();
      u.speaker = corpus::Speaker::user;
      u.text = text;
      u.da = da;
      conv.turns.push_back(u);
      corpus::SystemState s;
      s.topic = "Music";
      conv.states->push_back(s);
    }
    set.push_back(std::move(conv));
  }
  return set;
}

}  // namespace

TEST(Tfidf, SmoothedIdfAndNormalization) {
  auto m = TfidfModel::fit({{"a", "b"}, {"a"}});
  EXPECT_DOUBLE_EQ(m.idf("a"), 1.0);
  EXPECT_NEAR(m.idf("b"), std::log(1.5) + 1.0, 1e-12);
  EXPECT_NEAR(m.idf("b"), 1.405465, 1e-6);
  auto v = m.transform({"a", "b"});
  ASSERT_EQ(v.nnz(), 2u);
  EXPECT_NEAR(v.value[0], 0.5797, 1e-4);
  EXPECT_NEAR(v.value[1], 0.8148, 1e-4);
  EXPECT_EQ(m.transform({"zzz", "yyy"}).nnz(), 0u);
  EXPECT_THROW(TfidfModel::fit({}), DataError);
}

TEST(Mnb, PredictsByConstruction) {
  auto tf = TfidfModel::fit({{"a", "a"}, {"b"}});
  std::vector<SparseVector> x{tf.transform({"a", "a"}), tf.transform({"b"})};
  auto m = MultinomialNB::fit(x, {0, 1}, tf.dim(), 2, 1.0);
  EXPECT_EQ(m.predict(tf.transform({"a"})), 0u);
  EXPECT_EQ(m.predict(tf.transform({"b"})), 1u);
}

TEST(Svm, SeparableToyAndDeterminism) {
  std::vector<SparseVector> x;
  std::vector<std::size_t> y;
  for (int i = 0; i < 20; ++i) {
    const double s = 0.5 + 0.05 * i;
    x.push_back(dense({s, 0.1}));
    y.push_back(0);
    x.push_back(dense({0.1, s}));
    y.push_back(1);
  }
  SvmConfig cfg;
  cfg.lambda = 1e-2;
  auto m = LinearSvm::fit(x, y, 2, 2, cfg);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < x.size(); ++i) hit += m.predict(x[i]) == y[i];
  EXPECT_EQ(hit, x.size());
  EXPECT_EQ(m.weights(), LinearSvm::fit(x, y, 2, 2, cfg).weights());
  auto nb = MultinomialNB::fit(x, y, 2, 2);
  EXPECT_EQ(nb.log_prior(), MultinomialNB::fit(x, y, 2, 2).log_prior());
}

TEST(Classifiers, SingleClassIsError) {
  std::vector<SparseVector> x{dense({1})};
  EXPECT_THROW(MultinomialNB::fit(x, {0}, 1, 2), DataError);
  EXPECT_THROW(LinearSvm::fit(x, {0}, 1, 2), DataError);
}

TEST(Context, DisabledBlocksAndFirstTurn) {
  corpus::TopicVocab topics({"Music", "News"});
  ContextAugmentation off{0, true, false};
  auto layout = AugmentedLayout::make(3, topics.size(), off);
  EXPECT_EQ(layout.dim(), 3u);
  auto doc = dense({0.6, 0.8, 0});
  EXPECT_EQ(augment_context(doc, {}, nullptr, topics, off, layout), doc);

  ContextAugmentation on{2, true, true};
  auto wide = AugmentedLayout::make(3, topics.size(), on);
  EXPECT_EQ(wide.dim(), 3u + 3u + 2u + 3u + 1u);
  auto first = augment_context(doc, {}, nullptr, topics, on, wide);
  for (auto i : first.index) EXPECT_FALSE(i >= 3 && i < 6);  // previous block empty
}

TEST(Context, PoolingIsOrderFree) {
  std::vector<SparseVector> ab{dense({1, 0, 0}), dense({0, 0.6, 0.8})};
  std::vector<SparseVector> ba{ab[1], ab[0]};
  EXPECT_EQ(pool(ab), pool(ba));
  EXPECT_NEAR(pool(ab).norm(), 1.0, 1e-12);
}

TEST(Context, SsiBlockHasUnitNorm) {
  corpus::TopicVocab topics({"Music", "News"});
  ContextAugmentation cfg{0, false, true};
  auto layout = AugmentedLayout::make(2, topics.size(), cfg);
  corpus::SystemState s;
  s.topic = "Music";
  s.suggested_topic = "News";
  s.suggested_item = "Drake";
  auto v = augment_context(SparseVector{}, {}, &s, topics, cfg, layout);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
}

TEST(CrossValidate, IdenticalFoldsGiveIdenticalScores) {
  corpus::ConversationSet set;
  FoldPlan plan;
  for (int k = 0; k < 5; ++k) {
    auto copy = keyword_corpus("f" + std::to_string(k) + "-", 4);
    plan.folds.push_back({});
    for (auto& c : copy) {
      plan.folds.back().push_back(c.conversation_id);
      set.push_back(std::move(c));
    }
  }
  const corpus::TopicVocab topics({"Music"});
  for (auto kind : {BaselineKind::mnb, BaselineKind::svm}) {
    BaselineConfig cfg;
    cfg.kind = kind;
    auto r = cross_validate(set, corpus::TagSet::swda42(), topics, cfg, &plan);
    ASSERT_EQ(r.fold_accuracy.size(), 5u);
    for (double a : r.fold_accuracy) EXPECT_DOUBLE_EQ(a, r.fold_accuracy[0]);
    const double mean = std::accumulate(r.fold_accuracy.begin(), r.fold_accuracy.end(), 0.0) / 5;
    EXPECT_NEAR(mean, r.mean_accuracy, 1e-12);
  }
}

TEST(CrossValidate, SeededPlansAndMean) {
  auto set = corpus::generate_synthetic_hm(25, corpus::read_distribution(
                                                   corpus::data_dir() + "/hm_distribution.json"),
                                           corpus::TopicVocab::from_file(corpus::data_dir() + "/topics.txt"), 9);
  const auto topics = corpus::TopicVocab::from_file(corpus::data_dir() + "/topics.txt");
  BaselineConfig cfg;
  cfg.kind = BaselineKind::mnb;
  cfg.context = true;
  cfg.seed = 4;
  auto a = cross_validate(set, corpus::TagSet::swda42(), topics, cfg);
  auto b = cross_validate(set, corpus::TagSet::swda42(), topics, cfg);
  EXPECT_EQ(a.plan.folds, b.plan.folds);
  EXPECT_EQ(a.fold_accuracy, b.fold_accuracy);
  const double mean = std::accumulate(a.fold_accuracy.begin(), a.fold_accuracy.end(), 0.0) /
                      static_cast<double>(a.fold_accuracy.size());
  EXPECT_NEAR(mean, a.mean_accuracy, 1e-12);
  cfg.seed = 5;
  EXPECT_NE(cross_validate(set, corpus::TagSet::swda42(), topics, cfg).plan.folds, a.plan.folds);
  EXPECT_THROW(cross_validate(corpus::ConversationSet(set.begin(), set.begin() + 3),
                              corpus::TagSet::swda42(), topics, cfg),
               DataError);
}
