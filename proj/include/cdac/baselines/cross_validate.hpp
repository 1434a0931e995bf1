#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdac/baselines/classifiers.hpp"
#include "cdac/baselines/context.hpp"
#include "cdac/baselines/tfidf.hpp"
#include "cdac/corpus/tagset.hpp"
#include "cdac/corpus/types.hpp"
#include "cdac/error.hpp"
#include "cdac/features/tokenize.hpp"

namespace cdac::baselines {

enum class BaselineKind { svm, mnb };

NLOHMANN_JSON_SERIALIZE_ENUM(BaselineKind, {{BaselineKind::svm, "svm"}, {BaselineKind::mnb, "mnb"}})

inline BaselineKind baseline_kind_from_string(const std::string& s) {
  if (s == "svm") return BaselineKind::svm;
  if (s == "mnb") return BaselineKind::mnb;
  throw UsageError("unknown baseline kind '" + s + "' (expected svm or mnb)");
}

// Conversation-level folds.
struct FoldPlan {
  std::vector<std::vector<std::string>> folds;
  std::uint64_t seed = 0;

  // Shuffles conversation ids with `seed` and deals them round-robin.
  static FoldPlan make(const corpus::ConversationSet& set, std::size_t k, std::uint64_t seed) {
    if (set.size() < k)
      throw DataError("cross-validation needs at least " + std::to_string(k) +
                      " conversations, got " + std::to_string(set.size()));
    std::vector<std::string> ids;
    for (const auto& c : set) ids.push_back(c.conversation_id);
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    FoldPlan p;
    p.seed = seed;
    p.folds.resize(k);
    for (std::size_t i = 0; i < ids.size(); ++i) p.folds[i % k].push_back(ids[i]);
    return p;
  }

  // Every conversation in exactly one fold.
  void validate(const corpus::ConversationSet& set) const {
    std::map<std::string, int> seen;
    for (const auto& f : folds)
      for (const auto& id : f) ++seen[id];
    for (const auto& c : set)
      if (seen[c.conversation_id] != 1)
        throw DataError("fold plan does not place conversation '" + c.conversation_id +
                        "' in exactly one fold");
    if (seen.size() != set.size()) throw DataError("fold plan names unknown conversations");
  }
};

inline void to_json(nlohmann::json& j, const FoldPlan& p) {
  j = {{"seed", p.seed}, {"folds", p.folds}};
}

struct BaselineConfig {
  BaselineKind kind = BaselineKind::svm;
  bool context = false;
  ContextAugmentation augmentation;
  double mnb_alpha = 1.0;
  SvmConfig svm;
  std::size_t folds = 5;
  std::uint64_t seed = 7;
};

struct CvResult {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0;
  FoldPlan plan;
  std::vector<std::size_t> gold, predicted;  // pooled over test folds
};

namespace detail {

struct Featurized {
  std::vector<SparseVector> x;
  std::vector<std::size_t> y;
};

// Eligible labeled turns of `convs` as (augmented) tf-idf vectors.
inline Featurized featurize(const std::vector<const corpus::Conversation*>& convs,
                            const TfidfModel& tfidf, const corpus::TagSet& tagset,
                            const corpus::TopicVocab& topics, const BaselineConfig& cfg,
                            const AugmentedLayout& layout) {
  Featurized out;
  for (const auto* c : convs) {
    std::vector<SparseVector> previous;
    for (std::size_t t = 0; t < c->turns.size(); ++t) {
      const auto& u = c->turns[t];
      if (!corpus::is_eligible(u)) continue;
      auto v = tfidf.transform(features::tokenize(u.text));
      if (u.da) {
        out.x.push_back(cfg.context ? augment_context(v, previous,
                                                      c->states ? &(*c->states)[t] : nullptr,
                                                      topics, cfg.augmentation, layout)
                                    : v);
        out.y.push_back(tagset.id(*u.da));
      }
      previous.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace detail

inline CvResult cross_validate(const corpus::ConversationSet& set, const corpus::TagSet& tagset,
                               const corpus::TopicVocab& topics, const BaselineConfig& cfg,
                               const FoldPlan* explicit_plan = nullptr) {
  if (set.size() < cfg.folds)
    throw DataError("cross-validation needs at least " + std::to_string(cfg.folds) +
                    " conversations, got " + std::to_string(set.size()));
  CvResult r;
  r.plan = explicit_plan ? *explicit_plan : FoldPlan::make(set, cfg.folds, cfg.seed);
  r.plan.validate(set);
  std::map<std::string, const corpus::Conversation*> by_id;
  for (const auto& c : set) by_id[c.conversation_id] = &c;

  for (std::size_t f = 0; f < r.plan.folds.size(); ++f) {
    std::vector<const corpus::Conversation*> train, test;
    for (std::size_t g = 0; g < r.plan.folds.size(); ++g)
      for (const auto& id : r.plan.folds[g]) (g == f ? test : train).push_back(by_id.at(id));
    std::vector<TfidfModel::Doc> docs;
    for (const auto* c : train)
      for (const auto& u : c->turns)
        if (corpus::is_eligible(u)) docs.push_back(features::tokenize(u.text));
    const auto tfidf = TfidfModel::fit(docs);
    const auto layout = cfg.context ? AugmentedLayout::make(tfidf.dim(), topics.size(), cfg.augmentation)
                                    : AugmentedLayout{tfidf.dim(), 0, 0};
    const auto tr = detail::featurize(train, tfidf, tagset, topics, cfg, layout);
    const auto te = detail::featurize(test, tfidf, tagset, topics, cfg, layout);
    std::vector<std::size_t> pred;
    if (cfg.kind == BaselineKind::mnb) {
      const auto m = MultinomialNB::fit(tr.x, tr.y, layout.dim(), tagset.size(), cfg.mnb_alpha);
      for (const auto& v : te.x) pred.push_back(m.predict(v));
    } else {
      const auto m = LinearSvm::fit(tr.x, tr.y, layout.dim(), tagset.size(), cfg.svm);
      for (const auto& v : te.x) pred.push_back(m.predict(v));
    }
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == te.y[i];
    r.fold_accuracy.push_back(pred.empty() ? 0.0
                                           : static_cast<double>(hit) / static_cast<double>(pred.size()));
    r.gold.insert(r.gold.end(), te.y.begin(), te.y.end());
    r.predicted.insert(r.predicted.end(), pred.begin(), pred.end());
  }
  r.mean_accuracy = std::accumulate(r.fold_accuracy.begin(), r.fold_accuracy.end(), 0.0) /
                    static_cast<double>(r.fold_accuracy.size());
  return r;
}

}  // namespace cdac::baselines
