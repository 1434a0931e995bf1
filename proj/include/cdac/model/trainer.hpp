#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdac/corpus/types.hpp"
#include "cdac/error.hpp"
#include "cdac/model/cdac.hpp"
#include "cdac/model/config.hpp"
#include "cdac/nn/adam.hpp"

namespace cdac::model {

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0;
  double train_accuracy = 0;
  std::optional<double> validation_accuracy;
};

inline void to_json(nlohmann::json& j, const EpochRecord& r) {
  j = {{"epoch", r.epoch},
       {"train_loss", r.train_loss},
       {"train_accuracy", r.train_accuracy},
       {"validation_accuracy",
        r.validation_accuracy ? nlohmann::json(*r.validation_accuracy) : nlohmann::json()}};
}

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 0: initial parameters
  std::optional<double> best_validation_accuracy;
  bool early_stopped = false;
  std::vector<std::string> warnings;

  std::vector<double> losses() const {
    std::vector<double> out;
    for (const auto& e : epochs) out.push_back(e.train_loss);
    return out;
  }
};

inline void to_json(nlohmann::json& j, const TrainingHistory& h) {
  j = {{"epochs", h.epochs},
       {"best_epoch", h.best_epoch},
       {"best_validation_accuracy", h.best_validation_accuracy
                                        ? nlohmann::json(*h.best_validation_accuracy)
                                        : nlohmann::json()},
       {"early_stopped", h.early_stopped},
       {"warnings", h.warnings}};
}

// Patience counted in epochs without a strict improvement.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Returns true when `accuracy` is a new best.
  bool update(std::size_t epoch, double accuracy) {
    if (!best_ || accuracy > *best_) {
      best_ = accuracy;
      best_epoch_ = epoch;
      since_ = 0;
      return true;
    }
    ++since_;
    return false;
  }

  bool should_stop() const { return patience_ > 0 && since_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  std::optional<double> best() const { return best_; }

 private:
  std::size_t patience_;
  std::optional<double> best_;
  std::size_t best_epoch_ = 0;
  std::size_t since_ = 0;
};

inline double micro_accuracy_of(const PredictionPairs& p) {
  if (p.gold.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < p.gold.size(); ++i) hit += p.gold[i] == p.predicted[i];
  return static_cast<double>(hit) / static_cast<double>(p.gold.size());
}

inline void check_labels(const corpus::ConversationSet& set, const corpus::TagSet& tagset,
                         const char* what) {
  for (const auto& c : set)
    for (const auto& u : c.turns)
      if (u.da && !tagset.contains(*u.da))
        throw DataError("label '" + *u.da + "' in conversation '" + c.conversation_id +
                        "' is not in the " + what + " tag set");
}

namespace detail {

struct Example {
  std::size_t conv;
  std::size_t turn;
  std::size_t eligible_pos;
  std::size_t gold;
};

struct TrainingData {
  std::vector<std::vector<DacInput>> inputs;       // per conversation, per turn
  std::vector<std::vector<int>> eligible_labels;   // per conversation; -1 = unlabeled
  std::vector<std::vector<std::size_t>> eligible_turns;
  std::vector<Example> examples;
};

inline TrainingData prepare(const CdacModel& model, const corpus::ConversationSet& set) {
  TrainingData d;
  const auto fz = model.featurizer();
  for (std::size_t ci = 0; ci < set.size(); ++ci) {
    const auto& c = set[ci];
    d.inputs.push_back(fz.featurize_all(c));
    std::vector<int> labels;
    std::vector<std::size_t> turns;
    for (std::size_t t = 0; t < c.turns.size(); ++t) {
      const auto& u = c.turns[t];
      if (!corpus::is_eligible(u)) continue;
      if (u.da)
        d.examples.push_back({ci, t, labels.size(), model.tagset.id(*u.da)});
      labels.push_back(u.da ? static_cast<int>(model.tagset.id(*u.da)) : -1);
      turns.push_back(t);
    }
    d.eligible_labels.push_back(std::move(labels));
    d.eligible_turns.push_back(std::move(turns));
  }
  return d;
}

// Causal predictions (eval mode) for every eligible turn of the training
// conversations, used to corrupt gold context under scheduled sampling.
inline std::vector<std::vector<int>> own_predictions(const CdacModel& model,
                                                     const corpus::ConversationSet& set) {
  std::vector<std::vector<int>> out;
  for (const auto& c : set) {
    std::vector<int> labels;
    for (const auto& p : predict_conversation(model, c))
      labels.push_back(static_cast<int>(p.label));
    out.push_back(std::move(labels));
  }
  return out;
}

}  // namespace detail

// Mini-batch Adam with per-epoch shuffling and teacher-forced context. Keeps
// the parameters of the best validation epoch (or the last epoch when no
// validation data is given).
inline TrainingHistory train(CdacModel& model, const corpus::ConversationSet& train_set,
                             const corpus::ConversationSet& validation,
                             const TrainingConfig& tc, std::ostream* log = nullptr) {
  tc.validate();
  check_labels(train_set, model.tagset, "model's");
  check_labels(validation, model.tagset, "model's");
  auto data = detail::prepare(model, train_set);
  if (data.examples.empty()) throw DataError("empty training set");

  auto& net = model.net;
  const auto& cfg = model.config;
  const std::size_t C = cfg.num_classes, m = cfg.context_window, cdim = cfg.context_dim();
  nn::Adam<float> adam(net.params, {tc.learning_rate, 0.9, 0.999, 1e-8});
  auto grads = net.params.zeros_like();
  std::mt19937_64 rng(tc.seed);

  TrainingHistory hist;
  EarlyStopper stopper(tc.patience);
  std::optional<nn::ParameterSet<float>> best_params;
  const bool has_validation = corpus::count_utterances(validation) > 0;

  std::vector<std::size_t> order(data.examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const DacInput*> batch_inputs;
  std::vector<float> batch_context;
  std::vector<std::size_t> batch_gold;

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    auto context_labels = data.eligible_labels;
    if (tc.scheduled_sampling > 0) {
      const auto own = detail::own_predictions(model, train_set);
      std::bernoulli_distribution swap(tc.scheduled_sampling);
      for (std::size_t ci = 0; ci < context_labels.size(); ++ci)
        for (std::size_t j = 0; j < context_labels[ci].size(); ++j)
          if (swap(rng)) context_labels[ci][j] = own[ci][j];
    }
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0;
    std::size_t seen = 0, correct = 0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t B = std::min(tc.batch_size, order.size() - start);
      if (B < 2) break;
      batch_inputs.clear();
      batch_gold.clear();
      batch_context.assign(B * cdim, 0.0f);
      for (std::size_t b = 0; b < B; ++b) {
        const auto& ex = data.examples[order[start + b]];
        batch_inputs.push_back(&data.inputs[ex.conv][ex.turn]);
        batch_gold.push_back(ex.gold);
        const auto& labels = context_labels[ex.conv];
        for (std::size_t s = 0; s < m && s < ex.eligible_pos; ++s) {
          const int l = labels[ex.eligible_pos - 1 - s];
          if (l >= 0) batch_context[b * cdim + s * C + static_cast<std::size_t>(l)] = 1.0f;
        }
      }
      auto fw = net.forward(batch_inputs, batch_context, nn::Mode::train, &rng);
      grads.zero();
      const float loss = net.backward(fw, batch_gold, grads);
      if (!std::isfinite(loss)) throw NumericError("training loss became non-finite");
      adam.step(net.params, grads);
      net.commit_running_stats(fw);
      loss_sum += static_cast<double>(loss) * static_cast<double>(B);
      seen += B;
      for (std::size_t b = 0; b < B; ++b)
        correct += model.predict_label(std::span<const float>(fw.probs.data() + b * C, C)) ==
                   batch_gold[b];
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
    rec.train_accuracy = seen ? static_cast<double>(correct) / static_cast<double>(seen) : 0.0;
    if (has_validation) rec.validation_accuracy = micro_accuracy_of(predict_labeled(model, validation));
    hist.epochs.push_back(rec);
    if (log && tc.verbose) {
      *log << "epoch " << epoch << " loss " << rec.train_loss << " train_acc "
           << rec.train_accuracy;
      if (rec.validation_accuracy) *log << " val_acc " << *rec.validation_accuracy;
      *log << '\n';
    }
    if (!has_validation) {
      hist.best_epoch = epoch;
      continue;
    }
    if (stopper.update(epoch, *rec.validation_accuracy)) best_params = net.params;
    if (stopper.should_stop()) {
      hist.early_stopped = true;
      break;
    }
  }
  if (has_validation && best_params) {
    net.params = std::move(*best_params);
    hist.best_epoch = stopper.best_epoch();
    hist.best_validation_accuracy = stopper.best();
  }
  model.provenance["trained_epochs"] = hist.epochs.size();
  model.provenance["best_epoch"] = hist.best_epoch;
  model.provenance["training_seed"] = tc.seed;
  model.provenance["learning_rate"] = tc.learning_rate;
  return hist;
}

// Continues training a pretrained model on human-machine conversations: all
// weights trainable, output layer reused, predictions masked to the
// human-machine label subset.
inline TrainingHistory finetune(CdacModel& model, const corpus::ConversationSet& train_set,
                                const corpus::ConversationSet& validation,
                                const TrainingConfig& tc, std::ostream* log = nullptr,
                                const features::Embeddings* pretrained = nullptr) {
  check_labels(train_set, model.tagset, "pretrained");
  check_labels(validation, model.tagset, "pretrained");
  for (const auto* set : {&train_set, &validation})
    for (const auto& c : *set)
      if (c.states)
        for (const auto& s : *c.states) {
          std::vector<std::string> used{s.topic};
          if (s.previous_topic) used.push_back(*s.previous_topic);
          if (s.suggested_topic) used.push_back(*s.suggested_topic);
          for (const auto& t : used)
            if (!model.topics.contains(t))
              throw DataError("topic '" + t + "' is not in the pretrained topic vocabulary");
        }
  std::vector<std::string> warnings;
  if (tc.learning_rate >= kPretrainLearningRate) {
    warnings.push_back("fine-tuning learning rate " + std::to_string(tc.learning_rate) +
                       " is not below the pretraining rate " +
                       std::to_string(kPretrainLearningRate));
    if (log) *log << "warning: " << warnings.back() << '\n';
  }
  const std::size_t added = extend_vocabulary(model, train_set, pretrained);
  const bool neutralized = neutralize_unseen_ssi(model, train_set);
  if (log && added) *log << "vocabulary extended by " << added << " tokens\n";
  apply_label_policy(model, train_set);
  auto hist = train(model, train_set, validation, tc, log);
  hist.warnings.insert(hist.warnings.begin(), warnings.begin(), warnings.end());
  model.provenance["finetuned"] = true;
  model.provenance["finetune_added_tokens"] = added;
  model.provenance["finetune_neutralized_ssi"] = neutralized;
  return hist;
}

}  // namespace cdac::model
