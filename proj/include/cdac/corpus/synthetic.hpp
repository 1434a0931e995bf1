#pragma once

// Synthetic human-machine and human-human corpora drawn from a shipped
// template bank (data/templates.json), plus matching synthetic word vectors.
//
// Labels follow a Markov chain whose stationary distribution is the requested
// target, started from that distribution, so every position has the target
// marginal. The system prompt preceding a user turn is drawn given the
// user's label, which is what makes system state informative.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "cdac/corpus/tagset.hpp"
#include "cdac/corpus/types.hpp"
#include "cdac/error.hpp"
#include "cdac/features/embeddings.hpp"
#include "cdac/features/tokenize.hpp"
#include "cdac/util/strings.hpp"

namespace cdac::corpus {

// Data root: CDAC_DATA_DIR when set, else the source tree's data directory.
inline std::string data_dir() {
  if (const char* env = std::getenv("CDAC_DATA_DIR"); env && *env) return env;
#ifdef CDAC_BUILTIN_DATA_DIR
  return CDAC_BUILTIN_DATA_DIR;
#else
  return "data";
#endif
}

using Distribution = std::map<std::string, double>;

struct WeightedTemplate {
  std::string text;
  double weight = 1.0;
  // Empty for any user, else "chatty" or "terse".
  std::string style;
};

struct SyntheticTopic {
  std::string name;
  std::vector<std::string> words;
  std::vector<std::string> items;
};

struct DomainTemplates {
  std::map<std::string, std::vector<WeightedTemplate>> labels;
  std::vector<std::tuple<std::string, std::string, double>> transitions;
  double persistence = 0.0;
};

struct TemplateBank {
  double zipf_exponent = 1.1;
  std::map<std::string, std::vector<std::string>> fields;
  std::vector<SyntheticTopic> topics;
  DomainTemplates hm;
  DomainTemplates hh;
  std::map<std::string, std::vector<std::string>> prompts;
  std::map<std::string, Distribution> prompt_given_label;
  std::map<std::string, std::vector<std::string>> confusable;
  Distribution hh_distribution;
  // Half the users are chatty: `chatty_labels` carry `chatty_weight` of their
  // mass in chatty conversations, and chatty users prefer longer wordings.
  std::vector<std::string> chatty_labels;
  double chatty_weight = 0.5;
  double length_bias = 0.0;

  static TemplateBank from_json(const nlohmann::json& j) {
    TemplateBank b;
    try {
      b.zipf_exponent = j.value("zipf_exponent", 1.1);
      for (const auto& [k, v] : j.at("fields").items())
        b.fields[k] = v.get<std::vector<std::string>>();
      for (const auto& [k, v] : j.at("topics").items())
        b.topics.push_back({k, v.at("words").get<std::vector<std::string>>(),
                            v.at("items").get<std::vector<std::string>>()});
      auto domain = [](const nlohmann::json& d) {
        DomainTemplates t;
        for (const auto& [label, list] : d.at("labels").items())
          for (const auto& e : list)
            t.labels[label].push_back({e.at(0).get<std::string>(), e.at(1).get<double>(),
                                       e.size() > 2 ? e.at(2).get<std::string>() : ""});
        if (d.contains("transitions"))
          for (const auto& e : d.at("transitions"))
            t.transitions.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                                       e.at(2).get<double>());
        t.persistence = d.value("persistence", 0.0);
        return t;
      };
      const auto& hm = j.at("hm");
      b.hm = domain(hm);
      for (const auto& [k, v] : hm.at("prompts").items())
        b.prompts[k] = v.get<std::vector<std::string>>();
      for (const auto& [k, v] : hm.at("prompt_given_label").items())
        b.prompt_given_label[k] = v.get<Distribution>();
      if (hm.contains("confusable"))
        for (const auto& [k, v] : hm.at("confusable").items())
          b.confusable[k] = v.get<std::vector<std::string>>();
      if (hm.contains("user_styles")) {
        const auto& st = hm.at("user_styles");
        b.chatty_labels = st.at("chatty_labels").get<std::vector<std::string>>();
        b.chatty_weight = st.value("chatty_weight", 0.5);
        b.length_bias = st.value("length_bias", 0.0);
      }
      const auto& hh = j.at("hh");
      b.hh = domain(hh);
      b.hh_distribution = hh.at("distribution").get<Distribution>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed template bank: ") + e.what());
    }
    return b;
  }

  static TemplateBank from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open template bank: " + path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path + ": " + e.what());
    }
  }

  static const TemplateBank& shipped() {
    static const TemplateBank bank = from_file(data_dir() + "/templates.json");
    return bank;
  }

  const SyntheticTopic* topic(const std::string& name) const {
    for (const auto& t : topics)
      if (t.name == name) return &t;
    return nullptr;
  }
};

// Reads a label distribution from JSON: either a flat {label: p} object or an
// object with a "probabilities" member.
inline Distribution read_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open distribution file: " + path);
  try {
    auto j = nlohmann::json::parse(in);
    if (j.contains("probabilities")) j = j.at("probabilities");
    return j.get<Distribution>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline void check_distribution(const Distribution& dist) {
  double sum = 0.0;
  for (const auto& [label, p] : dist) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw DataError("distribution entry '" + label + "' is not a probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw DataError("target distribution sums to " + std::to_string(sum) +
                    ", expected 1");
}

// Splits `target` into chatty and terse label distributions whose equal
// mixture is `target` again.
inline std::pair<Distribution, Distribution> split_by_style(const Distribution& target,
                                                            const TemplateBank& bank) {
  if (bank.chatty_labels.empty()) return {target, target};
  const std::set<std::string> chatty(bank.chatty_labels.begin(), bank.chatty_labels.end());
  double pc = 0.0, pt = 0.0;
  for (const auto& [l, p] : target) (chatty.count(l) ? pc : pt) += p;
  if (pc == 0.0 || pt == 0.0) return {target, target};
  const double wc = bank.chatty_weight;
  const double wt = 1.0 - (1.0 - 2.0 * wc * pc) / (2.0 * pt);
  if (!(wc >= 0.0 && wc <= 1.0 && wt >= 0.0 && wt <= 1.0))
    throw DataError("chatty_weight cannot be realized for this target distribution");
  Distribution c, t;
  for (const auto& [l, p] : target) {
    const double share = chatty.count(l) ? wc : 1.0 - wt;
    c[l] = 2.0 * p * share;
    t[l] = 2.0 * p * (1.0 - share);
  }
  return {c, t};
}

namespace synth {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t pick_weighted(const std::vector<double>& w, Rng& rng) {
  double total = 0.0;
  for (double x : w) total += x;
  double r = uniform(rng) * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (r < w[i]) return i;
    r -= w[i];
  }
  for (std::size_t i = w.size(); i-- > 0;)
    if (w[i] > 0) return i;
  return 0;
}

// Earlier entries are more frequent: weight 1/(rank+1)^s.
inline const std::string& pick_zipf(const std::vector<std::string>& v, double s,
                                    Rng& rng) {
  if (v.empty()) throw DataError("template bank field is empty");
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = 1.0 / std::pow(i + 1.0, s);
  return v[pick_weighted(w, rng)];
}

// Markov chain over labels with stationary distribution pi. The designed
// transition weights are turned into a joint matrix J (J_ij ~ pi_i w_ij) and
// Sinkhorn-balanced until both its row and column sums equal pi; then
// K_ij = J_ij / pi_i leaves pi invariant while keeping the designed shape.
// `persistence` mixes in a repeat of the previous label, which also keeps pi.
class LabelChain {
 public:
  LabelChain(const Distribution& pi,
             const std::vector<std::tuple<std::string, std::string, double>>& transitions,
             double persistence = 0.0, double smoothing = 0.05) {
    if (persistence < 0.0 || persistence >= 1.0)
      throw DataError("label persistence must be in [0, 1)");
    for (const auto& [l, p] : pi)
      if (p > 0) {
        labels_.push_back(l);
        pi_.push_back(p);
      }
    if (labels_.empty()) throw DataError("target distribution has no mass");
    const std::size_t k = labels_.size();
    std::vector<std::vector<double>> w(k, std::vector<double>(k, smoothing));
    auto index = [&](const std::string& l) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < k; ++i)
        if (labels_[i] == l) return i;
      return std::nullopt;
    };
    for (const auto& [a, b, x] : transitions) {
      auto i = index(a), j = index(b);
      if (i && j) w[*i][*j] += x;
    }
    std::vector<std::vector<double>> joint(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i) {
      double row = 0.0;
      for (double x : w[i]) row += x;
      for (std::size_t j = 0; j < k; ++j) joint[i][j] = pi_[i] * w[i][j] / row;
    }
    for (int it = 0; it < 10000; ++it) {
      double worst = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < k; ++i) col += joint[i][j];
        for (std::size_t i = 0; i < k; ++i) joint[i][j] *= pi_[j] / col;
      }
      for (std::size_t i = 0; i < k; ++i) {
        double row = 0.0;
        for (double x : joint[i]) row += x;
        worst = std::max(worst, std::abs(row - pi_[i]) / pi_[i]);
        for (double& x : joint[i]) x *= pi_[i] / row;
      }
      if (worst < 1e-13) break;
    }
    kernel_.assign(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        kernel_[i][j] = (1.0 - persistence) * joint[i][j] / pi_[i] +
                        (i == j ? persistence : 0.0);
  }

  std::size_t initial(Rng& rng) const { return pick_weighted(pi_, rng); }
  std::size_t next(std::size_t from, Rng& rng) const {
    return pick_weighted(kernel_[from], rng);
  }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<double>>& kernel() const { return kernel_; }

 private:
  std::vector<std::string> labels_;
  std::vector<double> pi_;
  std::vector<std::vector<double>> kernel_;
};

struct ExpansionContext {
  const SyntheticTopic* current = nullptr;
  const SyntheticTopic* suggested_topic = nullptr;
  std::optional<std::string> suggested_item;
  // Topic named by the generated text, if any.
  const SyntheticTopic* mentioned = nullptr;
};

class Expander {
 public:
  Expander(const TemplateBank& bank, std::vector<const SyntheticTopic*> topics)
      : bank_(bank), topics_(std::move(topics)) {}

  const SyntheticTopic* random_topic(Rng& rng, const SyntheticTopic* exclude = nullptr) const {
    std::vector<double> w;
    for (std::size_t i = 0; i < topics_.size(); ++i)
      w.push_back(topics_[i] == exclude ? 0.0 : 1.0 / std::pow(i + 1.0, 0.5));
    return topics_[pick_weighted(w, rng)];
  }

  std::string item_of(const SyntheticTopic& t, Rng& rng) const {
    return pick_zipf(t.items, bank_.zipf_exponent, rng);
  }

  std::string expand(const std::string& tmpl, ExpansionContext& ctx, Rng& rng) const {
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
      if (tmpl[i] != '{') {
        out.push_back(tmpl[i++]);
        continue;
      }
      const auto close = tmpl.find('}', i);
      if (close == std::string::npos)
        throw DataError("unterminated placeholder in template: " + tmpl);
      out += fill(tmpl.substr(i + 1, close - i - 1), ctx, rng);
      i = close + 1;
    }
    return out;
  }

 private:
  std::string topic_word(const SyntheticTopic& t, ExpansionContext& ctx, Rng& rng) const {
    ctx.mentioned = &t;
    return pick_zipf(t.words, bank_.zipf_exponent, rng);
  }

  std::string any_item(ExpansionContext& ctx, Rng& rng) const {
    const auto* t = ctx.current && uniform(rng) < 0.5 ? ctx.current : random_topic(rng);
    ctx.mentioned = t;
    return item_of(*t, rng);
  }

  std::string fill(const std::string& name, ExpansionContext& ctx, Rng& rng) const {
    if (name == "topic_word") {
      const auto* t = ctx.current && uniform(rng) < 0.5 ? ctx.current : random_topic(rng);
      return topic_word(*t, ctx, rng);
    }
    if (name == "suggested_topic_word")
      return topic_word(ctx.suggested_topic ? *ctx.suggested_topic : *random_topic(rng), ctx,
                        rng);
    if (name == "item_any") return any_item(ctx, rng);
    if (name == "suggested_item")
      return ctx.suggested_item ? *ctx.suggested_item : any_item(ctx, rng);
    if (name == "suggested_word") {
      if (ctx.suggested_topic) return topic_word(*ctx.suggested_topic, ctx, rng);
      if (ctx.suggested_item) return *ctx.suggested_item;
      return fill("topic_word", ctx, rng);
    }
    auto it = bank_.fields.find(name);
    if (it == bank_.fields.end())
      throw DataError("template references unknown field '" + name + "'");
    return pick_zipf(it->second, bank_.zipf_exponent, rng);
  }

  const TemplateBank& bank_;
  std::vector<const SyntheticTopic*> topics_;
};

// `length_bias` > 0 favours templates with more pieces, < 0 shorter ones.
// Templates tagged with another style are skipped.
inline const WeightedTemplate& pick_template(const std::vector<WeightedTemplate>& list,
                                             Rng& rng, double length_bias = 0.0,
                                             const std::string& style = "") {
  std::vector<double> w;
  for (const auto& t : list) {
    const double pieces = 1.0 + static_cast<double>(std::count(t.text.begin(), t.text.end(), ' '));
    const bool usable = t.style.empty() || t.style == style;
    w.push_back(usable ? t.weight * std::pow(pieces, length_bias) : 0.0);
  }
  return list[pick_weighted(w, rng)];
}

}  // namespace synth

struct SynthOptions {
  // Probability that a user turn is worded with a confusable label's template.
  double noise = 0.12;
  std::size_t min_user_turns = 6;
  std::size_t max_user_turns = 24;
};

inline ConversationSet generate_synthetic_hm(std::size_t n_conversations,
                                             const Distribution& target,
                                             const TopicVocab& topic_vocab,
                                             std::uint64_t seed,
                                             const TemplateBank& bank = TemplateBank::shipped(),
                                             const SynthOptions& opt = {}) {
  check_distribution(target);
  const auto hm = TagSet::human_machine_labels();
  for (const auto& [label, p] : target) {
    if (std::find(hm.begin(), hm.end(), label) == hm.end())
      throw DataError("label '" + label + "' is not a human-machine label");
    if (p > 0 && !bank.hm.labels.count(label))
      throw DataError("template bank has no templates for label '" + label + "'");
  }
  std::vector<const SyntheticTopic*> topics;
  for (const auto& t : bank.topics)
    if (topic_vocab.contains(t.name)) topics.push_back(&t);
  if (topics.empty())
    throw DataError("no template-bank topic is declared in the topic vocabulary");
  const std::string idle = topic_vocab.contains("Phatic") ? "Phatic" : topic_vocab.topics().front();

  using namespace synth;
  Rng rng(seed);
  const auto [chatty_dist, terse_dist] = split_by_style(target, bank);
  const LabelChain chatty_chain(chatty_dist, bank.hm.transitions, bank.hm.persistence);
  const LabelChain terse_chain(terse_dist, bank.hm.transitions, bank.hm.persistence);
  Expander ex(bank, topics);

  ConversationSet set;
  set.reserve(n_conversations);
  for (std::size_t c = 0; c < n_conversations; ++c) {
    Conversation conv;
    conv.conversation_id = "synth-hm-" + std::to_string(seed) + "-" + std::to_string(c);
    conv.states.emplace();
    const std::string user_id = "user-" + std::to_string(seed) + "-" + std::to_string(c);
    const std::size_t n_user = std::uniform_int_distribution<std::size_t>(
        opt.min_user_turns, opt.max_user_turns)(rng);
    const bool chatty = uniform(rng) < 0.5;
    const LabelChain& chain = chatty ? chatty_chain : terse_chain;
    const double bias = chatty ? bank.length_bias : -bank.length_bias;
    const std::string style = chatty ? "chatty" : "terse";

    const SyntheticTopic* current = nullptr;
    std::optional<std::string> previous;
    auto switch_to = [&](const SyntheticTopic* t) {
      if (t == current) return;
      previous = current ? current->name : idle;
      current = t;
    };
    auto add = [&](Speaker sp, std::string text, std::optional<std::string> da,
                   SystemState st) {
      Utterance u;
      u.turn_index = conv.turns.size();
      u.speaker = sp;
      u.text = std::move(text);
      u.da = std::move(da);
      conv.turns.push_back(std::move(u));
      conv.states->push_back(std::move(st));
    };

    std::size_t label_id = chain.initial(rng);
    for (std::size_t t = 0; t < n_user; ++t) {
      if (t > 0) label_id = chain.next(label_id, rng);
      const std::string& label = chain.label(label_id);

      std::string kind = "none";
      if (t > 0) {
        auto it = bank.prompt_given_label.find(label);
        if (it == bank.prompt_given_label.end())
          throw DataError("template bank has no prompt distribution for '" + label + "'");
        std::vector<std::string> kinds;
        std::vector<double> w;
        for (const auto& [k, p] : it->second) {
          kinds.push_back(k);
          w.push_back(p);
        }
        kind = kinds[pick_weighted(w, rng)];
      }

      ExpansionContext ctx;
      SystemState st;
      st.user_id = user_id;
      if (kind == "open" || kind == "none") {
        if (current) switch_to(nullptr);
      } else {
        if (!current) switch_to(ex.random_topic(rng));
        if (kind == "suggest_topic") ctx.suggested_topic = ex.random_topic(rng, current);
        if (kind == "suggest_item") ctx.suggested_item = ex.item_of(*current, rng);
      }
      ctx.current = current;
      st.topic = current ? current->name : idle;
      st.previous_topic = previous;
      if (ctx.suggested_topic) st.suggested_topic = ctx.suggested_topic->name;
      st.suggested_item = ctx.suggested_item;

      if (t > 0) {
        const auto& prompts = bank.prompts.at(kind);
        ExpansionContext pctx = ctx;
        const std::string prompt =
            ex.expand(prompts[std::uniform_int_distribution<std::size_t>(
                          0, prompts.size() - 1)(rng)],
                      pctx, rng);
        add(Speaker::system, prompt, std::nullopt, st);
      }

      std::string wording = label;
      if (uniform(rng) < opt.noise) {
        if (auto it = bank.confusable.find(label); it != bank.confusable.end() &&
                                                   !it->second.empty()) {
          const auto& alt = it->second[std::uniform_int_distribution<std::size_t>(
              0, it->second.size() - 1)(rng)];
          if (bank.hm.labels.count(alt)) wording = alt;
        }
      }
      const std::string text =
          ex.expand(pick_template(bank.hm.labels.at(wording), rng, bias, style).text, ctx, rng);
      add(Speaker::user, text, label, st);

      // Accepting a suggested topic or requesting one moves the conversation.
      if (label == "aa" && ctx.suggested_topic) switch_to(ctx.suggested_topic);
      else if ((label == "qo" || label == "sv") && ctx.mentioned) switch_to(ctx.mentioned);
    }
    SystemState last = conv.states->back();
    last.suggested_topic.reset();
    last.suggested_item.reset();
    add(Speaker::system, "it was nice chatting with you", std::nullopt, last);
    set.push_back(std::move(conv));
  }
  return set;
}

// Human-human conversations between two callers, every turn labelled with a
// 42-label act drawn from the bank's human-human distribution.
inline ConversationSet generate_synthetic_hh(std::size_t n_conversations, std::uint64_t seed,
                                             const TemplateBank& bank = TemplateBank::shipped(),
                                             std::size_t min_turns = 16,
                                             std::size_t max_turns = 44) {
  Distribution dist = bank.hh_distribution;
  double sum = 0.0;
  for (const auto& [l, p] : dist) sum += p;
  if (!(sum > 0)) throw DataError("human-human distribution has no mass");
  for (auto& [l, p] : dist) {
    p /= sum;
    if (!bank.hh.labels.count(l) && !bank.hm.labels.count(l))
      throw DataError("template bank has no templates for label '" + l + "'");
  }

  using namespace synth;
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  LabelChain chain(dist, bank.hh.transitions, bank.hh.persistence);
  std::vector<const SyntheticTopic*> topics;
  for (const auto& t : bank.topics) topics.push_back(&t);
  Expander ex(bank, topics);

  ConversationSet set;
  set.reserve(n_conversations);
  for (std::size_t c = 0; c < n_conversations; ++c) {
    Conversation conv;
    conv.conversation_id = "synth-hh-" + std::to_string(seed) + "-" + std::to_string(c);
    const std::size_t n =
        std::uniform_int_distribution<std::size_t>(min_turns, max_turns)(rng);
    ExpansionContext ctx;
    ctx.current = ex.random_topic(rng);
    Speaker speaker = Speaker::caller_a;
    std::size_t label_id = chain.initial(rng);
    for (std::size_t t = 0; t < n; ++t) {
      if (t > 0) {
        label_id = chain.next(label_id, rng);
        if (uniform(rng) < 0.8)
          speaker = speaker == Speaker::caller_a ? Speaker::caller_b : Speaker::caller_a;
        if (uniform(rng) < 0.1) ctx.current = ex.random_topic(rng);
      }
      const std::string& label = chain.label(label_id);
      auto it = bank.hh.labels.find(label);
      const auto& list = it != bank.hh.labels.end() ? it->second : bank.hm.labels.at(label);
      Utterance u;
      u.turn_index = t;
      u.speaker = speaker;
      u.text = ex.expand(pick_template(list, rng).text, ctx, rng);
      u.da = label;
      conv.turns.push_back(std::move(u));
    }
    set.push_back(std::move(conv));
  }
  return set;
}

// Vectors for every token the bank can produce. Tokens of one field share a
// random direction, so synonyms sit close together; other tokens are random.
inline features::Embeddings synthetic_embeddings(const TemplateBank& bank, std::size_t dim,
                                                 std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> groups;
  auto add_phrases = [&](const std::string& group, const std::vector<std::string>& phrases) {
    for (const auto& p : phrases)
      for (const auto& tok : features::tokenize(p)) groups[tok].push_back(group);
  };
  for (const auto& [name, values] : bank.fields) add_phrases("field:" + name, values);
  for (const auto& t : bank.topics) {
    add_phrases("topic:" + t.name, t.words);
    add_phrases("items:" + t.name, t.items);
  }
  auto add_templates = [&](const DomainTemplates& d) {
    for (const auto& [label, list] : d.labels)
      for (const auto& t : list) {
        std::string literal;
        bool in = false;
        for (char ch : t.text) {
          if (ch == '{') in = true;
          else if (ch == '}') { in = false; literal.push_back(' '); }
          else if (!in) literal.push_back(ch);
        }
        for (const auto& tok : features::tokenize(literal)) groups[tok];
      }
  };
  add_templates(bank.hm);
  add_templates(bank.hh);
  for (const auto& [k, list] : bank.prompts)
    for (const auto& p : list) {
      std::string literal;
      bool in = false;
      for (char ch : p) {
        if (ch == '{') in = true;
        else if (ch == '}') { in = false; literal.push_back(' '); }
        else if (!in) literal.push_back(ch);
      }
      for (const auto& tok : features::tokenize(literal)) groups[tok];
    }

  synth::Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_unit = [&] {
    std::vector<double> v(dim);
    double n = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      n += x * x;
    }
    n = std::sqrt(n);
    for (auto& x : v) x /= n;
    return v;
  };
  std::map<std::string, std::vector<double>> centroid;
  for (auto& [tok, gs] : groups) {
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    for (const auto& g : gs)
      if (!centroid.count(g)) centroid[g] = random_unit();
  }
  features::Embeddings emb(dim);
  const double scale = 0.1 * std::sqrt(static_cast<double>(dim));
  for (const auto& [tok, gs] : groups) {
    auto noise = random_unit();
    std::vector<float> v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      double c = 0.0;
      for (const auto& g : gs) c += centroid[g][k];
      if (!gs.empty()) c /= static_cast<double>(gs.size());
      const double mixed = gs.empty() ? noise[k] : 0.45 * c + 0.9 * noise[k];
      v[k] = static_cast<float>(mixed * scale);
    }
    emb.set(tok, std::move(v));
  }
  return emb;
}

}  // namespace cdac::corpus
