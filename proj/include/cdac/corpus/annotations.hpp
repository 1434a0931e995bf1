#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cdac/corpus/tagset.hpp"
#include "cdac/corpus/types.hpp"
#include "cdac/error.hpp"
#include "cdac/util/strings.hpp"

namespace cdac::corpus {

using AnnotationKey = std::pair<std::string, std::size_t>;

// One annotator's labels keyed by (conversation_id, turn_index).
struct AnnotationSet {
  std::map<AnnotationKey, std::string> labels;
  // Seed of the tie-break draw when this set came from merge_annotations.
  std::optional<std::uint64_t> merge_seed;

  bool operator==(const AnnotationSet&) const = default;
};

// TSV: conversation_id<TAB>turn_index<TAB>label
inline AnnotationSet read_annotations(const std::string& path) {
  AnnotationSet set;
  const auto lines = util::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (util::trim(lines[i]).empty() || lines[i].front() == '#') continue;
    auto cols = util::split(lines[i], '\t');
    if (cols.size() != 3)
      throw DataError(path + ":" + std::to_string(i + 1) +
                      ": expected conversation_id<TAB>turn_index<TAB>label");
    std::size_t turn = 0;
    try {
      turn = std::stoul(cols[1]);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(i + 1) + ": bad turn index '" +
                      cols[1] + "'");
    }
    if (!set.labels.emplace(AnnotationKey{cols[0], turn}, std::string(util::trim(cols[2]))).second)
      throw DataError(path + ":" + std::to_string(i + 1) + ": duplicate key");
  }
  return set;
}

inline void write_annotations(const std::string& path, const AnnotationSet& set) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  if (set.merge_seed) out << "# merge_seed " << *set.merge_seed << '\n';
  for (const auto& [key, label] : set.labels)
    out << key.first << '\t' << key.second << '\t' << label << '\n';
}

inline AnnotationSet annotations_from_corpus(const ConversationSet& set) {
  AnnotationSet out;
  for (const auto& c : set)
    for (const auto& u : c.turns)
      if (u.da) out.labels[{c.conversation_id, u.turn_index}] = *u.da;
  return out;
}

inline void validate_annotations(const AnnotationSet& a, const TagSet& tagset,
                                 const ConversationSet* corpus = nullptr) {
  for (const auto& [key, label] : a.labels) {
    if (!tagset.contains(label))
      throw DataError("annotation label '" + label + "' is not in the tag set");
    if (corpus) {
      auto it = std::find_if(corpus->begin(), corpus->end(), [&](const Conversation& c) {
        return c.conversation_id == key.first;
      });
      if (it == corpus->end() || key.second >= it->turns.size())
        throw DataError("annotation key (" + key.first + ", " +
                        std::to_string(key.second) +
                        ") does not reference an existing utterance");
    }
  }
}

namespace detail {

inline void require_same_keys(const AnnotationSet& a, const AnnotationSet& b) {
  std::vector<std::string> diff;
  auto fmt = [](const AnnotationKey& k) {
    return "(" + k.first + ", " + std::to_string(k.second) + ")";
  };
  for (const auto& [k, _] : a.labels)
    if (!b.labels.count(k)) diff.push_back(fmt(k));
  for (const auto& [k, _] : b.labels)
    if (!a.labels.count(k)) diff.push_back(fmt(k));
  if (!diff.empty())
    throw DataError("annotation key sets differ; symmetric difference: " +
                    util::join(diff, " "));
}

}  // namespace detail

// Agreed labels are kept; disagreements are resolved by a fair coin drawn
// from `seed`, in key order.
inline AnnotationSet merge_annotations(const AnnotationSet& a, const AnnotationSet& b,
                                       std::uint64_t seed) {
  detail::require_same_keys(a, b);
  AnnotationSet out;
  out.merge_seed = seed;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (const auto& [key, la] : a.labels) {
    const auto& lb = b.labels.at(key);
    out.labels.emplace(key, la == lb ? la : (coin(rng) ? la : lb));
  }
  return out;
}

struct Agreement {
  double raw_agreement = 0.0;
  double cohen_kappa = 0.0;
};

inline Agreement compute_agreement(const AnnotationSet& a, const AnnotationSet& b) {
  detail::require_same_keys(a, b);
  if (a.labels.empty()) throw DataError("agreement over an empty key set");
  const double n = static_cast<double>(a.labels.size());
  std::map<std::string, double> pa, pb;
  double matches = 0;
  for (const auto& [key, la] : a.labels) {
    const auto& lb = b.labels.at(key);
    if (la == lb) matches += 1;
    pa[la] += 1.0 / n;
    pb[lb] += 1.0 / n;
  }
  const double po = matches / n;
  double pe = 0;
  for (const auto& [label, p] : pa)
    if (auto it = pb.find(label); it != pb.end()) pe += p * it->second;
  Agreement out{po, 0.0};
  if (std::abs(1.0 - pe) < 1e-15) {
    if (po == 1.0) {
      out.cohen_kappa = 1.0;
      return out;
    }
    throw NumericError("degenerate agreement: chance agreement is 1 but observed is not");
  }
  out.cohen_kappa = (po - pe) / (1.0 - pe);
  return out;
}

struct LabelCount {
  std::string label;
  std::size_t count = 0;
  double percentage = 0.0;
};

// Counts over labelled utterances, most frequent first (ties by tag-set order).
inline std::vector<LabelCount> label_frequency(const ConversationSet& set,
                                               const TagSet& tagset) {
  std::vector<std::size_t> counts(tagset.size(), 0);
  std::size_t total = 0;
  for (const auto& c : set)
    for (const auto& u : c.turns)
      if (u.da) {
        ++counts[tagset.id(*u.da)];
        ++total;
      }
  std::vector<LabelCount> table;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0)
      table.push_back({tagset.label(i), counts[i], 100.0 * counts[i] / total});
  std::stable_sort(table.begin(), table.end(),
                   [](const auto& x, const auto& y) { return x.count > y.count; });
  return table;
}

}  // namespace cdac::corpus
