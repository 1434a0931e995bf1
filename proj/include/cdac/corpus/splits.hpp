#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cdac/corpus/types.hpp"
#include "cdac/error.hpp"

namespace cdac::corpus {

struct Splits {
  ConversationSet train;
  ConversationSet validation;
  ConversationSet test;
};

inline std::vector<std::string> conversation_ids(const ConversationSet& set) {
  std::vector<std::string> ids;
  ids.reserve(set.size());
  for (const auto& c : set) ids.push_back(c.conversation_id);
  return ids;
}

// Keeps the official test partition and carves `validation_size`
// conversations out of the shuffled training partition.
inline Splits make_official_splits(const ConversationSet& set, std::uint64_t seed,
                                   std::size_t validation_size = 115) {
  Splits out;
  ConversationSet pool;
  for (const auto& c : set) {
    if (!c.partition)
      throw DataError("conversation '" + c.conversation_id +
                      "' has no train/test partition label");
    if (*c.partition == "test")
      out.test.push_back(c);
    else
      pool.push_back(c);
  }
  if (pool.size() <= validation_size)
    throw DataError("training partition has " + std::to_string(pool.size()) +
                    " conversations; need more than " +
                    std::to_string(validation_size));
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  const std::size_t n_train = pool.size() - validation_size;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i].partition = i < n_train ? "train" : "validation";
    (i < n_train ? out.train : out.validation).push_back(std::move(pool[i]));
  }
  for (auto& c : out.test) c.partition = "test";
  return out;
}

// Seeded conversation-level split for corpora without official partitions.
inline Splits split_by_fraction(const ConversationSet& set, std::uint64_t seed,
                                double validation_fraction, double test_fraction) {
  if (validation_fraction < 0 || test_fraction < 0 ||
      validation_fraction + test_fraction >= 1.0)
    throw UsageError("split fractions must be non-negative and sum below 1");
  ConversationSet shuffled = set;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto n = shuffled.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
  const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * n));
  Splits out;
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = shuffled[i];
    if (i < n_test) {
      c.partition = "test";
      out.test.push_back(std::move(c));
    } else if (i < n_test + n_val) {
      c.partition = "validation";
      out.validation.push_back(std::move(c));
    } else {
      c.partition = "train";
      out.train.push_back(std::move(c));
    }
  }
  return out;
}

// Uses per-conversation partition labels when every conversation has one of
// train/validation/test; otherwise falls back to a seeded fractional split.
inline Splits splits_from_partitions_or(const ConversationSet& set, std::uint64_t seed,
                                        double validation_fraction,
                                        double test_fraction) {
  const bool labelled = !set.empty() && std::all_of(set.begin(), set.end(), [](const auto& c) {
    return c.partition && (*c.partition == "train" || *c.partition == "validation" ||
                           *c.partition == "test");
  });
  const bool has_validation = std::any_of(set.begin(), set.end(), [](const auto& c) {
    return c.partition && *c.partition == "validation";
  });
  if (!labelled || !has_validation)
    return split_by_fraction(set, seed, validation_fraction, test_fraction);
  Splits out;
  for (const auto& c : set) {
    if (*c.partition == "train") out.train.push_back(c);
    else if (*c.partition == "validation") out.validation.push_back(c);
    else out.test.push_back(c);
  }
  return out;
}

}  // namespace cdac::corpus
