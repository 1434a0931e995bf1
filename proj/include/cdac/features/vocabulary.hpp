#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdac/error.hpp"

namespace cdac::features {

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary() : tokens_{"<pad>", "<unk>"} { rebuild_index(); }

  explicit Vocabulary(std::vector<std::string> tokens, std::size_t min_count = 0)
      : tokens_(std::move(tokens)), min_count_(min_count) {
    if (tokens_.size() < 2 || tokens_[0] != "<pad>" || tokens_[1] != "<unk>")
      throw DataError("vocabulary must start with <pad>, <unk>");
    rebuild_index();
  }

  // Tokens seen at least `min_count` times, by descending count then
  // lexicographically.
  template <typename Docs>
  static Vocabulary build(const Docs& token_lists, std::size_t min_count) {
    std::map<std::string, std::size_t> counts;
    for (const auto& doc : token_lists)
      for (const auto& t : doc) ++counts[t];
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [t, n] : counts)
      if (n >= min_count && t != "<pad>" && t != "<unk>") kept.emplace_back(t, n);
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> tokens{"<pad>", "<unk>"};
    for (auto& [t, _] : kept) tokens.push_back(t);
    return Vocabulary(std::move(tokens), min_count);
  }

  std::size_t size() const { return tokens_.size(); }
  std::size_t min_count() const { return min_count_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(std::size_t id) const { return tokens_.at(id); }

  // Appends unseen tokens; existing ids are unchanged. Returns the number added.
  std::size_t extend(const std::vector<std::string>& tokens) {
    const std::size_t before = tokens_.size();
    for (const auto& t : tokens)
      if (!contains(t) && t != "<pad>" && t != "<unk>") {
        index_.emplace(t, static_cast<int>(tokens_.size()));
        tokens_.push_back(t);
      }
    return tokens_.size() - before;
  }

  int id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
  }
  bool contains(const std::string& token) const { return index_.count(token) > 0; }

 private:
  void rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < tokens_.size(); ++i)
      if (!index_.emplace(tokens_[i], static_cast<int>(i)).second)
        throw DataError("duplicate vocabulary token: " + tokens_[i]);
  }

  std::vector<std::string> tokens_;
  std::size_t min_count_ = 0;
  std::unordered_map<std::string, int> index_;
};

struct Vectorized {
  std::vector<int> ids;
  std::size_t length = 0;
};

// Right-padded with PAD, truncated to max_len.
inline Vectorized vectorize(const std::vector<std::string>& tokens,
                            const Vocabulary& vocab, std::size_t max_len) {
  if (max_len == 0) throw UsageError("max_len must be at least 1");
  Vectorized v;
  v.ids.assign(max_len, Vocabulary::kPad);
  v.length = std::min(tokens.size(), max_len);
  for (std::size_t i = 0; i < v.length; ++i) v.ids[i] = vocab.id(tokens[i]);
  return v;
}

}  // namespace cdac::features
