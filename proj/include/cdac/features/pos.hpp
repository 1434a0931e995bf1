#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdac/error.hpp"
#include "cdac/features/tokenize.hpp"
#include "cdac/util/strings.hpp"

namespace cdac::features {

// Penn Treebank tags, ids offset by the two reserved slots (PAD=0, UNK=1).
inline const std::vector<std::string>& penn_tags() {
  static const std::vector<std::string> tags = {
      "CC",  "CD",  "DT",   "EX",  "FW",  "IN",  "JJ",  "JJR", "JJS", "LS",
      "MD",  "NN",  "NNS",  "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB",
      "RBR", "RBS", "RP",   "SYM", "TO",  "UH",  "VB",  "VBD", "VBG", "VBN",
      "VBP", "VBZ", "WDT",  "WP",  "WP$", "WRB", "#",   "$",   "''",  "``",
      "-LRB-", "-RRB-", ",", ".",  ":",   "HYPH"};
  return tags;
}

class PosVocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  PosVocabulary() {
    for (const auto& t : penn_tags())
      ids_.emplace(t, static_cast<int>(ids_.size()) + 2);
  }
  std::size_t size() const { return ids_.size() + 2; }
  int id(const std::string& tag) const {
    auto it = ids_.find(tag);
    return it == ids_.end() ? kUnk : it->second;
  }
  bool contains(const std::string& tag) const { return ids_.count(tag) > 0; }

 private:
  std::unordered_map<std::string, int> ids_;
};

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // `record_tags` are tags shipped with the input record, if any.
  virtual std::vector<std::string> tag(
      const std::vector<std::string>& tokens,
      const std::optional<std::vector<std::string>>& record_tags) const = 0;
};

class PassThroughTagger : public PosTagger {
 public:
  std::vector<std::string> tag(
      const std::vector<std::string>& tokens,
      const std::optional<std::vector<std::string>>& record_tags) const override {
    if (tokens.empty()) return {};
    if (!record_tags)
      throw DataError("pass-through POS tagger selected but the record has no tags");
    if (record_tags->size() != tokens.size())
      throw DataError("record has " + std::to_string(record_tags->size()) +
                      " POS tags for " + std::to_string(tokens.size()) + " tokens");
    return *record_tags;
  }
};

// Greedy tagger: lexicon lookup, then punctuation/number handling, then
// suffix rules, defaulting to NN.
class LexiconTagger : public PosTagger {
 public:
  LexiconTagger() = default;
  explicit LexiconTagger(std::unordered_map<std::string, std::string> lexicon)
      : lexicon_(std::move(lexicon)) {}

  // TSV `word<TAB>TAG`; the first entry for a word wins.
  static LexiconTagger from_file(const std::string& path) {
    std::unordered_map<std::string, std::string> lex;
    const auto lines = util::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (util::trim(lines[i]).empty() || lines[i].front() == '#') continue;
      auto cols = util::split(lines[i], '\t');
      if (cols.size() != 2)
        throw DataError(path + ":" + std::to_string(i + 1) + ": expected word<TAB>TAG");
      lex.emplace(util::to_lower_ascii(cols[0]), std::string(util::trim(cols[1])));
    }
    return LexiconTagger(std::move(lex));
  }

  std::size_t lexicon_size() const { return lexicon_.size(); }
  const std::unordered_map<std::string, std::string>& lexicon() const { return lexicon_; }

  std::vector<std::string> tag(
      const std::vector<std::string>& tokens,
      const std::optional<std::vector<std::string>>& = std::nullopt) const override {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(tag_one(t));
    return out;
  }

  std::string tag_one(const std::string& token) const {
    if (auto it = lexicon_.find(token); it != lexicon_.end()) return it->second;
    if (token.size() == 1 && is_ascii_punct(static_cast<unsigned char>(token[0])))
      return punct_tag(token[0]);
    if (is_number(token)) return "CD";
    return suffix_tag(token);
  }

 private:
  static bool is_number(const std::string& t) {
    bool digit = false;
    for (char c : t) {
      if (c >= '0' && c <= '9') digit = true;
      else if (c != '.' && c != ',') return false;
    }
    return digit;
  }

  static std::string punct_tag(char c) {
    switch (c) {
      case '.': case '!': case '?': return ".";
      case ',': return ",";
      case ':': case ';': case '-': return ":";
      case '(': case '[': case '{': return "-LRB-";
      case ')': case ']': case '}': return "-RRB-";
      case '$': return "$";
      case '#': return "#";
      case '"': case '\'': case '`': return "''";
      default: return "SYM";
    }
  }

  static bool ends_with(const std::string& s, std::string_view suf) {
    return s.size() > suf.size() + 1 &&
           s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
  }

  static std::string suffix_tag(const std::string& t) {
    if (ends_with(t, "ing")) return "VBG";
    if (ends_with(t, "ed")) return "VBD";
    if (ends_with(t, "ly")) return "RB";
    if (ends_with(t, "est")) return "JJS";
    for (auto suf : {"able", "ible", "ous", "ful", "ive", "ical", "less", "ish"})
      if (ends_with(t, suf)) return "JJ";
    for (auto suf : {"tion", "sion", "ment", "ness", "ity", "ship", "ism"})
      if (ends_with(t, suf)) return "NN";
    if (ends_with(t, "s") && !ends_with(t, "ss")) return "NNS";
    return "NN";
  }

  std::unordered_map<std::string, std::string> lexicon_;
};

}  // namespace cdac::features
