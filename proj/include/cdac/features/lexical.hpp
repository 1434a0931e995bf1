#pragma once

#include <array>
#include <span>
#include <string_view>

#include "cdac/features/tokenize.hpp"
#include "cdac/util/strings.hpp"

namespace cdac::features {

inline constexpr std::size_t kLexicalDim = 6;

struct LexicalFeatures {
  double word_count = 0;      // F1
  double char_count = 0;      // F2
  double sentence_count = 0;  // F3
  double avg_word_count = 0;  // F4, running mean over the speaker's turns
  double avg_char_count = 0;  // F5
  double is_question = 0;     // F6

  std::array<double, kLexicalDim> to_array() const {
    return {word_count, char_count, sentence_count, avg_word_count,
            avg_char_count, is_question};
  }
};

// Runs of sentence-final punctuation; at least 1 for non-empty text.
inline std::size_t sentence_count(std::string_view text) {
  std::size_t runs = 0;
  bool in_run = false;
  for (char c : text) {
    const bool terminal = c == '.' || c == '!' || c == '?';
    if (terminal && !in_run) ++runs;
    in_run = terminal;
  }
  if (text.empty()) return 0;
  return runs == 0 ? 1 : runs;
}

// `history` holds this speaker's earlier utterances in the conversation.
inline LexicalFeatures extract_lexical(std::string_view text,
                                       std::span<const LexicalFeatures> history) {
  LexicalFeatures f;
  f.word_count = static_cast<double>(count_word_tokens(tokenize(text)));
  f.char_count = static_cast<double>(util::utf8_length(text));
  f.sentence_count = static_cast<double>(sentence_count(text));
  f.is_question = text.find('?') != std::string_view::npos ? 1.0 : 0.0;
  double words = f.word_count, chars = f.char_count;
  for (const auto& h : history) {
    words += h.word_count;
    chars += h.char_count;
  }
  const double n = static_cast<double>(history.size() + 1);
  f.avg_word_count = words / n;
  f.avg_char_count = chars / n;
  return f;
}

}  // namespace cdac::features
