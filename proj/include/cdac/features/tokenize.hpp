#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cdac::features {

inline bool is_ascii_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Lowercases ASCII letters; every ASCII punctuation character becomes its own
// token; everything else (including non-ASCII bytes) forms word runs.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (unsigned char c : text) {
    if (is_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    } else {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                         : static_cast<char>(c));
    }
  }
  flush();
  return tokens;
}

// A word token contains at least one alphanumeric character (non-ASCII
// letters count as alphanumeric).
inline bool is_word_token(std::string_view token) {
  for (unsigned char c : token)
    if ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
        c >= 0x80)
      return true;
  return false;
}

inline std::size_t count_word_tokens(const std::vector<std::string>& tokens) {
  std::size_t n = 0;
  for (const auto& t : tokens) n += is_word_token(t) ? 1 : 0;
  return n;
}

}  // namespace cdac::features
