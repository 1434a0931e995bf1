#pragma once

// Reader for the Switchboard Dialog Act corpus release: one comma-separated
// transcript table per conversation (`*.utt.csv`) with a header row naming at
// least `conversation_no`, `act_tag`, `caller` and `text`.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdac/corpus/splits.hpp"
#include "cdac/corpus/tagset.hpp"
#include "cdac/corpus/types.hpp"
#include "cdac/error.hpp"
#include "cdac/util/strings.hpp"

namespace cdac::corpus {

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
// line breaks.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view data) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; any = true; break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r': break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default: field.push_back(c); any = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Strips transcription markup (disfluency brackets, non-verbal tags, slash
// units) and collapses whitespace.
inline std::string clean_swda_text(std::string_view raw) {
  static const std::regex angle(R"(<[^>]*>)");
  static const std::regex braces(R"(\{[A-Z] ?)");
  std::string s = std::regex_replace(std::string(raw), angle, " ");
  s = std::regex_replace(s, braces, " ");
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '{' || c == '}' || c == '[' || c == ']' || c == '#' || c == '(' ||
        c == ')')
      continue;
    if (c == '+' || c == '/') continue;
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      ++i;
      continue;
    }
    out.push_back(c);
  }
  std::string collapsed;
  bool space = false;
  for (char c : out) {
    if (c == ' ' || c == '\t' || c == '\n') {
      space = !collapsed.empty();
    } else {
      if (space) collapsed.push_back(' ');
      collapsed.push_back(c);
      space = false;
    }
  }
  return collapsed;
}

inline std::string normalize_conversation_no(std::string_view s) {
  std::string t(util::trim(s));
  if (t.rfind("sw", 0) == 0) t = t.substr(2);
  while (t.size() > 1 && t.front() == '0') t.erase(t.begin());
  return t;
}

struct SwdaParseStats {
  std::size_t files = 0;
  std::size_t rows = 0;
  std::size_t merged_continuations = 0;
  std::size_t orphan_continuations = 0;
};

// Parses every `*.utt.csv` below `source_dir`. Continuation rows (raw tag
// "+") are appended to the preceding utterance of the same caller. When
// `test_list` is given, conversations it names are labelled "test" and all
// others "train".
inline ConversationSet parse_swda(const std::string& source_dir, const TagSet& tagset,
                                  const std::optional<std::string>& test_list = {},
                                  SwdaParseStats* stats = nullptr) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(source_dir))
    throw DataError("Switchboard source is not a directory: " + source_dir);

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(source_dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 8 &&
        name.compare(name.size() - 8, 8, ".utt.csv") == 0)
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no *.utt.csv files under " + source_dir);

  std::set<std::string> test_ids;
  if (test_list) {
    for (const auto& line : util::read_lines(*test_list)) {
      auto t = util::trim(line);
      if (!t.empty() && t.front() != '#')
        test_ids.insert(normalize_conversation_no(t));
    }
  }

  SwdaParseStats local;
  std::set<std::string> unmapped;
  ConversationSet set;
  for (const auto& file : files) {
    std::string data;
    try {
      data = util::read_file(file.string());
    } catch (const DataError&) {
      throw DataError("cannot read Switchboard file: " + file.string());
    }
    std::vector<std::vector<std::string>> rows;
    try {
      rows = parse_csv(data);
    } catch (const DataError& e) {
      throw DataError(file.string() + ": " + e.what());
    }
    if (rows.empty()) throw DataError(file.string() + ": empty file");
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < rows[0].size(); ++i) col[rows[0][i]] = i;
    for (const char* need : {"conversation_no", "act_tag", "caller", "text"})
      if (!col.count(need))
        throw DataError(file.string() + ": missing column '" + need + "'");

    Conversation conv;
    ++local.files;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() < rows[0].size())
        throw DataError(file.string() + ": row " + std::to_string(r + 1) +
                        " has " + std::to_string(row.size()) + " fields, expected " +
                        std::to_string(rows[0].size()));
      ++local.rows;
      if (conv.conversation_id.empty())
        conv.conversation_id = "sw" + normalize_conversation_no(row[col["conversation_no"]]);
      const Speaker speaker = speaker_from_string(util::trim(row[col["caller"]]));
      const std::string raw_tag(util::trim(row[col["act_tag"]]));
      const std::string text = clean_swda_text(row[col["text"]]);

      if (raw_tag == "+") {
        auto it = std::find_if(conv.turns.rbegin(), conv.turns.rend(),
                               [&](const Utterance& u) { return u.speaker == speaker; });
        if (it == conv.turns.rend()) {
          ++local.orphan_continuations;
          continue;
        }
        if (!text.empty()) {
          if (!it->text.empty()) it->text.push_back(' ');
          it->text += text;
        }
        ++local.merged_continuations;
        continue;
      }
      auto label = tagset.collapse(raw_tag);
      if (!label) {
        unmapped.insert(raw_tag);
        continue;
      }
      Utterance u;
      u.turn_index = conv.turns.size();
      u.speaker = speaker;
      u.text = text;
      u.da = *label;
      conv.turns.push_back(std::move(u));
    }
    if (conv.turns.empty()) continue;
    if (test_list)
      conv.partition =
          test_ids.count(conv.conversation_id.substr(2)) ? "test" : "train";
    set.push_back(std::move(conv));
  }
  if (!unmapped.empty()) {
    std::vector<std::string> tags(unmapped.begin(), unmapped.end());
    throw DataError("raw act tags without a collapse-map entry: " +
                    util::join(tags, " "));
  }
  if (stats) *stats = local;
  return set;
}

}  // namespace cdac::corpus
