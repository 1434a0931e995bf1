#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdac/error.hpp"
#include "cdac/util/strings.hpp"

namespace cdac::corpus {

// Ordered dialogue-act label inventory plus the raw-tag collapse table.
class TagSet {
 public:
  TagSet() = default;

  explicit TagSet(std::vector<std::string> labels,
                  std::map<std::string, std::string> collapse_map = {})
      : labels_(std::move(labels)), collapse_(std::move(collapse_map)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], i).second)
        throw DataError("duplicate label in tag set: " + labels_[i]);
    }
    for (const auto& [raw, target] : collapse_)
      if (!index_.count(target))
        throw DataError("collapse map target '" + target + "' (from raw tag '" +
                        raw + "') is not a label of the tag set");
  }

  // The 42 clustered Switchboard DA labels ('%' covers both abandoned and
  // uninterpretable segments).
  static TagSet swda42() {
    return TagSet({"sd", "b",  "sv",  "aa", "%",  "ba", "qy",
                   "x",  "ny", "fc",  "qw", "nn", "bk", "h",
                   "qy^d", "fo_o_fw_\"_by_bc", "bh", "^q", "bf", "na", "ad",
                   "^2", "b^m", "qo", "qh", "^h", "ar", "ng",
                   "br", "no", "fp", "qrr", "arp_nd", "t3", "oo_co_cc",
                   "t1", "bd", "aap_am", "^g", "qw^d", "fa", "ft"});
  }

  // The 13 labels annotated in the human-machine data, most frequent first.
  static std::vector<std::string> human_machine_labels() {
    return {"aa", "fp", "ar", "sv", "qo", "fc", "sd",
            "b^m", "no", "qw", "qy", "%", "ft"};
  }

  static TagSet from_labels_file(const std::string& path) {
    std::vector<std::string> labels;
    for (const auto& line : util::read_lines(path)) {
      auto t = util::trim(line);
      if (!t.empty() && t.front() != '#') labels.emplace_back(t);
    }
    return TagSet(std::move(labels));
  }

  // Reads a two-column `raw<TAB>collapsed` table and attaches it.
  TagSet with_collapse_map_file(const std::string& path) const {
    std::map<std::string, std::string> map;
    const auto lines = util::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto& line = lines[i];
      if (util::trim(line).empty() || line.front() == '#') continue;
      auto cols = util::split(line, '\t');
      if (cols.size() != 2)
        throw DataError(path + ":" + std::to_string(i + 1) +
                        ": expected 'raw<TAB>collapsed'");
      map[cols[0]] = std::string(util::trim(cols[1]));
    }
    return TagSet(labels_, std::move(map));
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::map<std::string, std::string>& collapse_map() const {
    return collapse_;
  }
  const std::string& label(std::size_t id) const { return labels_.at(id); }

  bool contains(const std::string& label) const { return index_.count(label) > 0; }

  std::size_t id(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw DataError("label not in tag set: " + label);
    return it->second;
  }

  std::optional<std::string> collapse(const std::string& raw) const {
    auto it = collapse_.find(raw);
    if (it == collapse_.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const TagSet& o) const {
    return labels_ == o.labels_ && collapse_ == o.collapse_;
  }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::string> collapse_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Declared topic inventory for system states.
class TopicVocab {
 public:
  TopicVocab() = default;
  explicit TopicVocab(std::vector<std::string> topics) : topics_(std::move(topics)) {
    for (std::size_t i = 0; i < topics_.size(); ++i)
      if (!index_.emplace(topics_[i], i).second)
        throw DataError("duplicate topic: " + topics_[i]);
  }

  static TopicVocab from_file(const std::string& path) {
    std::vector<std::string> topics;
    for (const auto& line : util::read_lines(path)) {
      auto t = util::trim(line);
      if (!t.empty() && t.front() != '#') topics.emplace_back(t);
    }
    return TopicVocab(std::move(topics));
  }

  std::size_t size() const { return topics_.size(); }
  const std::vector<std::string>& topics() const { return topics_; }
  bool contains(const std::string& t) const { return index_.count(t) > 0; }
  std::size_t id(const std::string& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) throw DataError("unknown topic: " + t);
    return it->second;
  }

 private:
  std::vector<std::string> topics_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace cdac::corpus
