#pragma once

// Canonical conversation file: UTF-8, one JSON conversation object per line.
//
//   {"conversation_id": "...", "partition": "train",            (optional)
//    "turns": [{"speaker": "user", "text": "...", "da": "aa",   (optional)
//               "pos": ["UH"],                                   (optional)
//               "state": {"topic": "Music", "previous_topic": null,
//                         "suggested_topic": "News", "suggested_item": null,
//                         "user_id": "u1"}}]}                    (optional)

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cdac/corpus/tagset.hpp"
#include "cdac/corpus/types.hpp"
#include "cdac/error.hpp"

namespace cdac::corpus {

namespace detail {

inline std::optional<std::string> opt_string(const nlohmann::json& j,
                                             const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw DataError(std::string("field '") + key + "' must be a string or null");
  return it->get<std::string>();
}

inline std::string req_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw DataError(std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

}  // namespace detail

inline nlohmann::json state_to_json(const SystemState& s) {
  nlohmann::json j;
  j["topic"] = s.topic;
  j["previous_topic"] = s.previous_topic ? nlohmann::json(*s.previous_topic) : nullptr;
  j["suggested_topic"] = s.suggested_topic ? nlohmann::json(*s.suggested_topic) : nullptr;
  j["suggested_item"] = s.suggested_item ? nlohmann::json(*s.suggested_item) : nullptr;
  j["user_id"] = s.user_id;
  return j;
}

inline SystemState state_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("'state' must be an object");
  SystemState s;
  s.topic = detail::req_string(j, "topic");
  s.previous_topic = detail::opt_string(j, "previous_topic");
  s.suggested_topic = detail::opt_string(j, "suggested_topic");
  s.suggested_item = detail::opt_string(j, "suggested_item");
  s.user_id = detail::opt_string(j, "user_id").value_or("");
  return s;
}

inline nlohmann::json turn_to_json(const Utterance& u, const SystemState* state) {
  nlohmann::json t;
  t["speaker"] = std::string(to_string(u.speaker));
  t["text"] = u.text;
  if (u.da) t["da"] = *u.da;
  if (u.pos) t["pos"] = *u.pos;
  if (state) t["state"] = state_to_json(*state);
  return t;
}

// Parses one turn object. The returned state is empty when the record has none.
inline std::pair<Utterance, std::optional<SystemState>> turn_from_json(
    const nlohmann::json& t) {
  if (!t.is_object()) throw DataError("turn must be an object");
  Utterance u;
  u.speaker = speaker_from_string(detail::req_string(t, "speaker"));
  u.text = detail::req_string(t, "text");
  u.da = detail::opt_string(t, "da");
  if (auto it = t.find("pos"); it != t.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("'pos' must be an array of strings");
    u.pos = it->get<std::vector<std::string>>();
  }
  std::optional<SystemState> state;
  if (auto it = t.find("state"); it != t.end() && !it->is_null())
    state = state_from_json(*it);
  return {std::move(u), std::move(state)};
}

inline nlohmann::json to_json(const Conversation& c) {
  nlohmann::json j;
  j["conversation_id"] = c.conversation_id;
  if (c.partition) j["partition"] = *c.partition;
  auto turns = nlohmann::json::array();
  for (std::size_t i = 0; i < c.turns.size(); ++i)
    turns.push_back(turn_to_json(c.turns[i], c.states ? &(*c.states)[i] : nullptr));
  j["turns"] = std::move(turns);
  return j;
}

inline Conversation conversation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("conversation record must be an object");
  Conversation c;
  c.conversation_id = detail::req_string(j, "conversation_id");
  c.partition = detail::opt_string(j, "partition");
  auto it = j.find("turns");
  if (it == j.end() || !it->is_array())
    throw DataError("missing array field 'turns'");
  std::vector<SystemState> states;
  std::size_t with_state = 0;
  for (const auto& t : *it) {
    auto [u, s] = turn_from_json(t);
    u.turn_index = c.turns.size();
    c.turns.push_back(std::move(u));
    if (s) {
      ++with_state;
      states.push_back(std::move(*s));
    }
  }
  if (with_state != 0) {
    if (with_state != c.turns.size())
      throw DataError("conversation '" + c.conversation_id + "': " +
                      std::to_string(with_state) + " of " +
                      std::to_string(c.turns.size()) +
                      " turns carry a state; states must align with turns");
    c.states = std::move(states);
  }
  validate_conversation(c);
  return c;
}

inline void write_corpus(std::ostream& out, const ConversationSet& set) {
  for (const auto& c : set) out << to_json(c).dump() << '\n';
}

inline void write_corpus(const std::string& path, const ConversationSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  write_corpus(out, set);
  if (!out) throw DataError("write failed: " + path);
}

inline ConversationSet read_corpus(std::istream& in, const std::string& name) {
  ConversationSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    try {
      set.push_back(conversation_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(name + ":" + std::to_string(lineno) +
                      ": malformed record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return set;
}

inline ConversationSet read_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return read_corpus(in, path);
}

// Checks every label against the tag set (and, for human-machine data,
// topics against the vocabulary and the user-turns-only labelling rule).
inline void validate_labels(const ConversationSet& set, const TagSet& tagset,
                            const TopicVocab* topics = nullptr) {
  for (const auto& c : set) {
    for (std::size_t i = 0; i < c.turns.size(); ++i) {
      const auto& u = c.turns[i];
      if (u.da && !tagset.contains(*u.da))
        throw DataError("conversation '" + c.conversation_id + "' turn " +
                        std::to_string(i) + ": label '" + *u.da +
                        "' is not in the tag set");
      if (c.states && u.da && u.speaker != Speaker::user)
        throw DataError("conversation '" + c.conversation_id + "' turn " +
                        std::to_string(i) + ": only user turns may carry a label");
    }
    if (c.states && topics) {
      for (const auto& s : *c.states) {
        if (!topics->contains(s.topic))
          throw DataError("unknown topic: " + s.topic);
        for (const auto* t : {&s.previous_topic, &s.suggested_topic})
          if (*t && !topics->contains(**t)) throw DataError("unknown topic: " + **t);
      }
    }
  }
}

// Reads a human-machine corpus in the canonical format and validates states,
// topics and labels.
inline ConversationSet parse_hm_corpus(const std::string& path, const TagSet& tagset,
                                       const TopicVocab& topics) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  ConversationSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    try {
      auto c = conversation_from_json(nlohmann::json::parse(line));
      if (!c.states)
        throw DataError("conversation '" + c.conversation_id +
                        "' has no system states");
      validate_labels({c}, tagset, &topics);
      set.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": malformed record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return set;
}

}  // namespace cdac::corpus
