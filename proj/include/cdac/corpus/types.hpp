#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdac/error.hpp"

namespace cdac::corpus {

enum class Speaker { caller_a, caller_b, user, system };

inline std::string_view to_string(Speaker s) {
  switch (s) {
    case Speaker::caller_a: return "caller_a";
    case Speaker::caller_b: return "caller_b";
    case Speaker::user: return "user";
    case Speaker::system: return "system";
  }
  return "?";
}

inline Speaker speaker_from_string(std::string_view s) {
  if (s == "caller_a" || s == "A") return Speaker::caller_a;
  if (s == "caller_b" || s == "B") return Speaker::caller_b;
  if (s == "user") return Speaker::user;
  if (s == "system") return Speaker::system;
  throw DataError("unknown speaker role: " + std::string(s));
}

inline bool is_human_machine(Speaker s) {
  return s == Speaker::user || s == Speaker::system;
}

struct SystemState {
  std::string topic;
  std::optional<std::string> previous_topic;
  std::optional<std::string> suggested_topic;
  std::optional<std::string> suggested_item;
  std::string user_id;

  bool operator==(const SystemState&) const = default;
};

struct Utterance {
  std::size_t turn_index = 0;
  Speaker speaker = Speaker::caller_a;
  std::string text;
  std::optional<std::string> da;
  std::optional<std::vector<std::string>> pos;

  bool operator==(const Utterance&) const = default;
};

struct Conversation {
  std::string conversation_id;
  std::vector<Utterance> turns;
  // Human-machine only; aligned 1:1 with turns when present.
  std::optional<std::vector<SystemState>> states;
  // "train", "validation" or "test" when known.
  std::optional<std::string> partition;

  bool human_machine() const { return states.has_value(); }

  bool operator==(const Conversation&) const = default;
};

using ConversationSet = std::vector<Conversation>;

// Turns whose dialogue act is predicted: every turn in human-human data,
// user turns only in human-machine data.
inline bool is_eligible(const Utterance& u) { return u.speaker != Speaker::system; }

inline std::size_t count_utterances(const ConversationSet& set) {
  std::size_t n = 0;
  for (const auto& c : set) n += c.turns.size();
  return n;
}

inline void validate_conversation(const Conversation& c) {
  if (c.turns.empty())
    throw DataError("conversation '" + c.conversation_id + "' has no turns");
  for (std::size_t i = 0; i < c.turns.size(); ++i)
    if (c.turns[i].turn_index != i)
      throw DataError("conversation '" + c.conversation_id +
                      "': turn_index must run 0,1,2,... (turn " +
                      std::to_string(i) + " has index " +
                      std::to_string(c.turns[i].turn_index) + ")");
  if (c.states && c.states->size() != c.turns.size())
    throw DataError("conversation '" + c.conversation_id + "': " +
                    std::to_string(c.states->size()) + " states for " +
                    std::to_string(c.turns.size()) + " turns");
}

}  // namespace cdac::corpus
