#pragma once

#include <fstream>
#include <map>
#include <string>

#include "json.hpp"

#include "cdac/corpus/splits.hpp"
#include "cdac/error.hpp"
#include "cdac/util/hash.hpp"

namespace cdac::eval {

inline constexpr const char* kToolVersion = "cdac 0.1.0";

// First 16 hex digits of the SHA-256 of the compact JSON dump (keys sorted).
inline std::string config_fingerprint(const nlohmann::json& config) {
  return util::sha256_hex(config.dump()).substr(0, 16);
}

inline nlohmann::json split_hashes(const corpus::Splits& s) {
  return {{"train", util::digest_ids(corpus::conversation_ids(s.train))},
          {"validation", util::digest_ids(corpus::conversation_ids(s.validation))},
          {"test", util::digest_ids(corpus::conversation_ids(s.test))}};
}

// Reproduction metadata embedded in every report.
inline nlohmann::json report_meta(std::uint64_t seed, const nlohmann::json& config,
                                  nlohmann::json hashes) {
  return {{"tool", kToolVersion},
          {"seed", seed},
          {"config", config},
          {"config_fingerprint", config_fingerprint(config)},
          {"input_hashes", std::move(hashes)}};
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace cdac::eval
