#pragma once

// Text embedding files: one line per token, "token v1 v2 ... vD", with an
// optional leading "count dim" header line.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cdac/error.hpp"

namespace cdac::features {

class WordVectorLookup {
 public:
  virtual ~WordVectorLookup() = default;
  virtual std::size_t dim() const = 0;
  // Empty span when the token has no vector.
  virtual std::span<const float> find(const std::string& token) const = 0;
};

class Embeddings : public WordVectorLookup {
 public:
  explicit Embeddings(std::size_t dim = 300) : dim_(dim) {}

  std::size_t dim() const override { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  std::span<const float> find(const std::string& token) const override {
    auto it = vectors_.find(token);
    if (it == vectors_.end()) return {};
    return it->second;
  }

  void set(const std::string& token, std::vector<float> v) {
    if (v.size() != dim_)
      throw DataError("embedding for '" + token + "' has dimension " +
                      std::to_string(v.size()) + ", expected " + std::to_string(dim_));
    vectors_[token] = std::move(v);
  }

  const std::unordered_map<std::string, std::vector<float>>& vectors() const {
    return vectors_;
  }

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

// Loads vectors of dimension `dim`. When `keep` is given only those tokens
// are retained.
inline Embeddings load_embeddings(const std::string& path, std::size_t dim,
                                  const std::unordered_set<std::string>* keep = nullptr) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file: " + path);
  Embeddings emb(dim);
  std::string line;
  std::size_t lineno = 0;
  std::vector<float> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    const std::string token = line.substr(0, sp);
    if (lineno == 1) {
      // "count dim" header: exactly two integer fields.
      std::istringstream hs(line);
      std::string a, b, extra;
      hs >> a >> b;
      if (!(hs >> extra) && !a.empty() && !b.empty() &&
          a.find_first_not_of("0123456789") == std::string::npos &&
          b.find_first_not_of("0123456789") == std::string::npos) {
        if (std::stoul(b) != dim)
          throw DataError(path + ": header declares dimension " + b + ", expected " +
                          std::to_string(dim));
        continue;
      }
    }
    if (keep && !keep->count(token)) continue;
    values.clear();
    const char* p = line.data() + (sp == std::string::npos ? line.size() : sp);
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p >= end) break;
      char* next = nullptr;
      const float v = std::strtof(p, &next);
      if (next == p)
        throw DataError(path + ":" + std::to_string(lineno) + ": bad number");
      values.push_back(v);
      p = next;
    }
    if (values.size() != dim)
      throw DataError(path + ":" + std::to_string(lineno) + ": token '" + token +
                      "' has " + std::to_string(values.size()) + " values, expected " +
                      std::to_string(dim));
    emb.set(token, values);
  }
  return emb;
}

inline void write_embeddings(const std::string& path, const Embeddings& emb) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  std::vector<std::string> tokens;
  for (const auto& [t, _] : emb.vectors()) tokens.push_back(t);
  std::sort(tokens.begin(), tokens.end());
  out << tokens.size() << ' ' << emb.dim() << '\n';
  out << std::setprecision(6);
  for (const auto& t : tokens) {
    out << t;
    for (float v : emb.find(t)) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace cdac::features
