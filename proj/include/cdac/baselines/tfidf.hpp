#pragma once

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdac/baselines/sparse.hpp"
#include "cdac/error.hpp"

namespace cdac::baselines {

// tf = raw count, idf(t) = ln((1 + N) / (1 + df(t))) + 1, L2-normalized;
// terms unseen at fit time are dropped.
class TfidfModel {
 public:
  using Doc = std::vector<std::string>;

  static TfidfModel fit(const std::vector<Doc>& docs) {
    if (docs.empty()) throw DataError("tf-idf needs at least one training document");
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
      std::map<std::string, bool> seen;
      for (const auto& t : d) seen[t] = true;
      for (const auto& [t, _] : seen) ++df[t];
    }
    TfidfModel m;
    m.n_docs_ = docs.size();
    const double n = static_cast<double>(docs.size());
    for (const auto& [t, count] : df) {
      m.index_.emplace(t, static_cast<std::uint32_t>(m.terms_.size()));
      m.terms_.push_back(t);
      m.df_.push_back(count);
      m.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return m;
  }

  SparseVector transform(const Doc& doc) const {
    std::map<std::uint32_t, double> tf;
    for (const auto& t : doc) {
      auto it = index_.find(t);
      if (it != index_.end()) tf[it->second] += 1.0;
    }
    SparseVector v;
    for (const auto& [i, count] : tf) v.push(i, count * idf_[i]);
    const double n = v.norm();
    if (n > 0)
      for (auto& x : v.value) x /= n;
    return v;
  }

  std::size_t dim() const { return terms_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }

  double idf(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) throw DataError("term not in tf-idf model: " + term);
    return idf_[it->second];
  }

 private:
  std::size_t n_docs_ = 0;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace cdac::baselines
