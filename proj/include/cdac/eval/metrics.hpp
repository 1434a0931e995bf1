#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdac/corpus/tagset.hpp"
#include "cdac/error.hpp"

namespace cdac::eval {

inline double micro_accuracy(const std::vector<std::size_t>& predicted,
                             const std::vector<std::size_t>& gold) {
  if (predicted.size() != gold.size())
    throw DataError("prediction/gold length mismatch: " + std::to_string(predicted.size()) +
                    " vs " + std::to_string(gold.size()));
  if (gold.empty()) throw DataError("accuracy of an empty prediction set is undefined");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hit += predicted[i] == gold[i];
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

// Rows: gold class; columns: predicted class.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::size_t> counts;
  std::size_t n = 0;

  ConfusionMatrix(std::size_t k, const std::vector<std::size_t>& predicted,
                  const std::vector<std::size_t>& gold)
      : classes(k), counts(k * k, 0) {
    if (predicted.size() != gold.size()) throw DataError("prediction/gold length mismatch");
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i] >= k || predicted[i] >= k) throw DataError("class id out of range");
      ++counts[gold[i] * k + predicted[i]];
    }
    n = gold.size();
  }

  std::size_t at(std::size_t g, std::size_t p) const { return counts[g * classes + p]; }

  std::size_t trace() const {
    std::size_t t = 0;
    for (std::size_t c = 0; c < classes; ++c) t += at(c, c);
    return t;
  }

  std::size_t row_sum(std::size_t g) const {
    std::size_t s = 0;
    for (std::size_t p = 0; p < classes; ++p) s += at(g, p);
    return s;
  }

  std::size_t col_sum(std::size_t p) const {
    std::size_t s = 0;
    for (std::size_t g = 0; g < classes; ++g) s += at(g, p);
    return s;
  }
};

struct ClassStats {
  std::string label;
  std::size_t support = 0;
  double precision = 0;
  double recall = 0;
};

struct EvalReport {
  double micro_accuracy = 0;
  std::size_t n = 0;
  std::vector<ClassStats> per_class;  // classes with gold or predicted mass
  std::vector<std::string> labels;    // confusion axes
  std::vector<std::vector<std::size_t>> confusion;
  nlohmann::json meta = nlohmann::json::object();
};

inline EvalReport make_report(const corpus::TagSet& tagset, const std::vector<std::size_t>& predicted,
                              const std::vector<std::size_t>& gold) {
  EvalReport r;
  const ConfusionMatrix cm(tagset.size(), predicted, gold);
  r.n = cm.n;
  r.micro_accuracy = cm.n ? static_cast<double>(cm.trace()) / static_cast<double>(cm.n) : 0.0;
  std::vector<std::size_t> used;
  for (std::size_t c = 0; c < tagset.size(); ++c)
    if (cm.row_sum(c) || cm.col_sum(c)) used.push_back(c);
  for (auto c : used) {
    ClassStats s;
    s.label = tagset.label(c);
    s.support = cm.row_sum(c);
    s.precision = cm.col_sum(c) ? static_cast<double>(cm.at(c, c)) / static_cast<double>(cm.col_sum(c)) : 0.0;
    s.recall = s.support ? static_cast<double>(cm.at(c, c)) / static_cast<double>(s.support) : 0.0;
    r.per_class.push_back(s);
    r.labels.push_back(s.label);
    std::vector<std::size_t> row;
    for (auto p : used) row.push_back(cm.at(c, p));
    r.confusion.push_back(std::move(row));
  }
  return r;
}

inline void to_json(nlohmann::json& j, const EvalReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& s : r.per_class)
    per.push_back({{"label", s.label}, {"support", s.support}, {"precision", s.precision},
                   {"recall", s.recall}});
  j = {{"micro_accuracy", r.micro_accuracy},
       {"n", r.n},
       {"per_class", per},
       {"confusion", {{"labels", r.labels}, {"counts", r.confusion}}},
       {"meta", r.meta}};
}

// Aligned plain-text table; numeric-looking cells are right-aligned.
inline std::string format_table(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  auto measure = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i)
      width[i] = std::max(width[i], r[i].size());
  };
  measure(header);
  for (const auto& r : rows) measure(r);
  auto numeric = [](const std::string& s) {
    return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-' || s[0] == '+');
  };
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string cell = i < r.size() ? r[i] : "";
      if (i) out << "  ";
      if (numeric(cell) && i > 0)
        out << std::setw(static_cast<int>(width[i])) << std::right << cell;
      else
        out << std::setw(static_cast<int>(width[i])) << std::left << cell;
    }
    out << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& r : rows) line(r);
  return out.str();
}

inline std::string fixed(double v, int digits = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

inline std::string report_table(const EvalReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : r.per_class)
    rows.push_back({s.label, std::to_string(s.support), fixed(100 * s.precision),
                    fixed(100 * s.recall)});
  return "micro accuracy: " + fixed(100 * r.micro_accuracy) + "% (n=" + std::to_string(r.n) +
         ")\n" + format_table({"label", "support", "precision", "recall"}, rows);
}

}  // namespace cdac::eval
