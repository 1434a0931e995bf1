#pragma once

// Train-and-score harness shared by the ablation and context-window sweep.

#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdac/corpus/splits.hpp"
#include "cdac/error.hpp"
#include "cdac/eval/metrics.hpp"
#include "cdac/model/cdac.hpp"
#include "cdac/model/trainer.hpp"

namespace cdac::eval {

struct RunOutcome {
  double accuracy = 0;  // held-out (test split) micro accuracy
  std::size_t parameter_count = 0;
  model::TrainingHistory history;
  model::PredictionPairs predictions;
};

using TrainAndScore = std::function<RunOutcome(const model::ModelConfig&, std::uint64_t seed)>;

// Builds a fresh model on splits.train, trains with early stopping on
// splits.validation and scores splits.test. Build and training share `seed`.
inline TrainAndScore cdac_runner(const corpus::Splits& splits, model::BuildOptions build,
                                 model::TrainingConfig training) {
  return [&splits, build, training](const model::ModelConfig& cfg, std::uint64_t seed) {
    auto opt = build;
    opt.config = cfg;
    opt.seed = seed;
    auto m = model::build_model(splits.train, opt);
    auto tc = training;
    tc.seed = seed;
    RunOutcome out;
    out.history = model::train(m, splits.train, splits.validation, tc);
    out.predictions = model::predict_labeled(m, splits.test);
    out.accuracy = micro_accuracy(out.predictions.predicted, out.predictions.gold);
    out.parameter_count = m.net.params.trainable_count();
    return out;
  };
}

struct AblationCell {
  std::string name;
  bool lexical = true;
  bool syntactic = true;
  std::vector<double> accuracies;  // one per seed
  double mean_accuracy = 0;
  double delta_percent = 0;  // relative to the full-feature cell
  std::size_t parameter_count = 0;
};

struct AblationPlan {
  std::size_t context_window = 1;
  std::vector<std::uint64_t> seeds{7};
};

// Four cells in report order: both groups removed, syntactic removed, lexical
// removed, full. Masked groups are zero blocks of unchanged width, so all
// cells share one architecture; deltas are relative to the full cell.
inline std::vector<AblationCell> run_ablation(const TrainAndScore& run,
                                              const model::ModelConfig& base,
                                              const AblationPlan& plan) {
  std::vector<AblationCell> cells(4);
  const char* names[] = {"- syntactic & lexical", "- syntactic", "- lexical", "full features"};
  for (std::size_t i = 0; i < 4; ++i) {
    cells[i].name = names[i];
    cells[i].syntactic = i >= 2;
    cells[i].lexical = i == 1 || i == 3;
  }
  for (auto& cell : cells) {
    auto cfg = base;
    cfg.context_window = plan.context_window;
    cfg.use_lexical = cell.lexical;
    cfg.use_syntactic = cell.syntactic;
    for (auto seed : plan.seeds) {
      auto r = run(cfg, seed);
      cell.accuracies.push_back(r.accuracy);
      cell.parameter_count = r.parameter_count;
    }
    cell.mean_accuracy = std::accumulate(cell.accuracies.begin(), cell.accuracies.end(), 0.0) /
                         static_cast<double>(cell.accuracies.size());
  }
  const double full = cells.back().mean_accuracy;
  for (auto& cell : cells)
    cell.delta_percent = full > 0 ? 100.0 * (cell.mean_accuracy - full) / full : 0.0;
  return cells;
}

inline const AblationCell& full_cell(const std::vector<AblationCell>& cells) {
  for (const auto& c : cells)
    if (c.lexical && c.syntactic) return c;
  throw DataError("ablation has no full-feature cell");
}

inline const AblationCell& bare_cell(const std::vector<AblationCell>& cells) {
  for (const auto& c : cells)
    if (!c.lexical && !c.syntactic) return c;
  throw DataError("ablation has no cell with both groups removed");
}

inline nlohmann::json ablation_json(const std::vector<AblationCell>& cells) {
  auto j = nlohmann::json::array();
  for (const auto& c : cells)
    j.push_back({{"cell", c.name}, {"lexical", c.lexical}, {"syntactic", c.syntactic},
                 {"accuracies", c.accuracies}, {"mean_accuracy", c.mean_accuracy},
                 {"delta_percent", c.delta_percent}, {"parameter_count", c.parameter_count}});
  return j;
}

inline std::string ablation_table(const std::vector<AblationCell>& cells) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : cells) {
    std::string acc = fixed(100 * c.mean_accuracy);
    if (c.delta_percent != 0.0 || !(c.lexical && c.syntactic))
      acc += " (" + std::string(c.delta_percent >= 0 ? "+" : "") + fixed(c.delta_percent) + "%)";
    rows.push_back({c.syntactic ? "yes" : "-", c.lexical ? "yes" : "-", acc,
                    std::to_string(c.parameter_count)});
  }
  return format_table({"syntactic", "lexical", "accuracy", "parameters"}, rows);
}

struct SweepRow {
  std::size_t window = 0;
  std::vector<double> accuracies;
  double mean_accuracy = 0;
};

inline std::vector<SweepRow> context_sweep(const TrainAndScore& run, const model::ModelConfig& base,
                                           const std::vector<std::size_t>& windows,
                                           const std::vector<std::uint64_t>& seeds) {
  std::vector<SweepRow> rows;
  for (auto w : windows) {
    auto cfg = base;
    cfg.context_window = w;
    SweepRow row;
    row.window = w;
    for (auto seed : seeds) row.accuracies.push_back(run(cfg, seed).accuracy);
    row.mean_accuracy = std::accumulate(row.accuracies.begin(), row.accuracies.end(), 0.0) /
                        static_cast<double>(row.accuracies.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
  auto j = nlohmann::json::array();
  for (const auto& r : rows)
    j.push_back({{"model", r.window == 0 ? std::string("DAC") : "CDAC-" + std::to_string(r.window)},
                 {"context_window", r.window},
                 {"accuracies", r.accuracies},
                 {"mean_accuracy", r.mean_accuracy}});
  return j;
}

inline std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows)
    out.push_back({r.window == 0 ? std::string("DAC") : "CDAC-" + std::to_string(r.window),
                   fixed(100 * r.mean_accuracy)});
  return format_table({"model", "accuracy"}, out);
}

}  // namespace cdac::eval
