#include <gtest/gtest.h>

#include "cdac/eval/experiment.hpp"
#include "cdac/eval/mcnemar.hpp"
#include "cdac/eval/metrics.hpp"
#include "cdac/eval/report.hpp"

using namespace cdac;
using namespace cdac::eval;

TEST(Accuracy, Examples) {
  EXPECT_DOUBLE_EQ(micro_accuracy({0, 1, 0}, {0, 0, 0}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(micro_accuracy({3, 4}, {3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(micro_accuracy({1, 1}, {2, 2}), 0.0);
  EXPECT_THROW(micro_accuracy({1}, {1, 2}), DataError);
}

TEST(McNemar, ContinuityCorrectedStatistic) {
  auto r = mcnemar_counts(10, 2);
  EXPECT_NEAR(r.statistic, 49.0 / 12.0, 1e-12);
  EXPECT_NEAR(r.statistic, 4.083, 1e-3);
  EXPECT_TRUE(r.significant);
  auto even = mcnemar_counts(7, 7);
  EXPECT_LE(even.statistic, 1e-12);
  EXPECT_FALSE(even.significant);
  auto same = mcnemar({1, 2, 3}, {1, 2, 3}, {1, 0, 3});
  EXPECT_EQ(same.b, 0u);
  EXPECT_EQ(same.c, 0u);
  EXPECT_FALSE(same.significant);
}

TEST(McNemar, CountsDiscordantPairs) {
  // A right / B wrong twice, A wrong / B right once.
  auto r = mcnemar({0, 1, 2, 9}, {0, 9, 9, 3}, {0, 1, 2, 3});
  EXPECT_EQ(r.b, 2u);
  EXPECT_EQ(r.c, 1u);
  EXPECT_TRUE(r.exact);
}

TEST(Report, PerClassAndConfusion) {
  const auto tags = corpus::TagSet::swda42();
  const auto sd = tags.id("sd"), aa = tags.id("aa");
  auto r = make_report(tags, {sd, sd, aa, aa}, {sd, aa, aa, aa});
  EXPECT_DOUBLE_EQ(r.micro_accuracy, 0.75);
  EXPECT_EQ(r.n, 4u);
  EXPECT_EQ(r.labels.size(), 2u);
  nlohmann::json j = r;
  EXPECT_EQ(j["n"], 4);
  EXPECT_NE(report_table(r).find("75.00"), std::string::npos);
}

TEST(Report, FingerprintIsStable) {
  nlohmann::json a = {{"b", 1}, {"a", 2}};
  nlohmann::json b = {{"a", 2}, {"b", 1}};
  EXPECT_EQ(config_fingerprint(a), config_fingerprint(b));
  EXPECT_EQ(config_fingerprint(a).size(), 16u);
  EXPECT_NE(config_fingerprint(a), config_fingerprint({{"a", 3}}));
}

namespace {

// Scores are a fixed function of the feature switches and window, so the
// harness can be checked without training.
RunOutcome fake_run(const model::ModelConfig& cfg, std::uint64_t seed) {
  RunOutcome r;
  r.accuracy = 0.5 + 0.1 * cfg.use_lexical + 0.2 * cfg.use_syntactic +
               0.01 * static_cast<double>(cfg.context_window) + 0.001 * static_cast<double>(seed);
  r.parameter_count = cfg.fc_input_dim();
  return r;
}

}  // namespace

TEST(Ablation, ShapeAndDeltas) {
  model::ModelConfig base;
  AblationPlan plan;
  plan.seeds = {1, 2, 3};
  auto cells = run_ablation(fake_run, base, plan);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_FALSE(cells[0].lexical || cells[0].syntactic);
  EXPECT_TRUE(cells[3].lexical && cells[3].syntactic);
  for (const auto& c : cells) {
    EXPECT_EQ(c.accuracies.size(), 3u);
    EXPECT_EQ(c.parameter_count, cells[0].parameter_count);
  }
  const auto& full = full_cell(cells);
  EXPECT_NEAR(full.mean_accuracy, 0.5 + 0.3 + 0.01 + 0.002, 1e-12);
  EXPECT_DOUBLE_EQ(full.delta_percent, 0.0);
  EXPECT_NEAR(bare_cell(cells).delta_percent,
              100.0 * (bare_cell(cells).mean_accuracy - full.mean_accuracy) / full.mean_accuracy,
              1e-12);
  EXPECT_NE(ablation_table(cells).find("syntactic"), std::string::npos);
}

TEST(Sweep, RowsFollowWindows) {
  model::ModelConfig base;
  auto rows = context_sweep(fake_run, base, {3}, {1});
  ASSERT_EQ(rows.size(), 1u);
  base.context_window = 3;
  EXPECT_DOUBLE_EQ(rows[0].mean_accuracy, fake_run(base, 1).accuracy);
  auto three = context_sweep(fake_run, base, {0, 2, 4}, {1, 2});
  EXPECT_EQ(three.size(), 3u);
  EXPECT_EQ(sweep_json(three)[0]["model"], "DAC");
  EXPECT_NE(sweep_table(three).find("CDAC-4"), std::string::npos);
}
