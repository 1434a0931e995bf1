#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

#include "cdac/corpus/canonical.hpp"
#include "cdac/corpus/synthetic.hpp"
#include "cdac/util/strings.hpp"

using namespace cdac;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return std::string(CDAC_FIXTURE_DIR) + "/" + name; }
std::string corpus_topics() { return corpus::data_dir() + "/topics.txt"; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cdac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the CLI through the shell and returns its exit code.
  int run(const std::string& args) const {
    const std::string cmd = std::string(CDAC_CLI_PATH) + " " + args + " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  // Balanced five-label human-human corpus; the label is fixed by a keyword.
  void write_balanced_corpus(const std::string& file, std::size_t n) const {
    const std::vector<std::pair<std::string, std::string>> kinds = {
        {"okay", "b"}, {"think", "sv"}, {"what", "qw"}, {"yes", "ny"}, {"bye", "fc"}};
    corpus::ConversationSet set;
    for (std::size_t c = 0; c < n; ++c) {
      corpus::Conversation conv;
      conv.conversation_id = "bal" + std::to_string(c);
      for (std::size_t t = 0; t < 10; ++t) {
        corpus::Utterance u;
        u.turn_index = t;
        u.speaker = t % 2 ? corpus::Speaker::caller_b : corpus::Speaker::caller_a;
        u.text = "well " + kinds[t % kinds.size()].first + " then";
        u.da = kinds[t % kinds.size()].second;
        conv.turns.push_back(u);
      }
      set.push_back(std::move(conv));
    }
    corpus::write_corpus(file, set);
  }

  static nlohmann::json read_json(const std::string& file) {
    return nlohmann::json::parse(util::read_file(file));
  }

  fs::path dir_;
};

const char* kSmall = " --embedding-dim 8 --max-len 12 --batch 8 ";

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run("train --corpus x.jsonl"), 1);  // --out missing
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, DataErrors) {
  EXPECT_EQ(run("train --corpus " + path("missing.jsonl") + " --out " + path("m.ckpt")), 2);
  EXPECT_EQ(run("prepare-hm --in " + fixture("hm_missing_state.jsonl") + " --out " +
                path("o.jsonl") + " --topics " + corpus_topics()),
            2);
}

TEST_F(Cli, AgreementWithItself) {
  ASSERT_EQ(run("agreement --a " + fixture("annot_a.tsv") + " --b " + fixture("annot_a.tsv") +
                " > " + path("out.json")),
            0);
  auto j = read_json(path("out.json"));
  EXPECT_DOUBLE_EQ(j["cohen_kappa"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j["raw_agreement"].get<double>(), 1.0);
  ASSERT_EQ(run("agreement --a " + fixture("annot_a.tsv") + " --b " + fixture("annot_b.tsv") +
                " > " + path("out2.json")),
            0);
  EXPECT_NEAR(read_json(path("out2.json"))["cohen_kappa"].get<double>(), 0.63636, 1e-5);
}

TEST_F(Cli, PrepareAndPrepareHm) {
  ASSERT_EQ(run("prepare --swda " + fixture("swda") + " --test-list " +
                fixture("swda_test_list.txt") + " --out " + path("swda.jsonl")),
            0);
  auto set = corpus::read_corpus(path("swda.jsonl"));
  ASSERT_EQ(set.size(), 2u);
  auto manifest = read_json(path("swda.jsonl.splits.json"));
  EXPECT_EQ(manifest["partitions"]["test"]["conversations"], 1);
  EXPECT_EQ(manifest["merged_continuations"], 1);
  ASSERT_EQ(run("prepare-hm --in " + fixture("hm_example.jsonl") + " --out " + path("hm.jsonl") +
                " --topics " + corpus_topics()),
            0);
  EXPECT_EQ(corpus::read_corpus(path("hm.jsonl")).size(), 1u);
}

TEST_F(Cli, SynthIsDeterministic) {
  ASSERT_EQ(run("synth --n 5 --seed 3 --out " + path("a.jsonl")), 0);
  ASSERT_EQ(run("synth --n 5 --seed 3 --out " + path("b.jsonl")), 0);
  EXPECT_EQ(util::read_file(path("a.jsonl")), util::read_file(path("b.jsonl")));
  ASSERT_EQ(run("synth --kind hh --n 2 --seed 3 --out " + path("hh.jsonl")), 0);
  EXPECT_EQ(corpus::read_corpus(path("hh.jsonl")).size(), 2u);
  std::ofstream(path("bad.json")) << R"({"aa": 0.5, "sv": 0.4})";
  EXPECT_EQ(run("synth --n 5 --dist " + path("bad.json") + " --out " + path("c.jsonl")), 2);
}

TEST_F(Cli, UntrainedModelScoresNearChance) {
  write_balanced_corpus(path("bal.jsonl"), 20);
  ASSERT_EQ(run("train --corpus " + path("bal.jsonl") + " --out " + path("m.ckpt") +
                " --max-epochs 0" + kSmall),
            0);
  ASSERT_EQ(run("evaluate --ckpt " + path("m.ckpt") + " --corpus " + path("bal.jsonl") +
                " --split all --out " + path("r.json")),
            0);
  auto r = read_json(path("r.json"));
  EXPECT_EQ(r["n"], 200);
  // Untrained scores spread over all 42 labels, so nothing beats the 1/5 of a
  // constant guess by more than noise.
  EXPECT_LE(r["micro_accuracy"].get<double>(), 0.2 + 0.15);
  EXPECT_EQ(r["meta"]["config"]["max_epochs"], 0);
}

TEST_F(Cli, FlagBeatsConfigFileBeatsDefault) {
  write_balanced_corpus(path("bal.jsonl"), 10);
  std::ofstream(path("cfg.json")) << R"({"context_window": 1, "max_epochs": 0, "patience": 5})";
  ASSERT_EQ(run("train --corpus " + path("bal.jsonl") + " --out " + path("m.ckpt") +
                " --config " + path("cfg.json") + " --context-window 2" + kSmall),
            0);
  auto h = read_json(path("m.ckpt.history.json"));
  EXPECT_EQ(h["meta"]["config"]["context_window"], 2);  // flag
  EXPECT_EQ(h["meta"]["config"]["patience"], 5);        // file
  EXPECT_EQ(h["meta"]["config"]["dropout"], 0.5);       // default
  std::ofstream(path("typo.json")) << R"({"contex_window": 1})";
  EXPECT_EQ(run("train --corpus " + path("bal.jsonl") + " --out " + path("m2.ckpt") +
                " --config " + path("typo.json")),
            1);
}

TEST_F(Cli, StreamOneLinePerEligibleTurnAndOrderGuard) {
  write_balanced_corpus(path("bal.jsonl"), 10);
  ASSERT_EQ(run("train --corpus " + path("bal.jsonl") + " --out " + path("m.ckpt") +
                " --max-epochs 1" + kSmall),
            0);
  const auto set = corpus::read_corpus(path("bal.jsonl"));
  std::ofstream in(path("turns.jsonl")), bad(path("bad.jsonl"));
  for (std::size_t i = 0; i < 4; ++i) {
    auto t = corpus::turn_to_json(set[0].turns[i], nullptr);
    t["conversation_id"] = set[0].conversation_id;
    t["turn_index"] = i;
    in << t.dump() << '\n';
    auto u = corpus::turn_to_json(set[1].turns[i], nullptr);
    u["conversation_id"] = set[1].conversation_id;
    u["turn_index"] = i;
    in << u.dump() << '\n';
    if (i != 1) bad << t.dump() << '\n';  // skips turn 1
  }
  in.close();
  bad.close();
  ASSERT_EQ(run("predict --ckpt " + path("m.ckpt") + " --stream < " + path("turns.jsonl") +
                " > " + path("pred.jsonl")),
            0);
  const auto lines = util::read_lines(path("pred.jsonl"));
  ASSERT_EQ(lines.size(), 8u);
  auto first = nlohmann::json::parse(lines[0]), second = nlohmann::json::parse(lines[1]);
  EXPECT_EQ(first["conversation_id"], set[0].conversation_id);
  EXPECT_EQ(second["conversation_id"], set[1].conversation_id);
  double mass = 0;
  for (auto& [k, v] : first["probabilities"].items()) mass += v.get<double>();
  EXPECT_NEAR(mass, 1.0, 1e-5);
  EXPECT_EQ(run("predict --ckpt " + path("m.ckpt") + " --stream < " + path("bad.jsonl") +
                " > " + path("pred2.jsonl")),
            2);
}

TEST_F(Cli, BaselineReport) {
  ASSERT_EQ(run("synth --n 10 --seed 2 --out " + path("hm.jsonl")), 0);
  ASSERT_EQ(run("baseline --kind svm --context --corpus " + path("hm.jsonl") +
                " --seeds 1,2 --out " + path("b.json")),
            0);
  auto j = read_json(path("b.json"));
  EXPECT_EQ(j["runs"].size(), 2u);
  EXPECT_EQ(j["runs"][0]["fold_accuracy"].size(), 5u);
  EXPECT_TRUE(j["meta"].contains("config_fingerprint"));
}
