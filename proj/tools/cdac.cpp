// cdac: command-line entry point. Reports go to stdout or --out files;
// diagnostics go to stderr. Exit codes: 0 ok, 1 usage, 2 data, 3 runtime.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdac/baselines/cross_validate.hpp"
#include "cdac/cli/run_config.hpp"
#include "cdac/corpus/annotations.hpp"
#include "cdac/corpus/canonical.hpp"
#include "cdac/corpus/swda.hpp"
#include "cdac/corpus/synthetic.hpp"
#include "cdac/eval/experiment.hpp"
#include "cdac/eval/mcnemar.hpp"
#include "cdac/eval/metrics.hpp"
#include "cdac/eval/report.hpp"
#include "cdac/features/tokenize.hpp"
#include "cdac/model/checkpoint.hpp"
#include "cdac/model/trainer.hpp"
#include "cdac/util/hash.hpp"

using namespace cdac;
using nlohmann::json;

namespace {

std::string file_hash(const std::string& path) {
  return util::sha256_hex(util::read_file(path));
}

std::string data_path(const std::string& name) { return corpus::data_dir() + "/" + name; }

// Tunables settable by flag; unset flags leave the file/default value alone.
struct Overrides {
  std::string config_file;
  std::optional<std::size_t> context_window, batch_size, embedding_dim, max_len, max_epochs,
      patience;
  std::optional<double> learning_rate, finetune_learning_rate, dropout;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app, const std::string& config_names = "--config") {
    app->add_option(config_names, config_file, "JSON run config (flags override it)");
    app->add_option("--context-window", context_window, "previous turns used as context (m)");
    app->add_option("--lr", learning_rate, "learning rate");
    app->add_option("--finetune-lr", finetune_learning_rate, "fine-tuning learning rate");
    app->add_option("--batch", batch_size, "mini-batch size");
    app->add_option("--dropout", dropout, "dropout rate before the output layer");
    app->add_option("--embedding-dim", embedding_dim, "word embedding dimension");
    app->add_option("--max-len", max_len, "tokens kept per utterance");
    app->add_option("--max-epochs", max_epochs, "epoch budget");
    app->add_option("--patience", patience, "early-stopping patience in epochs");
    app->add_option("--seed", seed, "random seed");
  }

  // default < `base` (e.g. a checkpoint's stored config) < config file < flags
  cli::RunConfig resolve(const json& base = json::object()) const {
    std::vector<json> layers{base};
    if (!config_file.empty()) layers.push_back(cli::read_run_config_file(config_file));
    auto c = cli::merge_run_config(layers);
    if (context_window) c.context_window = *context_window;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (finetune_learning_rate) c.finetune_learning_rate = *finetune_learning_rate;
    if (batch_size) c.batch_size = *batch_size;
    if (dropout) c.dropout = *dropout;
    if (embedding_dim) c.embedding_dim = *embedding_dim;
    if (max_len) c.max_len = *max_len;
    if (max_epochs) c.max_epochs = *max_epochs;
    if (patience) c.patience = *patience;
    if (seed) c.seed = *seed;
    c.validate();
    return c;
  }
};

struct Resources {
  std::string topics_file;
  std::string pos_lexicon;
  std::string tagger = "lexicon";

  void attach(CLI::App* app) {
    app->add_option("--topics", topics_file, "topic list (default: data dir topics.txt)");
    app->add_option("--pos-lexicon", pos_lexicon, "word<TAB>tag lexicon for the POS tagger");
    app->add_option("--tagger", tagger, "lexicon | pass_through (use corpus 'pos' fields)")
        ->check(CLI::IsMember({"lexicon", "pass_through"}));
  }

  corpus::TopicVocab topics() const {
    return corpus::TopicVocab::from_file(topics_file.empty() ? data_path("topics.txt")
                                                             : topics_file);
  }

  model::BuildOptions build_options(const cli::RunConfig& rc) const {
    model::BuildOptions b;
    b.config = rc.model_config();
    b.topics = topics();
    b.seed = rc.seed;
    if (tagger == "pass_through") {
      b.tagger_kind = model::TaggerKind::pass_through;
    } else {
      b.tagger_kind = model::TaggerKind::lexicon;
      b.lexicon_tagger = features::LexiconTagger::from_file(
          pos_lexicon.empty() ? data_path("pos_lexicon.tsv") : pos_lexicon);
    }
    return b;
  }
};

// Loads only the vectors of tokens that occur in the corpus (texts and
// suggested item names).
features::Embeddings load_corpus_embeddings(const std::string& path, std::size_t dim,
                                            const corpus::ConversationSet& set) {
  std::unordered_set<std::string> keep;
  for (const auto& c : set)
    for (std::size_t i = 0; i < c.turns.size(); ++i) {
      for (auto& t : features::tokenize(c.turns[i].text)) keep.insert(t);
      if (c.states && (*c.states)[i].suggested_item)
        for (auto& t : features::tokenize(*(*c.states)[i].suggested_item)) keep.insert(t);
    }
  return features::load_embeddings(path, dim, &keep);
}

corpus::ConversationSet read_any_corpus(const std::string& path) {
  return corpus::read_corpus(path);
}

json run_meta(const cli::RunConfig& rc, json hashes) {
  return eval::report_meta(rc.seed, json(rc), std::move(hashes));
}

void emit(const json& report, const std::string& out) {
  if (out.empty())
    std::cout << report.dump(2) << '\n';
  else
    eval::write_json(out, report);
}

std::vector<std::uint64_t> parse_seeds(const std::vector<std::uint64_t>& seeds,
                                       std::uint64_t fallback) {
  return seeds.empty() ? std::vector<std::uint64_t>{fallback} : seeds;
}

// --- subcommands -------------------------------------------------------------

int cmd_prepare(const std::string& swda_dir, const std::string& out,
                const std::string& collapse_map, const std::string& test_list,
                const std::string& labels_file) {
  auto tags = labels_file.empty() ? corpus::TagSet::swda42()
                                  : corpus::TagSet::from_labels_file(labels_file);
  tags = tags.with_collapse_map_file(collapse_map.empty() ? data_path("swda_collapse.tsv")
                                                          : collapse_map);
  corpus::SwdaParseStats stats;
  std::optional<std::string> tl;
  if (!test_list.empty()) tl = test_list;
  else std::cerr << "note: no --test-list given; every conversation is labelled 'train'\n";
  auto set = corpus::parse_swda(swda_dir, tags, tl, &stats);
  corpus::write_corpus(out, set);

  std::map<std::string, std::pair<std::size_t, std::size_t>> parts;
  std::map<std::string, std::vector<std::string>> ids;
  for (const auto& c : set) {
    const auto p = c.partition.value_or("unlabelled");
    parts[p].first += 1;
    parts[p].second += c.turns.size();
    ids[p].push_back(c.conversation_id);
  }
  json manifest;
  manifest["tool"] = eval::kToolVersion;
  manifest["corpus"] = out;
  manifest["corpus_sha256"] = file_hash(out);
  manifest["files"] = stats.files;
  manifest["rows"] = stats.rows;
  manifest["merged_continuations"] = stats.merged_continuations;
  manifest["orphan_continuations"] = stats.orphan_continuations;
  for (const auto& [p, n] : parts) {
    manifest["partitions"][p] = {{"conversations", n.first},
                                 {"utterances", n.second},
                                 {"ids", ids[p]},
                                 {"ids_digest", util::digest_ids(ids[p])}};
    std::cerr << p << ": " << n.first << " conversations, " << n.second << " utterances\n";
  }
  eval::write_json(out + ".splits.json", manifest);
  return 0;
}

int cmd_prepare_hm(const std::string& in, const std::string& out, const std::string& topics) {
  auto set = corpus::parse_hm_corpus(in, corpus::TagSet::swda42(),
                                     corpus::TopicVocab::from_file(topics));
  corpus::write_corpus(out, set);
  std::cerr << set.size() << " conversations, " << corpus::count_utterances(set)
            << " utterances\n";
  return 0;
}

int cmd_synth(const std::string& kind, std::size_t n, const std::string& dist_file,
              std::uint64_t seed, const std::string& out, std::size_t dim,
              const std::string& templates, const Resources& res) {
  const auto bank = templates.empty() ? corpus::TemplateBank::shipped()
                                      : corpus::TemplateBank::from_file(templates);
  if (kind == "embeddings") {
    features::write_embeddings(out, corpus::synthetic_embeddings(bank, dim, seed));
    return 0;
  }
  corpus::ConversationSet set;
  if (kind == "hh") {
    set = corpus::generate_synthetic_hh(n, seed, bank);
  } else {
    const auto dist = corpus::read_distribution(
        dist_file.empty() ? data_path("hm_distribution.json") : dist_file);
    set = corpus::generate_synthetic_hm(n, dist, res.topics(), seed, bank);
  }
  corpus::write_corpus(out, set);
  std::cerr << set.size() << " conversations, " << corpus::count_utterances(set)
            << " utterances\n";
  return 0;
}

void save_with_history(const model::CdacModel& m, const std::string& out,
                       const std::string& history_out, const model::TrainingHistory& h,
                       const json& meta) {
  model::save_checkpoint(m, out);
  json hist = h;
  hist["meta"] = meta;
  eval::write_json(history_out.empty() ? out + ".history.json" : history_out, hist);
}

int cmd_train(const Overrides& ov, const Resources& res, const std::string& corpus_file,
              const std::string& embeddings, const std::string& out,
              const std::string& history_out, bool verbose) {
  const auto rc = ov.resolve();
  const auto set = read_any_corpus(corpus_file);
  const auto splits = cli::resolve_splits(set, rc);
  auto bo = res.build_options(rc);
  std::optional<features::Embeddings> emb;
  json hashes = {{"corpus", file_hash(corpus_file)}, {"splits", eval::split_hashes(splits)}};
  if (!embeddings.empty()) {
    emb = load_corpus_embeddings(embeddings, rc.embedding_dim, set);
    bo.pretrained = &*emb;
    hashes["embeddings"] = file_hash(embeddings);
  } else {
    std::cerr << "note: no --embeddings given; word vectors are randomly initialized\n";
  }
  auto m = model::build_model(splits.train, bo);
  auto tc = rc.training_config();
  tc.verbose = verbose;
  const auto h = model::train(m, splits.train, splits.validation, tc, verbose ? &std::cerr : nullptr);
  const auto meta = run_meta(rc, hashes);
  m.provenance["run_config"] = json(rc);
  m.provenance["input_hashes"] = hashes;
  save_with_history(m, out, history_out, h, meta);
  std::cerr << "best epoch " << h.best_epoch << " of " << h.epochs.size() << '\n';
  return 0;
}

json stored_config(const model::CdacModel& m) {
  auto it = m.provenance.find("run_config");
  return it == m.provenance.end() ? json::object() : *it;
}

int cmd_finetune(const Overrides& ov, const std::string& ckpt, const std::string& corpus_file,
                 const std::string& embeddings, const std::string& out,
                 const std::string& history_out, bool verbose) {
  auto m = model::load_checkpoint(ckpt);
  // The pretrained run's data settings do not carry over; only the model does.
  const auto rc = ov.resolve();
  const auto set = read_any_corpus(corpus_file);
  const auto splits = cli::resolve_splits(set, rc);
  auto tc = rc.training_config(true);
  tc.verbose = verbose;
  json hashes = {{"corpus", file_hash(corpus_file)},
                 {"pretrained_checkpoint", file_hash(ckpt)},
                 {"splits", eval::split_hashes(splits)}};
  std::optional<features::Embeddings> emb;
  if (!embeddings.empty()) {
    emb = load_corpus_embeddings(embeddings, m.config.word_embedding_dim, set);
    hashes["embeddings"] = file_hash(embeddings);
  }
  const auto h = model::finetune(m, splits.train, splits.validation, tc,
                                 verbose ? &std::cerr : nullptr, emb ? &*emb : nullptr);
  if (!verbose)
    for (const auto& w : h.warnings) std::cerr << "warning: " << w << '\n';
  m.provenance["run_config"] = json(rc);
  m.provenance["input_hashes"] = hashes;
  save_with_history(m, out, history_out, h, run_meta(rc, hashes));
  std::cerr << "best epoch " << h.best_epoch << " of " << h.epochs.size() << '\n';
  return 0;
}

int cmd_evaluate(const Overrides& ov, const std::string& ckpt, const std::string& corpus_file,
                 const std::string& split, const std::string& against, const std::string& out) {
  const auto m = model::load_checkpoint(ckpt);
  const auto rc = ov.resolve(stored_config(m));
  const auto set = read_any_corpus(corpus_file);
  const auto splits = cli::resolve_splits(set, rc);
  const auto& part = split == "all" ? set : cli::split_named(splits, split);
  const auto pairs = model::predict_labeled(m, part);
  auto report = eval::make_report(m.tagset, pairs.predicted, pairs.gold);
  json hashes = {{"corpus", file_hash(corpus_file)},
                 {"checkpoint", file_hash(ckpt)},
                 {"splits", eval::split_hashes(splits)}};
  json j = report;
  j["split"] = split;
  if (!against.empty()) {
    const auto other = model::load_checkpoint(against);
    const auto op = model::predict_labeled(other, part);
    if (op.gold != pairs.gold) throw DataError("checkpoints disagree on the gold sequence");
    hashes["against"] = file_hash(against);
    const auto test = eval::mcnemar(pairs.predicted, op.predicted, pairs.gold);
    j["mcnemar"] = test;
    j["against_accuracy"] = eval::micro_accuracy(op.predicted, op.gold);
  }
  j["meta"] = run_meta(rc, hashes);
  std::cerr << eval::report_table(report);
  emit(j, out);
  return 0;
}

json prediction_record(const model::CdacModel& m, const std::string& conv,
                       const model::TurnPrediction& p) {
  json probs = json::object();
  if (m.allowed_labels.empty()) {
    for (std::size_t c = 0; c < p.probs.size(); ++c) probs[m.tagset.label(c)] = p.probs[c];
  } else {
    // Renormalized over the labels the model may emit.
    double mass = 0;
    for (auto c : m.allowed_labels) mass += p.probs[c];
    for (auto c : m.allowed_labels)
      probs[m.tagset.label(c)] = mass > 0 ? p.probs[c] / mass : 0.0;
  }
  return {{"conversation_id", conv},
          {"turn_index", p.turn_index},
          {"label", m.tagset.label(p.label)},
          {"probabilities", std::move(probs)}};
}

// Each input line is a canonical turn object plus "conversation_id" and
// "turn_index". Turns of a conversation must arrive in order.
int cmd_predict_stream(const model::CdacModel& m, std::istream& in) {
  std::map<std::string, model::PredictionSession> sessions;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    const auto where = "stdin:" + std::to_string(lineno) + ": ";
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(where + "malformed record: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("conversation_id") || !rec["conversation_id"].is_string())
      throw DataError(where + "record needs a string 'conversation_id'");
    if (!rec.contains("turn_index") || !rec["turn_index"].is_number_unsigned())
      throw DataError(where + "record needs a non-negative integer 'turn_index'");
    const auto conv = rec["conversation_id"].get<std::string>();
    const auto index = rec["turn_index"].get<std::size_t>();
    std::pair<corpus::Utterance, std::optional<corpus::SystemState>> turn;
    try {
      turn = corpus::turn_from_json(rec);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    auto it = sessions.try_emplace(conv, m).first;
    if (index != it->second.turns_seen())
      throw DataError(where + "conversation '" + conv + "' expected turn " +
                      std::to_string(it->second.turns_seen()) + ", got " +
                      std::to_string(index) + " (turns must arrive in order)");
    turn.first.turn_index = index;
    if (auto p = it->second.push(turn.first, turn.second ? &*turn.second : nullptr))
      std::cout << prediction_record(m, conv, *p).dump() << std::endl;
  }
  return 0;
}

int cmd_predict(const std::string& ckpt, bool stream, const std::string& corpus_file) {
  const auto m = model::load_checkpoint(ckpt);
  if (stream) return cmd_predict_stream(m, std::cin);
  const auto set = corpus_file.empty() ? corpus::read_corpus(std::cin, "stdin")
                                       : corpus::read_corpus(corpus_file);
  for (const auto& c : set)
    for (const auto& p : model::predict_conversation(m, c))
      std::cout << prediction_record(m, c.conversation_id, p).dump() << '\n';
  return 0;
}

int cmd_baseline(const std::string& kind, bool context, const std::string& corpus_file,
                 const std::vector<std::uint64_t>& seeds_in, std::size_t folds, bool no_previous,
                 bool no_ssi, std::size_t window, const Resources& res, const std::string& out) {
  const auto set = read_any_corpus(corpus_file);
  const auto topics = res.topics();
  const auto seeds = parse_seeds(seeds_in, 7);
  baselines::BaselineConfig cfg;
  cfg.kind = baselines::baseline_kind_from_string(kind);
  cfg.context = context;
  cfg.folds = folds;
  cfg.augmentation.window = window;
  cfg.augmentation.previous = !no_previous;
  cfg.augmentation.ssi = !no_ssi;
  json runs = json::array();
  double total = 0;
  for (auto s : seeds) {
    cfg.seed = s;
    cfg.svm.seed = s;
    const auto r = baselines::cross_validate(set, corpus::TagSet::swda42(), topics, cfg);
    runs.push_back({{"seed", s}, {"fold_accuracy", r.fold_accuracy},
                    {"mean_accuracy", r.mean_accuracy}, {"fold_plan", r.plan}});
    total += r.mean_accuracy;
  }
  const double mean = total / static_cast<double>(seeds.size());
  json cfg_json = {{"kind", kind}, {"context", context}, {"folds", folds},
                   {"augmentation", cfg.augmentation}, {"mnb_alpha", cfg.mnb_alpha},
                   {"svm_lambda", cfg.svm.lambda}, {"svm_epochs", cfg.svm.epochs}};
  json j = {{"model", kind + (context ? " + context" : "")},
            {"runs", runs},
            {"mean_accuracy", mean},
            {"meta", eval::report_meta(seeds.front(), cfg_json,
                                       {{"corpus", file_hash(corpus_file)}})}};
  std::cerr << eval::format_table({"model", "accuracy"},
                                  {{j["model"].get<std::string>(), eval::fixed(100 * mean)}});
  emit(j, out);
  return 0;
}

struct ExperimentSetup {
  cli::RunConfig rc;
  corpus::ConversationSet set;
  corpus::Splits splits;
  model::BuildOptions bo;
  std::optional<features::Embeddings> emb;
  json hashes;
};

void setup_experiment(ExperimentSetup& x, const Overrides& ov, const Resources& res,
                      const std::string& corpus_file, const std::string& embeddings) {
  x.rc = ov.resolve();
  x.set = read_any_corpus(corpus_file);
  x.splits = cli::resolve_splits(x.set, x.rc);
  x.bo = res.build_options(x.rc);
  x.hashes = {{"corpus", file_hash(corpus_file)}, {"splits", eval::split_hashes(x.splits)}};
  if (!embeddings.empty()) {
    x.emb = load_corpus_embeddings(embeddings, x.rc.embedding_dim, x.set);
    x.bo.pretrained = &*x.emb;
    x.hashes["embeddings"] = file_hash(embeddings);
  }
}

int cmd_ablate(const Overrides& ov, const Resources& res, const std::string& corpus_file,
               const std::string& embeddings, const std::vector<std::uint64_t>& seeds_in,
               const std::string& out) {
  ExperimentSetup x;
  setup_experiment(x, ov, res, corpus_file, embeddings);
  eval::AblationPlan plan;
  plan.context_window = x.rc.context_window;
  plan.seeds = parse_seeds(seeds_in, x.rc.seed);
  const auto run = eval::cdac_runner(x.splits, x.bo, x.rc.training_config());
  const auto cells = eval::run_ablation(run, x.rc.model_config(), plan);
  std::cerr << eval::ablation_table(cells);
  emit({{"cells", eval::ablation_json(cells)}, {"seeds", plan.seeds},
        {"meta", run_meta(x.rc, x.hashes)}},
       out);
  return 0;
}

int cmd_sweep(const Overrides& ov, const Resources& res, const std::string& corpus_file,
              const std::string& embeddings, const std::vector<std::size_t>& windows,
              const std::vector<std::uint64_t>& seeds_in, const std::string& out) {
  ExperimentSetup x;
  setup_experiment(x, ov, res, corpus_file, embeddings);
  const auto seeds = parse_seeds(seeds_in, x.rc.seed);
  const auto run = eval::cdac_runner(x.splits, x.bo, x.rc.training_config());
  const auto rows = eval::context_sweep(run, x.rc.model_config(), windows, seeds);
  std::cerr << eval::sweep_table(rows);
  emit({{"rows", eval::sweep_json(rows)}, {"seeds", seeds}, {"meta", run_meta(x.rc, x.hashes)}},
       out);
  return 0;
}

int cmd_agreement(const std::string& a_file, const std::string& b_file,
                  const std::string& merge_out, std::uint64_t merge_seed) {
  const auto a = corpus::read_annotations(a_file);
  const auto b = corpus::read_annotations(b_file);
  const auto g = corpus::compute_agreement(a, b);
  std::cout << json{{"items", a.labels.size()},
                    {"raw_agreement", g.raw_agreement},
                    {"cohen_kappa", g.cohen_kappa},
                    {"input_hashes", {{"a", file_hash(a_file)}, {"b", file_hash(b_file)}}}}
                   .dump(2)
            << '\n';
  if (!merge_out.empty())
    corpus::write_annotations(merge_out, corpus::merge_annotations(a, b, merge_seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual dialogue-act classifier"};
  app.require_subcommand(1);
  std::string data_dir;
  app.add_option("--data-dir", data_dir, "data root (default: $CDAC_DATA_DIR or built-in)");

  // prepare
  std::string swda, out, collapse_map, test_list, labels_file;
  auto* prepare = app.add_subcommand("prepare", "Switchboard CSV release -> canonical corpus");
  prepare->add_option("--swda", swda, "directory holding *.utt.csv files")->required();
  prepare->add_option("--out", out, "canonical corpus (JSON lines)")->required();
  prepare->add_option("--collapse-map", collapse_map, "raw<TAB>collapsed tag table");
  prepare->add_option("--test-list", test_list, "conversation numbers of the test split");
  prepare->add_option("--labels", labels_file, "label inventory (default: 42 SwDA labels)");

  // prepare-hm
  std::string in_file, topics_file;
  auto* prepare_hm = app.add_subcommand("prepare-hm", "validate a human-machine corpus");
  prepare_hm->add_option("--in", in_file, "input corpus (canonical JSON lines)")->required();
  prepare_hm->add_option("--out", out, "validated corpus")->required();
  prepare_hm->add_option("--topics", topics_file, "topic list")->required();

  // synth
  Resources res;
  std::size_t n = 200, dim = 300;
  std::string dist_file, kind = "hm", templates;
  std::uint64_t seed = 1;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus or embeddings");
  synth->add_option("--n", n, "number of conversations");
  synth->add_option("--dist", dist_file, "target label distribution (JSON)");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--out", out, "output file")->required();
  synth->add_option("--kind", kind, "hm | hh | embeddings")
      ->check(CLI::IsMember({"hm", "hh", "embeddings"}));
  synth->add_option("--dim", dim, "embedding dimension (--kind embeddings)");
  synth->add_option("--templates", templates, "template bank (default: data dir)");
  synth->add_option("--topics", res.topics_file, "topic list");

  // train
  Overrides ov;
  std::string corpus_file, embeddings, history_out;
  bool verbose = false;
  auto* train = app.add_subcommand("train", "train a classifier from scratch");
  train->add_option("--corpus", corpus_file, "canonical corpus")->required();
  train->add_option("--embeddings", embeddings, "word vectors (text format)");
  train->add_option("--out", out, "checkpoint path")->required();
  train->add_option("--history", history_out, "history JSON (default: <out>.history.json)");
  train->add_flag("--verbose", verbose, "per-epoch log on stderr");
  ov.attach(train);
  res.attach(train);

  // finetune
  std::string ckpt;
  auto* finetune = app.add_subcommand("finetune", "continue training a checkpoint");
  finetune->add_option("--ckpt", ckpt, "pretrained checkpoint")->required();
  finetune->add_option("--corpus", corpus_file, "canonical corpus")->required();
  finetune->add_option("--embeddings", embeddings,
                       "word vectors for tokens new to the checkpoint (text format)");
  finetune->add_option("--out", out, "fine-tuned checkpoint path")->required();
  finetune->add_option("--history", history_out, "history JSON (default: <out>.history.json)");
  finetune->add_flag("--verbose", verbose, "per-epoch log on stderr");
  ov.attach(finetune);

  // evaluate
  std::string split = "test", against;
  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a split");
  evaluate->add_option("--ckpt", ckpt, "checkpoint")->required();
  evaluate->add_option("--corpus", corpus_file, "canonical corpus")->required();
  evaluate->add_option("--split", split, "train | validation | test | all")
      ->check(CLI::IsMember({"train", "validation", "test", "all"}));
  evaluate->add_option("--against", against, "second checkpoint for a McNemar test");
  evaluate->add_option("--out", out, "report JSON (default: stdout)");
  ov.attach(evaluate);

  // predict
  bool stream = false;
  auto* predict = app.add_subcommand("predict", "label turns causally");
  predict->add_option("--ckpt", ckpt, "checkpoint")->required();
  predict->add_flag("--stream", stream, "read turn records from stdin, one per line");
  predict->add_option("--corpus", corpus_file, "corpus to label (default: stdin)");

  // baseline
  bool context = false, no_previous = false, no_ssi = false;
  std::vector<std::uint64_t> seeds;
  std::size_t folds = 5, window = 3;
  auto* baseline = app.add_subcommand("baseline", "tf-idf baselines under k-fold CV");
  baseline->add_option("--kind", kind, "svm | mnb")->required()
      ->check(CLI::IsMember({"svm", "mnb"}));
  baseline->add_flag("--context", context, "append previous-turn and system-state blocks");
  baseline->add_flag("--no-previous", no_previous, "drop the previous-turn block");
  baseline->add_flag("--no-ssi", no_ssi, "drop the system-state block");
  baseline->add_option("--window", window, "previous turns pooled into the context block");
  baseline->add_option("--corpus", corpus_file, "canonical corpus")->required();
  baseline->add_option("--folds", folds, "number of folds");
  baseline->add_option("--seeds", seeds, "fold-plan seeds")->delimiter(',');
  baseline->add_option("--topics", res.topics_file, "topic list");
  baseline->add_option("--out", out, "report JSON (default: stdout)");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "feature-group ablation");
  ablate->add_option("--corpus", corpus_file, "canonical corpus")->required();
  ablate->add_option("--embeddings", embeddings, "word vectors (text format)");
  ablate->add_option("--seeds", seeds, "training seeds")->delimiter(',');
  ablate->add_option("--out", out, "report JSON (default: stdout)");
  ov.attach(ablate, "--config,--ckpt-config");
  res.attach(ablate);

  // sweep
  std::vector<std::size_t> windows{2, 3, 4};
  auto* sweep = app.add_subcommand("sweep", "context-window sweep");
  sweep->add_option("--windows", windows, "context windows")->delimiter(',');
  sweep->add_option("--corpus", corpus_file, "canonical corpus")->required();
  sweep->add_option("--embeddings", embeddings, "word vectors (text format)");
  sweep->add_option("--seeds", seeds, "training seeds")->delimiter(',');
  sweep->add_option("--out", out, "report JSON (default: stdout)");
  ov.attach(sweep);
  res.attach(sweep);

  // agreement
  std::string a_file, b_file, merge_out;
  std::uint64_t merge_seed = 7;
  auto* agreement = app.add_subcommand("agreement", "raw agreement and Cohen's kappa");
  agreement->add_option("--a", a_file, "annotator A (TSV)")->required();
  agreement->add_option("--b", b_file, "annotator B (TSV)")->required();
  agreement->add_option("--merge-out", merge_out, "write merged labels (random tie-break)");
  agreement->add_option("--merge-seed", merge_seed, "tie-break seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!data_dir.empty()) ::setenv("CDAC_DATA_DIR", data_dir.c_str(), 1);
    if (*prepare) return cmd_prepare(swda, out, collapse_map, test_list, labels_file);
    if (*prepare_hm) return cmd_prepare_hm(in_file, out, topics_file);
    if (*synth) return cmd_synth(kind, n, dist_file, seed, out, dim, templates, res);
    if (*train) return cmd_train(ov, res, corpus_file, embeddings, out, history_out, verbose);
    if (*finetune) return cmd_finetune(ov, ckpt, corpus_file, embeddings, out, history_out, verbose);
    if (*evaluate) return cmd_evaluate(ov, ckpt, corpus_file, split, against, out);
    if (*predict) return cmd_predict(ckpt, stream, corpus_file);
    if (*baseline)
      return cmd_baseline(kind, context, corpus_file, seeds, folds, no_previous, no_ssi, window,
                          res, out);
    if (*ablate) return cmd_ablate(ov, res, corpus_file, embeddings, seeds, out);
    if (*sweep) return cmd_sweep(ov, res, corpus_file, embeddings, windows, seeds, out);
    if (*agreement) return cmd_agreement(a_file, b_file, merge_out, merge_seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
