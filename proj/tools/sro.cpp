// Command-line surface for the Stackelberg detoxification pipeline:
// synthetic data generation, screener training, policy pretraining,
// fine-tuning, evaluation, and the screener-noise sweep.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sro/corpus.hpp"
#include "sro/eval.hpp"
#include "sro/losses.hpp"
#include "sro/manifest.hpp"
#include "sro/pipeline.hpp"
#include "sro/policy.hpp"
#include "sro/screener.hpp"
#include "sro/trainer.hpp"

namespace fs = std::filesystem;
using namespace sro;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(std::stod(item));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(s)) out.push_back(std::stoull(item));
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Flat key-value config file: one `key = value` per line, '#' comments.
std::map<std::string, std::string> parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

Dataset load_any(const fs::path& path) {
  return path.extension() == ".csv" ? load_jigsaw_csv(path) : load_jsonl(path);
}

Dataset load_any(const fs::path& path, const Vocab& vocab) {
  if (path.extension() == ".csv") {
    throw ArgumentError("CSV reload under a fixed vocab is not supported; "
                        "convert to JSONL first");
  }
  return load_jsonl(path, vocab);
}

// Merged view of defaults, config file, and command-line overrides, in
// ascending precedence. Everything ends up in the manifest.
class ResolvedConfig {
 public:
  void set_default(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  void apply_file(const std::map<std::string, std::string>& kv,
                  const std::string& source) {
    for (const auto& [k, v] : kv) {
      if (values_.find(k) == values_.end()) {
        throw SchemaError(source + ": unknown config key '" + k + "'");
      }
      values_[k] = v;
    }
  }
  void override_flag(const std::string& key, const std::string& value) {
    values_[key] = value;
  }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ArgumentError("missing config key " + key);
    return it->second;
  }
  std::string require(const std::string& key) const {
    const std::string& v = str(key);
    if (v.empty()) throw ArgumentError("config key '" + key + "' is required");
    return v;
  }
  int integer(const std::string& key) const { return std::stoi(str(key)); }
  double real(const std::string& key) const { return std::stod(str(key)); }
  std::uint64_t seed(const std::string& key) const { return std::stoull(str(key)); }
  bool flag(const std::string& key) const {
    const std::string& v = str(key);
    return v == "1" || v == "true" || v == "yes";
  }
  const std::map<std::string, std::string>& all() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct FinetuneSetup {
  ResolvedConfig cfg;
  SvmScreener screener;
  PolicyModel policy;
  Vocab vocab;
  Dataset train;        // full training data under the shared vocab
  Dataset train_toxic;  // toxic subset used for fine-tuning
  TrainConfig train_cfg;
  RunManifest manifest;
};

ResolvedConfig finetune_defaults() {
  ResolvedConfig cfg;
  TrainConfig d;
  cfg.set_default("epochs", std::to_string(d.epochs));
  cfg.set_default("batch_size", std::to_string(d.batch_size));
  cfg.set_default("lr", fmt(d.lr));
  cfg.set_default("weight_decay", fmt(d.weight_decay));
  cfg.set_default("beta", fmt(d.beta));
  cfg.set_default("loss", loss_kind_name(d.loss_kind));
  cfg.set_default("noise_kind", "none");
  cfg.set_default("noise_rate", "0");
  cfg.set_default("temperature", fmt(d.temperature));
  cfg.set_default("seed", "0");
  cfg.set_default("cache_samples", "0");
  cfg.set_default("data", "");
  cfg.set_default("screener", "");
  cfg.set_default("checkpoint_in", "");
  cfg.set_default("checkpoint_out", "");
  cfg.set_default("history_out", "");
  cfg.set_default("test_data", "");
  cfg.set_default("eval_seed", "7");
  return cfg;
}

TrainConfig make_train_config(const ResolvedConfig& cfg) {
  TrainConfig tc;
  tc.epochs = cfg.integer("epochs");
  tc.batch_size = cfg.integer("batch_size");
  tc.lr = cfg.real("lr");
  tc.weight_decay = cfg.real("weight_decay");
  tc.beta = cfg.real("beta");
  tc.loss_kind = parse_loss_kind(cfg.str("loss"));
  tc.noise.kind = parse_noise_kind(cfg.str("noise_kind"));
  tc.noise.rate = cfg.real("noise_rate");
  tc.temperature = cfg.real("temperature");
  tc.seed = cfg.seed("seed");
  tc.cache_samples = cfg.flag("cache_samples");
  return tc;
}

FinetuneSetup prepare_finetune(const ResolvedConfig& cfg,
                               const std::string& command) {
  FinetuneSetup s;
  s.cfg = cfg;

  const fs::path screener_path = cfg.require("screener");
  const fs::path data_path = cfg.require("data");
  const fs::path ckpt_in = cfg.require("checkpoint_in");

  s.screener = load_screener(screener_path);
  auto [policy, vocab] = load_policy(ckpt_in);
  if (!(vocab == s.screener.vocab)) {
    throw ArgumentError("checkpoint vocab differs from screener vocab; "
                        "train both from the same dataset");
  }
  s.policy = std::move(policy);
  s.vocab = std::move(vocab);
  s.train = load_any(data_path, s.vocab);
  s.train_toxic = filter_style(s.train, Style::toxic);
  if (s.train_toxic.examples.empty()) {
    throw ArgumentError("no toxic-labeled examples in " + data_path.string());
  }
  s.train_cfg = make_train_config(cfg);

  s.manifest.command = command;
  s.manifest.config = cfg.all();
  s.manifest.input_hashes[screener_path.string()] = hash_file_hex(screener_path);
  s.manifest.input_hashes[data_path.string()] = hash_file_hex(data_path);
  s.manifest.input_hashes[ckpt_in.string()] = hash_file_hex(ckpt_in);
  return s;
}

int cmd_gen_synthetic(const SynthSpec& spec, const fs::path& out,
                      const fs::path& lexicon_out) {
  Dataset d = generate_synthetic(spec);
  save_jsonl(d, out);

  std::ofstream lex(lexicon_out, std::ios::binary);
  if (!lex) throw IoError("cannot write " + lexicon_out.string());
  for (int id : spec.toxic_token_ids) lex << d.vocab.token_of(id) << "\n";
  lex.close();

  RunManifest m;
  m.command = "gen-synthetic";
  m.config["vocab_size"] = std::to_string(spec.vocab_size);
  {
    std::string ids;
    for (int id : spec.toxic_token_ids) {
      if (!ids.empty()) ids += ",";
      ids += std::to_string(id);
    }
    m.config["toxic_tokens"] = ids;
  }
  m.config["len_min"] = std::to_string(spec.len_min);
  m.config["len_max"] = std::to_string(spec.len_max);
  m.config["n_toxic"] = std::to_string(spec.n_toxic);
  m.config["n_nontoxic"] = std::to_string(spec.n_nontoxic);
  m.config["seed"] = std::to_string(spec.seed);
  m.config["out"] = out.string();
  m.config["lexicon_out"] = lexicon_out.string();
  m.outputs = {out.string(), lexicon_out.string()};
  write_manifest(m, out.string() + ".manifest.json");

  std::cout << "wrote " << d.examples.size() << " examples to " << out.string()
            << "\n";
  return 0;
}

int cmd_train_screener(const fs::path& data_path, const fs::path& out,
                       const std::string& test_data, double train_fraction,
                       int epochs, double lambda, std::uint64_t seed) {
  Dataset data = load_any(data_path);
  Dataset train, test;
  if (!test_data.empty()) {
    train = std::move(data);
    test = load_any(test_data, train.vocab);
  } else {
    std::tie(train, test) = split(data, train_fraction, seed);
    if (test.examples.empty()) {
      throw ArgumentError("train-screener: split produced an empty test set");
    }
  }

  SvmOptions opts;
  opts.epochs = epochs;
  opts.lambda = lambda;
  opts.seed = seed;
  SvmScreener model = train_screener(train, opts);
  const double acc = accuracy(model, test);

  save_screener(model, out);
  const fs::path report = out.string() + ".accuracy.csv";
  {
    std::ofstream rep(report, std::ios::binary);
    if (!rep) throw IoError("cannot write " + report.string());
    char buf[128];
    std::snprintf(buf, sizeof(buf), "n_train,n_test,test_accuracy\n%zu,%zu,%.6f\n",
                  train.examples.size(), test.examples.size(), acc);
    rep << buf;
  }

  RunManifest m;
  m.command = "train-screener";
  m.config["data"] = data_path.string();
  m.config["out"] = out.string();
  m.config["test_data"] = test_data;
  m.config["train_fraction"] = fmt(train_fraction);
  m.config["epochs"] = std::to_string(epochs);
  m.config["lambda"] = fmt(lambda);
  m.config["seed"] = std::to_string(seed);
  m.input_hashes[data_path.string()] = hash_file_hex(data_path);
  if (!test_data.empty()) m.input_hashes[test_data] = hash_file_hex(test_data);
  m.outputs = {out.string(), report.string()};
  write_manifest(m, out.string() + ".manifest.json");

  std::printf("test_accuracy %.6f (n_train=%zu, n_test=%zu)\n", acc,
              train.examples.size(), test.examples.size());
  return 0;
}

int cmd_pretrain(const fs::path& data_path, const fs::path& out, int epochs,
                 double lr, std::uint64_t seed, int embed_dim, int hidden_dim,
                 int max_len) {
  Dataset data = load_any(data_path);
  const PolicyArch arch = arch_for_vocab(data.vocab, embed_dim, hidden_dim, max_len);
  PolicyModel policy = init_policy(arch, splitmix64(seed ^ 0x1417));
  policy = pretrain(std::move(policy), data, epochs, lr, seed);
  save_policy(policy, data.vocab, out);

  RunManifest m;
  m.command = "pretrain";
  m.config["data"] = data_path.string();
  m.config["out"] = out.string();
  m.config["epochs"] = std::to_string(epochs);
  m.config["lr"] = fmt(lr);
  m.config["seed"] = std::to_string(seed);
  m.config["embed_dim"] = std::to_string(embed_dim);
  m.config["hidden_dim"] = std::to_string(hidden_dim);
  m.config["max_len"] = std::to_string(max_len);
  m.input_hashes[data_path.string()] = hash_file_hex(data_path);
  m.outputs = {out.string()};
  write_manifest(m, out.string() + ".manifest.json");

  std::cout << "pretrained " << policy.n_params() << " params over " << epochs
            << " epochs -> " << out.string() << "\n";
  return 0;
}

int cmd_finetune(const ResolvedConfig& cfg) {
  FinetuneSetup s = prepare_finetune(cfg, "finetune");
  const fs::path ckpt_out = cfg.require("checkpoint_out");
  fs::path history_out = cfg.str("history_out");
  if (history_out.empty()) {
    history_out = ckpt_out;
    history_out.replace_extension();
    history_out += "_history.csv";
  }

  const ReferenceModel ref = freeze_reference(s.policy);
  auto [model, history] = finetune(std::move(s.policy), ref, s.screener,
                                   s.train_toxic, s.train_cfg);

  save_policy(model, s.vocab, ckpt_out);
  write_history_csv(history, history_out);
  s.manifest.outputs = {ckpt_out.string(), history_out.string()};
  write_manifest(s.manifest, ckpt_out.string() + ".manifest.json");

  const auto& last = history.epochs.back();
  std::printf("finetune done: %d epochs, final mean_loss %.6f, pass_rate %.3f\n",
              last.epoch, last.mean_loss, last.pass_rate);
  return 0;
}

int cmd_evaluate(const fs::path& checkpoint, const fs::path& test_path,
                 const fs::path& train_path, const std::string& reference,
                 bool baselines, const std::string& lexicon_path,
                 const fs::path& out, std::uint64_t seed) {
  auto [model, vocab] = load_policy(checkpoint);
  Dataset train = load_any(train_path, vocab);
  Dataset test = load_any(test_path, vocab);
  Dataset test_toxic = filter_style(test, Style::toxic);
  if (test_toxic.examples.empty()) {
    throw ArgumentError("evaluate: no toxic examples in " + test_path.string());
  }

  // The embedder comes from the reference checkpoint (or the evaluated one)
  // so that every row of the table shares the same similarity space.
  Embedder emb;
  if (reference.empty()) {
    emb = make_embedder(model);
  } else {
    auto [ref_model, ref_vocab] = load_policy(reference);
    if (!(ref_vocab == vocab)) {
      throw ArgumentError("evaluate: reference vocab differs from checkpoint vocab");
    }
    emb = make_embedder(ref_model);
  }

  EvalSuite suite = make_eval_suite(train, test, seed);

  std::vector<std::pair<std::string, EvalReport>> rows;
  Rewriter policy_rewrite = [&](const TokenSeq& x) {
    return greedy_decode(model, x, model.arch().max_len);
  };
  rows.emplace_back("policy", evaluate_system(policy_rewrite, test_toxic,
                                              suite.clf, emb, suite.fluency));
  if (baselines) {
    rows.emplace_back("duplicate",
                      evaluate_system([](const TokenSeq& x) { return baseline_duplicate(x); },
                                      test_toxic, suite.clf, emb, suite.fluency));
    if (lexicon_path.empty()) {
      throw ArgumentError("evaluate: --baselines requires --lexicon for the delete row");
    }
    const std::set<int> lexicon = load_lexicon(lexicon_path, vocab);
    rows.emplace_back("delete",
                      evaluate_system(
                          [&](const TokenSeq& x) {
                            return baseline_delete(x, lexicon, vocab).seq;
                          },
                          test_toxic, suite.clf, emb, suite.fluency));
  }

  write_report_csv(rows, out);
  std::cout << format_report_table(rows);

  RunManifest m;
  m.command = "evaluate";
  m.config["checkpoint"] = checkpoint.string();
  m.config["test_data"] = test_path.string();
  m.config["train_data"] = train_path.string();
  m.config["reference"] = reference;
  m.config["baselines"] = baselines ? "1" : "0";
  m.config["lexicon"] = lexicon_path;
  m.config["out"] = out.string();
  m.config["seed"] = std::to_string(seed);
  m.input_hashes[checkpoint.string()] = hash_file_hex(checkpoint);
  m.input_hashes[test_path.string()] = hash_file_hex(test_path);
  m.input_hashes[train_path.string()] = hash_file_hex(train_path);
  if (!reference.empty()) m.input_hashes[reference] = hash_file_hex(reference);
  if (!lexicon_path.empty()) m.input_hashes[lexicon_path] = hash_file_hex(lexicon_path);
  m.outputs = {out.string()};
  write_manifest(m, out.string() + ".manifest.json");
  return 0;
}

int cmd_noise_sweep(const ResolvedConfig& cfg, const std::string& rates_str,
                    const std::string& kinds_str, const std::string& seeds_str,
                    const fs::path& out) {
  FinetuneSetup s = prepare_finetune(cfg, "noise-sweep");
  const fs::path test_path = cfg.require("test_data");
  Dataset test = load_any(test_path, s.vocab);
  Dataset test_toxic = filter_style(test, Style::toxic);
  if (test_toxic.examples.empty()) {
    throw ArgumentError("noise-sweep: no toxic examples in " + test_path.string());
  }

  const std::vector<double> rates = parse_double_list(rates_str);
  std::vector<NoiseKind> kinds;
  for (const auto& k : split_list(kinds_str)) kinds.push_back(parse_noise_kind(k));
  const std::vector<std::uint64_t> seeds = seeds_str.empty()
                                               ? std::vector<std::uint64_t>{s.train_cfg.seed}
                                               : parse_seed_list(seeds_str);

  EvalSuite suite = make_eval_suite(s.train, test, cfg.seed("eval_seed"));
  const auto rows = run_noise_sweep(s.policy, s.screener, s.train_toxic,
                                    test_toxic, suite, s.train_cfg, kinds,
                                    rates, seeds);

  write_sweep_csv(rows, out);
  std::cout << format_sweep_table(rows);

  s.manifest.config["rates"] = rates_str;
  s.manifest.config["kinds"] = kinds_str;
  s.manifest.config["sweep_seeds"] = seeds_str;
  s.manifest.config["out"] = out.string();
  s.manifest.input_hashes[test_path.string()] = hash_file_hex(test_path);
  s.manifest.outputs = {out.string()};
  write_manifest(s.manifest, out.string() + ".manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg-game fine-tuning of a toy paraphraser against an "
               "SVM toxicity screener"};
  app.require_subcommand(1);

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic",
                                 "Generate a synthetic toxic-token dataset");
  SynthSpec spec;
  spec.toxic_token_ids = {3, 17, 29, 41};
  spec.n_toxic = 1000;
  spec.n_nontoxic = 1000;
  std::string gen_out = "synthetic.jsonl", gen_lexicon = "lexicon.txt";
  std::string gen_toxic_tokens = "3,17,29,41";
  gen->add_option("--out", gen_out, "Output JSONL path");
  gen->add_option("--lexicon-out", gen_lexicon, "Toxic-token lexicon path");
  gen->add_option("--vocab-size", spec.vocab_size, "Base vocabulary size");
  gen->add_option("--toxic-tokens", gen_toxic_tokens, "Comma-separated toxic token ids");
  gen->add_option("--len-min", spec.len_min, "Minimum sentence length");
  gen->add_option("--len-max", spec.len_max, "Maximum sentence length");
  gen->add_option("--n-toxic", spec.n_toxic, "Number of toxic sentences");
  gen->add_option("--n-nontoxic", spec.n_nontoxic, "Number of non-toxic sentences");
  gen->add_option("--seed", spec.seed, "Generation seed");

  // train-screener
  auto* ts = app.add_subcommand("train-screener", "Fit TF-IDF + linear SVM");
  std::string ts_data, ts_out = "screener.json", ts_test;
  double ts_fraction = 0.95, ts_lambda = 1e-4;
  int ts_epochs = 10;
  std::uint64_t ts_seed = 0;
  ts->add_option("--data", ts_data, "Dataset (JSONL or Jigsaw CSV)")->required();
  ts->add_option("--out", ts_out, "Screener model output path");
  ts->add_option("--test-data", ts_test,
                 "Explicit test set (otherwise an internal split is used)");
  ts->add_option("--train-fraction", ts_fraction, "Training fraction for the split");
  ts->add_option("--epochs", ts_epochs, "SVM epochs");
  ts->add_option("--lambda", ts_lambda, "Hinge-loss regularization strength");
  ts->add_option("--seed", ts_seed, "Split/training seed");

  // pretrain
  auto* pt = app.add_subcommand("pretrain", "Copy-pretrain the policy model");
  std::string pt_data, pt_out = "policy.json";
  int pt_epochs = 30, pt_embed = 32, pt_hidden = 64, pt_maxlen = 16;
  double pt_lr = 3e-3;
  std::uint64_t pt_seed = 0;
  pt->add_option("--data", pt_data, "Training dataset (JSONL)")->required();
  pt->add_option("--out", pt_out, "Checkpoint output path");
  pt->add_option("--epochs", pt_epochs, "Pretraining epochs");
  pt->add_option("--lr", pt_lr, "Learning rate");
  pt->add_option("--seed", pt_seed, "Seed");
  pt->add_option("--embed-dim", pt_embed, "Embedding width");
  pt->add_option("--hidden-dim", pt_hidden, "Recurrent state width");
  pt->add_option("--max-len", pt_maxlen, "Maximum sequence length");

  // finetune
  auto* ft = app.add_subcommand("finetune", "Run the Stackelberg fine-tuning loop");
  std::string ft_config;
  std::map<std::string, std::string> ft_flags;
  ft->add_option("--config", ft_config, "Flat key-value config file");
  static const std::vector<std::string> kConfigKeys = {
      "epochs",      "batch_size",  "lr",           "weight_decay",
      "beta",        "loss",        "noise_kind",   "noise_rate",
      "temperature", "seed",        "cache_samples", "data",
      "screener",    "checkpoint_in", "checkpoint_out", "history_out",
      "test_data",   "eval_seed"};
  std::map<std::string, std::string> ft_values;
  for (const auto& key : kConfigKeys) {
    ft->add_option("--" + key, ft_values[key], "Override config key " + key);
  }

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Compute STA/SIM/FL/J for a checkpoint");
  std::string ev_ckpt, ev_test, ev_train, ev_ref, ev_lexicon;
  std::string ev_out = "report.csv";
  bool ev_baselines = false;
  std::uint64_t ev_seed = 7;
  ev->add_option("--checkpoint", ev_ckpt, "Policy checkpoint")->required();
  ev->add_option("--test-data", ev_test, "Test dataset (JSONL)")->required();
  ev->add_option("--train-data", ev_train, "Training dataset for the judges")->required();
  ev->add_option("--reference", ev_ref, "Reference checkpoint for the embedder");
  ev->add_flag("--baselines", ev_baselines, "Add Duplicate and Delete rows");
  ev->add_option("--lexicon", ev_lexicon, "Toxic-token lexicon for Delete");
  ev->add_option("--out", ev_out, "Report CSV path");
  ev->add_option("--seed", ev_seed, "Judge-training seed");

  // noise-sweep
  auto* ns = app.add_subcommand("noise-sweep",
                                "Fine-tune and evaluate across screener noise levels");
  std::string ns_config;
  std::string ns_rates = "0.1,0.2,0.5,0.7";
  std::string ns_kinds = "relax,overkill";
  std::string ns_seeds;
  std::string ns_out = "sweep.csv";
  ns->add_option("--config", ns_config, "Flat key-value config file");
  std::map<std::string, std::string> ns_values;
  for (const auto& key : kConfigKeys) {
    ns->add_option("--" + key, ns_values[key], "Override config key " + key);
  }
  ns->add_option("--rates", ns_rates, "Comma-separated noise rates");
  ns->add_option("--kinds", ns_kinds, "Comma-separated noise kinds");
  ns->add_option("--seeds", ns_seeds, "Comma-separated fine-tuning seeds");
  ns->add_option("--out", ns_out, "Sweep CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      spec.toxic_token_ids = parse_int_list(gen_toxic_tokens);
      return cmd_gen_synthetic(spec, gen_out, gen_lexicon);
    }
    if (ts->parsed()) {
      return cmd_train_screener(ts_data, ts_out, ts_test, ts_fraction, ts_epochs,
                                ts_lambda, ts_seed);
    }
    if (pt->parsed()) {
      return cmd_pretrain(pt_data, pt_out, pt_epochs, pt_lr, pt_seed, pt_embed,
                          pt_hidden, pt_maxlen);
    }
    if (ft->parsed() || ns->parsed()) {
      auto& values = ft->parsed() ? ft_values : ns_values;
      auto* sub = ft->parsed() ? ft : ns;
      const std::string& config_path = ft->parsed() ? ft_config : ns_config;
      ResolvedConfig cfg = finetune_defaults();
      if (!config_path.empty()) {
        cfg.apply_file(parse_config_file(config_path), config_path);
      }
      for (const auto& key : kConfigKeys) {
        if (sub->count("--" + key) > 0) cfg.override_flag(key, values[key]);
      }
      if (ft->parsed()) return cmd_finetune(cfg);
      return cmd_noise_sweep(cfg, ns_rates, ns_kinds, ns_seeds, ns_out);
    }
    if (ev->parsed()) {
      return cmd_evaluate(ev_ckpt, ev_test, ev_train, ev_ref, ev_baselines,
                          ev_lexicon, ev_out, ev_seed);
    }
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
