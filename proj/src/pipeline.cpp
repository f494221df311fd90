#include "sro/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sro {

SynthTask make_synth_task(const SynthTaskSpec& spec) {
  SynthSpec train_spec;
  train_spec.vocab_size = spec.vocab_size;
  train_spec.toxic_token_ids = spec.toxic_ids;
  train_spec.len_min = spec.len_min;
  train_spec.len_max = spec.len_max;
  train_spec.n_toxic = spec.n_train_toxic;
  train_spec.n_nontoxic = spec.n_train_nontoxic;
  train_spec.seed = spec.seed;

  SynthSpec test_spec = train_spec;
  test_spec.n_toxic = spec.n_test_toxic;
  test_spec.n_nontoxic = spec.n_test_nontoxic;
  test_spec.seed = splitmix64(spec.seed ^ 0x7e57);

  SynthSpec pre_spec = train_spec;
  pre_spec.n_toxic = spec.n_pretrain / 2;
  pre_spec.n_nontoxic = spec.n_pretrain - pre_spec.n_toxic;
  pre_spec.seed = splitmix64(spec.seed ^ 0x93e);

  SynthTask task;
  task.train = generate_synthetic(train_spec);
  task.test = generate_synthetic(test_spec);
  task.pretrain = generate_synthetic(pre_spec);
  task.toxic_ids = spec.toxic_ids;
  return task;
}

EvalSuite make_eval_suite(const Dataset& train, const Dataset& test,
                          std::uint64_t seed) {
  EvalSuite suite;
  suite.clf = train_eval_classifier(train, seed);
  const Dataset nontoxic_train = filter_style(train, Style::nontoxic);
  const Dataset nontoxic_test = filter_style(test, Style::nontoxic);
  std::vector<TokenSeq> calibration;
  calibration.reserve(nontoxic_test.examples.size());
  for (const auto& ex : nontoxic_test.examples) calibration.push_back(ex.text);
  suite.fluency = fit_fluency(nontoxic_train, calibration, 0.9);
  return suite;
}

PolicyModel pretrain_policy(const Dataset& train, const DeskPreset& preset,
                            std::uint64_t seed) {
  const PolicyArch arch = arch_for_vocab(train.vocab, preset.embed_dim,
                                         preset.hidden_dim, preset.max_len);
  PolicyModel policy = init_policy(arch, splitmix64(seed ^ 0x1417));
  return pretrain(std::move(policy), train, preset.pretrain_epochs,
                  preset.pretrain_lr, seed);
}

TrainConfig desk_finetune_config(const DeskPreset& preset, LossKind kind,
                                 ScreenerNoise noise, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.lr = preset.finetune_lr;
  cfg.loss_kind = kind;
  cfg.noise = noise;
  cfg.seed = seed;
  return cfg;
}

EvalReport evaluate_policy(const PolicyModel& model, const Dataset& test_toxic,
                           const EvalSuite& suite, const Embedder& emb) {
  Rewriter rewrite = [&](const TokenSeq& x) {
    return greedy_decode(model, x, model.arch().max_len);
  };
  return evaluate_system(rewrite, test_toxic, suite.clf, emb, suite.fluency);
}

std::string noise_row_label(NoiseKind kind, double rate) {
  if (kind == NoiseKind::none || rate == 0.0) return "SRO";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c-%d%%", kind == NoiseKind::relax ? 'R' : 'K',
                static_cast<int>(std::lround(rate * 100.0)));
  return buf;
}

namespace {

SweepRow run_cell(const PolicyModel& pretrained, const SvmScreener& screener,
                  const Dataset& train_toxic, const Dataset& test_toxic,
                  const EvalSuite& suite, const Embedder& emb,
                  const TrainConfig& base_cfg, NoiseKind kind, double rate,
                  const std::vector<std::uint64_t>& seeds) {
  SweepRow row;
  row.label = noise_row_label(kind, rate);
  row.kind = kind;
  row.rate = rate;
  row.seeds = seeds;

  const ReferenceModel ref = freeze_reference(pretrained);
  for (std::uint64_t seed : seeds) {
    TrainConfig cfg = base_cfg;
    cfg.seed = seed;
    cfg.noise.kind = kind;
    cfg.noise.rate = rate;
    auto [model, history] = finetune(pretrained, ref, screener, train_toxic, cfg);
    (void)history;
    row.per_seed.push_back(
        evaluate_policy(model, test_toxic, suite, emb));
  }
  const double n = static_cast<double>(row.per_seed.size());
  for (const auto& r : row.per_seed) {
    row.mean_sta += r.sta / n;
    row.mean_sim += r.sim / n;
    row.mean_fl += r.fl / n;
    row.mean_j += r.j / n;
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_noise_sweep(const PolicyModel& pretrained,
                                      const SvmScreener& screener,
                                      const Dataset& train_toxic,
                                      const Dataset& test_toxic,
                                      const EvalSuite& suite,
                                      const TrainConfig& base_cfg,
                                      const std::vector<NoiseKind>& kinds,
                                      const std::vector<double>& rates,
                                      const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ArgumentError("run_noise_sweep: no seeds given");
  const Embedder emb = make_embedder(pretrained);

  std::vector<SweepRow> rows;
  rows.push_back(run_cell(pretrained, screener, train_toxic, test_toxic, suite,
                          emb, base_cfg, NoiseKind::none, 0.0, seeds));
  for (NoiseKind kind : kinds) {
    if (kind == NoiseKind::none) continue;
    for (double rate : rates) {
      if (!(rate >= 0.0 && rate <= 1.0)) {
        throw ArgumentError("run_noise_sweep: rate must lie in [0, 1]");
      }
      rows.push_back(run_cell(pretrained, screener, train_toxic, test_toxic,
                              suite, emb, base_cfg, kind, rate, seeds));
    }
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "label,kind,rate,seed,sta,sim,fl,j\n";
  char buf[256];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.per_seed.size(); ++i) {
      const auto& r = row.per_seed[i];
      std::snprintf(buf, sizeof(buf), "%s,%s,%.2f,%llu,%.6f,%.6f,%.6f,%.6f\n",
                    row.label.c_str(), noise_kind_name(row.kind), row.rate,
                    static_cast<unsigned long long>(row.seeds[i]), r.sta, r.sim,
                    r.fl, r.j);
      out << buf;
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s %5s %5s %5s %5s\n", "Model", "STA",
                "SIM", "FL", "J");
  os << buf << std::string(34, '-') << "\n";
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-8s %5.2f %5.2f %5.2f %5.2f\n",
                  row.label.c_str(), row.mean_sta, row.mean_sim, row.mean_fl,
                  row.mean_j);
    os << buf;
  }
  return os.str();
}

}  // namespace sro
