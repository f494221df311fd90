#include "sro/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sro/optimizer.hpp"

namespace sro {

namespace {

constexpr double kPretrainDropout = 0.03;
constexpr std::uint64_t kShuffleStream = 0x5348;  // stream tags for rng children
constexpr std::uint64_t kSampleStream = 0x53a1;
constexpr std::uint64_t kNoiseStream = 0x4e01;
constexpr std::uint64_t kDropoutStream = 0xd801;

std::vector<std::size_t> index_range(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace

PolicyModel pretrain(PolicyModel policy, const Dataset& data, int epochs,
                     double lr, std::uint64_t seed) {
  if (data.examples.empty()) throw ArgumentError("pretrain: empty dataset");
  if (epochs < 0) throw ArgumentError("pretrain: epochs must be >= 0");
  if (epochs == 0) return policy;

  const int batch_size = 16;
  Rng master(seed);
  Rng shuffle_rng = master.child(kShuffleStream);
  Rng drop_rng = master.child(kDropoutStream);
  AdamW opt(policy.n_params(), lr, /*weight_decay=*/0.0);

  auto noised_copy = [&](const TokenSeq& x) {
    TokenSeq noisy;
    noisy.ids.reserve(x.ids.size());
    for (int id : x.ids) {
      if (drop_rng.uniform() >= kPretrainDropout) noisy.ids.push_back(id);
    }
    if (noisy.ids.empty()) noisy.ids.push_back(x.ids.front());
    return noisy;
  };

  auto idx = index_range(data.examples.size());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    shuffle_rng.shuffle(idx);
    for (std::size_t start = 0; start < idx.size(); start += batch_size) {
      const std::size_t stop = std::min(idx.size(), start + batch_size);
      Vec grad = Vec::Zero(policy.n_params());
      for (std::size_t k = start; k < stop; ++k) {
        const TokenSeq& x = data.examples[idx[k]].text;
        const Scored s = score_with_grad(policy, x, noised_copy(x));
        grad -= s.grad;  // minimize negative log-likelihood
      }
      grad /= static_cast<double>(stop - start);
      opt.step(policy.params(), grad);
    }
  }
  return policy;
}

std::pair<PolicyModel, TrainHistory> finetune(PolicyModel policy,
                                              const ReferenceModel& ref,
                                              const SvmScreener& screener,
                                              const Dataset& toxic_data,
                                              const TrainConfig& cfg) {
  if (toxic_data.examples.empty()) throw ArgumentError("finetune: empty toxic dataset");
  for (const auto& ex : toxic_data.examples) {
    if (ex.label != Style::toxic) {
      throw ArgumentError("finetune: dataset must contain only toxic-labeled examples");
    }
  }
  if (ref.model().arch() != policy.arch()) {
    throw ArgumentError("finetune: reference arch differs from policy arch");
  }
  if (cfg.epochs <= 0 || cfg.batch_size <= 0) {
    throw ArgumentError("finetune: epochs and batch_size must be positive");
  }
  if (!(cfg.temperature > 0.0)) {
    throw ArgumentError("finetune: temperature must be positive");
  }

  Rng master(cfg.seed);
  Rng shuffle_rng = master.child(kShuffleStream);
  Rng sample_rng = master.child(kSampleStream);
  // Noise draws come from their own stream so that a rate-0 noisy screener
  // reproduces the noise-free trajectory bit for bit.
  Rng noise_rng = Rng(cfg.noise.seed ^ cfg.seed).child(kNoiseStream);

  AdamW opt(policy.n_params(), cfg.lr, cfg.weight_decay);
  LossConfig loss_cfg{cfg.beta, cfg.loss_kind};

  std::vector<TokenSeq> cached(toxic_data.examples.size());
  std::vector<bool> have_cached(toxic_data.examples.size(), false);

  TrainHistory history;
  auto idx = index_range(toxic_data.examples.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(idx);

    double loss_sum = 0.0;
    long pass_count = 0, fail_count = 0;

    for (std::size_t start = 0; start < idx.size(); start += cfg.batch_size) {
      const std::size_t stop =
          std::min(idx.size(), start + static_cast<std::size_t>(cfg.batch_size));
      Vec grad = Vec::Zero(policy.n_params());
      bool any_active = false;

      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = idx[k];
        const TokenSeq& x = toxic_data.examples[i].text;

        Interaction it;
        it.x = x;
        if (cfg.cache_samples && have_cached[i]) {
          it.y = cached[i];
        } else {
          it.y = sample(policy, x, cfg.temperature, policy.arch().max_len,
                        sample_rng)
                     .seq;
          if (cfg.cache_samples) {
            cached[i] = it.y;
            have_cached[i] = true;
          }
        }
        it.a = respond(screener, it.y, cfg.noise, noise_rng);
        it.a == 1 ? ++pass_count : ++fail_count;

        LossValue lv;
        try {
          lv = compute_loss(policy, ref, it, loss_cfg);
        } catch (const NumericError& e) {
          throw NumericError("finetune: " + std::string(e.what()) +
                             " at epoch " + std::to_string(epoch) +
                             ", example " + std::to_string(i) + " (\"" +
                             toxic_data.examples[i].text.raw + "\")");
        }
        loss_sum += lv.value;
        if (lv.branch != Branch::skipped) {
          grad += lv.grad;
          any_active = true;
        }
      }

      if (any_active) {
        grad /= static_cast<double>(stop - start);
        opt.step(policy.params(), grad);
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = loss_sum / static_cast<double>(idx.size());
    rec.pass_count = pass_count;
    rec.fail_count = fail_count;
    rec.pass_rate =
        static_cast<double>(pass_count) / static_cast<double>(idx.size());
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    history.epochs.push_back(rec);
  }
  return {std::move(policy), std::move(history)};
}

void write_history_csv(const TrainHistory& h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,mean_loss,pass_rate,fail_count,pass_count\n";
  char buf[128];
  for (const auto& r : h.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.9f,%.6f,%ld,%ld\n", r.epoch,
                  r.mean_loss, r.pass_rate, r.fail_count, r.pass_count);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace sro
