#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "sro/corpus.hpp"
#include "sro/losses.hpp"
#include "sro/policy.hpp"
#include "sro/screener.hpp"
#include "sro/types.hpp"

namespace sro {

struct TrainConfig {
  int epochs = 15;
  int batch_size = 16;
  double lr = 2e-5;
  double weight_decay = 0.01;
  double beta = 0.01;
  LossKind loss_kind = LossKind::sro;
  ScreenerNoise noise;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  bool cache_samples = false;  // default: fresh sample per encounter (on-policy)
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double pass_rate = 0.0;  // empirical mean of recorded responses a
  long pass_count = 0;
  long fail_count = 0;
  double wall_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

// Maximum-likelihood copy pretraining: teacher-forced pairs (x~, x) where x~
// drops each input token with small probability, so the policy learns to
// emit near-copies before the screening game starts.
PolicyModel pretrain(PolicyModel policy, const Dataset& data, int epochs,
                     double lr, std::uint64_t seed);

// The Stackelberg fine-tuning loop: per batch, sample paraphrases from the
// current policy, obtain screener responses, average the configured loss
// gradient, and take one AdamW step. A batch in which every interaction was
// skipped takes no step (the loss contributes nothing, so the parameters
// must not move).
std::pair<PolicyModel, TrainHistory> finetune(PolicyModel policy,
                                              const ReferenceModel& ref,
                                              const SvmScreener& screener,
                                              const Dataset& toxic_data,
                                              const TrainConfig& cfg);

// CSV columns: epoch, mean_loss, pass_rate, fail_count, pass_count.
// Wall time stays out of the file so reruns are byte-identical.
void write_history_csv(const TrainHistory& h, const std::filesystem::path& path);

}  // namespace sro
