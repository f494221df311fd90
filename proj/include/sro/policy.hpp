#pragma once

#include <filesystem>
#include <utility>

#include "sro/text.hpp"
#include "sro/types.hpp"

namespace sro {

// Architecture of the compact autoregressive scorer. vocab_size is the full
// model vocabulary including the four specials, which occupy the last four
// ids in the order UNK, BOS, EOS, SEP (matching Vocab).
struct PolicyArch {
  int vocab_size = 0;
  int embed_dim = 0;
  int hidden_dim = 0;
  int max_len = 32;

  int unk_id() const { return vocab_size - 4; }
  int bos_id() const { return vocab_size - 3; }
  int eos_id() const { return vocab_size - 2; }
  int sep_id() const { return vocab_size - 1; }

  bool operator==(const PolicyArch&) const = default;
};

PolicyArch arch_for_vocab(const Vocab& v, int embed_dim, int hidden_dim,
                          int max_len);

// Single-layer GRU next-token model with tied input/output embeddings.
// Conditioning is teacher-forced over BOS + x + SEP + y + EOS; all
// parameters live in one flat vector, viewed through Eigen maps:
//
//   E   vocab  x embed   token embeddings (also the output projection)
//   Wr, Wz, Wn hidden x embed    input-to-gate weights
//   Ur, Uz, Un hidden x hidden   recurrent weights
//   br, bz, bn hidden            gate biases
//   Who embed  x hidden          hidden-to-embedding readout
//   bo  embed                    readout bias
class PolicyModel {
 public:
  PolicyModel() = default;
  explicit PolicyModel(PolicyArch arch);

  const PolicyArch& arch() const { return arch_; }
  Index n_params() const { return params_.size(); }
  Vec& params() { return params_; }
  const Vec& params() const { return params_; }

  using MatMap = Eigen::Map<const Mat>;
  using VecMap = Eigen::Map<const Vec>;

  MatMap embedding() const { return view(off_e_, arch_.vocab_size, arch_.embed_dim); }
  MatMap w_r() const { return view(off_wr_, arch_.hidden_dim, arch_.embed_dim); }
  MatMap w_z() const { return view(off_wz_, arch_.hidden_dim, arch_.embed_dim); }
  MatMap w_n() const { return view(off_wn_, arch_.hidden_dim, arch_.embed_dim); }
  MatMap u_r() const { return view(off_ur_, arch_.hidden_dim, arch_.hidden_dim); }
  MatMap u_z() const { return view(off_uz_, arch_.hidden_dim, arch_.hidden_dim); }
  MatMap u_n() const { return view(off_un_, arch_.hidden_dim, arch_.hidden_dim); }
  VecMap b_r() const { return vview(off_br_, arch_.hidden_dim); }
  VecMap b_z() const { return vview(off_bz_, arch_.hidden_dim); }
  VecMap b_n() const { return vview(off_bn_, arch_.hidden_dim); }
  MatMap w_ho() const { return view(off_who_, arch_.embed_dim, arch_.hidden_dim); }
  VecMap b_o() const { return vview(off_bo_, arch_.embed_dim); }

  // offsets into the flat vector, used by the backward pass
  Index off_e() const { return off_e_; }
  Index off_wr() const { return off_wr_; }
  Index off_wz() const { return off_wz_; }
  Index off_wn() const { return off_wn_; }
  Index off_ur() const { return off_ur_; }
  Index off_uz() const { return off_uz_; }
  Index off_un() const { return off_un_; }
  Index off_br() const { return off_br_; }
  Index off_bz() const { return off_bz_; }
  Index off_bn() const { return off_bn_; }
  Index off_who() const { return off_who_; }
  Index off_bo() const { return off_bo_; }

 private:
  MatMap view(Index off, int rows, int cols) const {
    return MatMap(params_.data() + off, rows, cols);
  }
  VecMap vview(Index off, int n) const { return VecMap(params_.data() + off, n); }

  PolicyArch arch_;
  Vec params_;
  Index off_e_ = 0, off_wr_ = 0, off_wz_ = 0, off_wn_ = 0;
  Index off_ur_ = 0, off_uz_ = 0, off_un_ = 0;
  Index off_br_ = 0, off_bz_ = 0, off_bn_ = 0;
  Index off_who_ = 0, off_bo_ = 0;
};

// Small uniform initialization, deterministic under seed.
PolicyModel init_policy(const PolicyArch& arch, std::uint64_t seed);

// Frozen deep copy of a policy; later updates to the source do not affect it.
class ReferenceModel {
 public:
  ReferenceModel() = default;
  explicit ReferenceModel(const PolicyModel& m) : frozen_(m) {}
  const PolicyModel& model() const { return frozen_; }

 private:
  PolicyModel frozen_;
};

inline ReferenceModel freeze_reference(const PolicyModel& m) {
  return ReferenceModel(m);
}

// Exact teacher-forced conditional log-probability
//   sum_t ln P(y_t | BOS, x, SEP, y_<t) + ln P(EOS | ...).
// Always <= 0 up to rounding; throws ArgumentError on out-of-range ids or
// sequences longer than max_len.
double log_prob(const PolicyModel& m, const TokenSeq& y, const TokenSeq& x);
inline double log_prob(const ReferenceModel& m, const TokenSeq& y,
                       const TokenSeq& x) {
  return log_prob(m.model(), y, x);
}

// Exact reverse-mode gradient of log_prob with respect to every parameter.
Vec grad_log_prob(const PolicyModel& m, const TokenSeq& y, const TokenSeq& x);

// log_prob and its gradient from one shared forward pass.
struct Scored {
  double logp = 0.0;
  Vec grad;
};
Scored score_with_grad(const PolicyModel& m, const TokenSeq& y, const TokenSeq& x);

// Next-token distribution after consuming BOS + x + SEP (position 0 of y).
Vec first_token_distribution(const PolicyModel& m, const TokenSeq& x);

struct SampleResult {
  TokenSeq seq;            // raw left empty; callers detokenize as needed
  bool truncated = false;  // hit max_len before EOS
};

// Ancestral sampling until EOS or max_len. temperature == 0 selects greedy
// argmax decoding (the limiting case); temperature < 0 is an error.
SampleResult sample(const PolicyModel& m, const TokenSeq& x, double temperature,
                    int max_len, Rng& rng);

TokenSeq greedy_decode(const PolicyModel& m, const TokenSeq& x, int max_len);

void save_policy(const PolicyModel& m, const Vocab& vocab,
                 const std::filesystem::path& path);
std::pair<PolicyModel, Vocab> load_policy(const std::filesystem::path& path);

}  // namespace sro
