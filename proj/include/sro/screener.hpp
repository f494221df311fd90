#pragma once

#include <filesystem>

#include "sro/tfidf.hpp"
#include "sro/types.hpp"

namespace sro {

// Screener corruption for the robustness protocol: `relax` forces a
// non-toxic verdict with probability `rate`, `overkill` forces a toxic one.
enum class NoiseKind { none, relax, overkill };

struct ScreenerNoise {
  NoiseKind kind = NoiseKind::none;
  double rate = 0.0;
  std::uint64_t seed = 0;
};

NoiseKind parse_noise_kind(const std::string& s);
const char* noise_kind_name(NoiseKind k);

// Linear SVM over TF-IDF features. Decision convention: score >= 0 means
// non-toxic (response 1), ties included; label +1 is nontoxic, -1 toxic.
struct SvmScreener {
  Vec weights;
  double bias = 0.0;
  TfidfModel tfidf;
  Vocab vocab;  // id space the features were fit under

  double score(const TokenSeq& t) const {
    return transform(tfidf, t).dot(weights) + bias;
  }
};

struct SvmOptions {
  int epochs = 10;
  double lambda = 1e-4;
  std::uint64_t seed = 0;
};

// Pegasos-style stochastic subgradient descent on the hinge objective
//   lambda/2 ||w||^2 + mean_i max(0, 1 - y_i (w . phi_i + b))
// with step 1/(lambda t); the bias is updated unregularized.
SvmScreener train_svm(const std::vector<SparseVec>& feats,
                      const std::vector<Style>& labels, int epochs,
                      double lambda, std::uint64_t seed);

// Fits TF-IDF on `train` and runs train_svm with the given options.
SvmScreener train_screener(const Dataset& train, const SvmOptions& opts);

// 1 = nontoxic, 0 = toxic; pure function of (weights, bias, tfidf, input).
int classify(const SvmScreener& s, const TokenSeq& t);

// Noise-wrapped response. `none` consumes no draws; the other kinds draw
// once per call from the provided stream.
int respond(const SvmScreener& s, const TokenSeq& t, const ScreenerNoise& noise,
            Rng& rng);

double accuracy(const SvmScreener& s, const Dataset& test);

void save_screener(const SvmScreener& s, const std::filesystem::path& path);
SvmScreener load_screener(const std::filesystem::path& path);

}  // namespace sro
