#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sro/corpus.hpp"
#include "sro/policy.hpp"
#include "sro/types.hpp"

namespace sro {

struct EvalReport {
  double sta = 0.0;
  double sim = 0.0;
  double fl = 0.0;
  double j = 0.0;  // product of the three, by definition
  long n = 0;
};

// Style-accuracy judge, independent of the training-time screener by
// construction: character-trigram TF-IDF features (the screener uses word
// unigrams) fit on a differently seeded subsample, logistic loss instead of
// hinge. Emits the probability that a string is non-toxic.
class EvalClassifier {
 public:
  double prob_nontoxic(const std::string& raw) const;
  double holdout_accuracy() const { return holdout_accuracy_; }

  friend EvalClassifier train_eval_classifier(const Dataset& data,
                                              std::uint64_t seed);

 private:
  std::map<std::string, int> trigram_cols_;
  Vec idf_;
  Vec weights_;
  double bias_ = 0.0;
  double holdout_accuracy_ = 0.0;
};

EvalClassifier train_eval_classifier(const Dataset& data, std::uint64_t seed);

// Fraction of outputs judged non-toxic (probability >= 0.5; the boundary
// counts as non-toxic).
double sta(const std::vector<TokenSeq>& outputs, const EvalClassifier& clf);

// Content-similarity proxy: mean token embedding, cosine mapped from [-1,1]
// to [0,1] via (c+1)/2. Identical sequences score exactly 1; a zero mean
// embedding on either side scores 0.5 (the orthogonal-equivalent value).
struct Embedder {
  Mat embeddings;  // vocab x embed, typically a policy's tied embeddings
};

Embedder make_embedder(const PolicyModel& m);

double sim(const TokenSeq& x, const TokenSeq& y, const Embedder& emb);

// Fluency proxy: add-k smoothed bigram language model over token ids with a
// pass threshold on mean per-token negative log-probability, calibrated so
// that a target fraction of held-out real sentences pass.
class FluencyModel {
 public:
  double mean_nll(const TokenSeq& t) const;  // +inf for an empty sequence
  bool fluent(const TokenSeq& t) const { return mean_nll(t) <= threshold_; }
  double threshold() const { return threshold_; }

  friend FluencyModel fit_fluency(const Dataset& train,
                                  const std::vector<TokenSeq>& calibration,
                                  double target_pass_rate);

 private:
  long long key(int prev, int next) const {
    return static_cast<long long>(prev) * (n_ids_ + 1) + next;
  }

  int n_ids_ = 0;  // id space size; prev state n_ids_ = start, next n_ids_ = end
  double smoothing_ = 0.5;
  std::unordered_map<long long, double> bigram_;
  Vec row_totals_;
  double threshold_ = 0.0;
};

FluencyModel fit_fluency(const Dataset& train,
                         const std::vector<TokenSeq>& calibration,
                         double target_pass_rate = 0.9);

double fl(const std::vector<TokenSeq>& outputs, const FluencyModel& lm);

// Product of the three metrics; inputs must lie in [0, 1].
double j_metric(double sta, double sim, double fl);

TokenSeq baseline_duplicate(const TokenSeq& x);

struct DeleteResult {
  TokenSeq seq;
  bool emptied = false;  // every token was in the lexicon
};

// Removes all lexicon tokens; if nothing survives, emits a single UNK.
DeleteResult baseline_delete(const TokenSeq& x, const std::set<int>& lexicon,
                             const Vocab& vocab);

std::set<int> load_lexicon(const std::filesystem::path& path, const Vocab& vocab);

using Rewriter = std::function<TokenSeq(const TokenSeq&)>;

// Rewrites every toxic test sentence (greedy decoding for policies) and
// aggregates STA, mean SIM, FL, and their product.
EvalReport evaluate_system(const Rewriter& rewrite, const Dataset& test_toxic,
                           const EvalClassifier& clf, const Embedder& emb,
                           const FluencyModel& lm);

// Table 1-style outputs: one row per system, columns STA/SIM/FL/J.
void write_report_csv(const std::vector<std::pair<std::string, EvalReport>>& rows,
                      const std::filesystem::path& path);
std::string format_report_table(
    const std::vector<std::pair<std::string, EvalReport>>& rows);

}  // namespace sro
