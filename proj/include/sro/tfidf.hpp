#pragma once

#include <vector>

#include "sro/corpus.hpp"
#include "sro/types.hpp"

namespace sro {

// Sparse feature vector: strictly increasing indices, no stored zeros.
struct SparseVec {
  std::vector<int> indices;
  std::vector<double> values;
  int dim = 0;

  double dot(const Vec& dense) const {
    double s = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      s += values[k] * dense[indices[k]];
    }
    return s;
  }

  double squared_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
  }
};

// Unigram TF-IDF over token ids. idf(t) = ln((1 + N) / (1 + df(t))) + 1,
// features L2-normalized; both choices keep values bounded for the SVM.
struct TfidfModel {
  std::vector<int> column_tokens;  // column -> token id
  std::vector<int> token_columns;  // token id -> column, -1 when unseen
  Vec idf;
  long n_docs = 0;

  int dim() const { return static_cast<int>(column_tokens.size()); }
};

TfidfModel fit_tfidf(const Dataset& train);

// Bag-of-words transform; unseen tokens are skipped, an all-unseen input
// yields the zero vector (empty indices).
SparseVec transform(const TfidfModel& m, const TokenSeq& t);

}  // namespace sro
