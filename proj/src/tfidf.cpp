#include "sro/tfidf.hpp"

#include <cmath>
#include <map>

namespace sro {

TfidfModel fit_tfidf(const Dataset& train) {
  if (train.examples.empty()) throw ArgumentError("fit_tfidf: empty corpus");

  // document frequency per token id; std::map keeps columns ordered by id
  std::map<int, long> df;
  for (const auto& ex : train.examples) {
    std::vector<int> uniq = ex.text.ids;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (int id : uniq) ++df[id];
  }

  TfidfModel m;
  m.n_docs = static_cast<long>(train.examples.size());
  m.column_tokens.reserve(df.size());
  m.idf.resize(static_cast<Index>(df.size()));
  int max_id = 0;
  for (const auto& [id, count] : df) max_id = std::max(max_id, id);
  m.token_columns.assign(static_cast<std::size_t>(max_id) + 1, -1);

  int col = 0;
  for (const auto& [id, count] : df) {
    m.column_tokens.push_back(id);
    m.token_columns[static_cast<std::size_t>(id)] = col;
    m.idf[col] = std::log((1.0 + static_cast<double>(m.n_docs)) /
                          (1.0 + static_cast<double>(count))) +
                 1.0;
    ++col;
  }
  return m;
}

SparseVec transform(const TfidfModel& m, const TokenSeq& t) {
  // term frequencies restricted to seen tokens, keyed by column
  std::map<int, double> tf;
  for (int id : t.ids) {
    if (id < 0 || id >= static_cast<int>(m.token_columns.size())) continue;
    const int col = m.token_columns[static_cast<std::size_t>(id)];
    if (col >= 0) tf[col] += 1.0;
  }

  SparseVec v;
  v.dim = m.dim();
  v.indices.reserve(tf.size());
  v.values.reserve(tf.size());
  for (const auto& [col, count] : tf) {
    v.indices.push_back(col);
    v.values.push_back(count * m.idf[col]);
  }
  const double norm = std::sqrt(v.squared_norm());
  if (norm > 0.0) {
    for (double& x : v.values) x /= norm;
  }
  return v;
}

}  // namespace sro
