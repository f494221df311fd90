#include "sro/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sro/numeric.hpp"
#include "sro/optimizer.hpp"
#include "sro/tfidf.hpp"

namespace sro {

namespace {

std::vector<std::string> char_trigrams(const std::string& raw) {
  std::string s = " ";
  for (char c : raw) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  s.push_back(' ');
  std::vector<std::string> grams;
  if (s.size() < 3) return grams;
  grams.reserve(s.size() - 2);
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) grams.push_back(s.substr(i, 3));
  return grams;
}

SparseVec trigram_features(const std::string& raw,
                           const std::map<std::string, int>& cols, const Vec& idf) {
  std::map<int, double> tf;
  for (const auto& g : char_trigrams(raw)) {
    auto it = cols.find(g);
    if (it != cols.end()) tf[it->second] += 1.0;
  }
  SparseVec v;
  v.dim = static_cast<int>(cols.size());
  for (const auto& [col, count] : tf) {
    v.indices.push_back(col);
    v.values.push_back(count * idf[col]);
  }
  const double norm = std::sqrt(v.squared_norm());
  if (norm > 0.0) {
    for (double& x : v.values) x /= norm;
  }
  return v;
}

}  // namespace

EvalClassifier train_eval_classifier(const Dataset& data, std::uint64_t seed) {
  bool has_pos = false, has_neg = false;
  for (const auto& ex : data.examples) {
    (ex.label == Style::nontoxic ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw TrainingError("train_eval_classifier: both classes required");
  }

  // Seeded subsample for fitting; the rest measures holdout accuracy. The
  // split is independent of any split the screener saw.
  std::vector<std::size_t> order(data.examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(splitmix64(seed ^ 0xe7a1c1a5ULL));
  rng.shuffle(order);
  const std::size_t n_fit = std::max<std::size_t>(1, order.size() * 4 / 5);

  EvalClassifier clf;
  {
    std::map<std::string, long> df;
    for (std::size_t k = 0; k < n_fit; ++k) {
      const auto& ex = data.examples[order[k]];
      auto grams = char_trigrams(ex.text.raw);
      std::sort(grams.begin(), grams.end());
      grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
      for (const auto& g : grams) ++df[g];
    }
    clf.idf_.resize(static_cast<Index>(df.size()));
    int col = 0;
    for (const auto& [gram, count] : df) {
      clf.trigram_cols_.emplace(gram, col);
      clf.idf_[col] = std::log((1.0 + static_cast<double>(n_fit)) /
                               (1.0 + static_cast<double>(count))) +
                      1.0;
      ++col;
    }
  }

  std::vector<SparseVec> feats;
  std::vector<double> labels;
  feats.reserve(n_fit);
  for (std::size_t k = 0; k < n_fit; ++k) {
    const auto& ex = data.examples[order[k]];
    feats.push_back(trigram_features(ex.text.raw, clf.trigram_cols_, clf.idf_));
    labels.push_back(ex.label == Style::nontoxic ? 1.0 : 0.0);
  }

  // Full-batch logistic regression; deterministic, no sampling involved.
  const Index dim = static_cast<Index>(clf.trigram_cols_.size());
  Vec wb = Vec::Zero(dim + 1);  // weights + bias in one vector
  AdamW opt(dim + 1, /*lr=*/0.1, /*weight_decay=*/1e-4);
  const int iters = 300;
  for (int it = 0; it < iters; ++it) {
    Vec grad = Vec::Zero(dim + 1);
    for (std::size_t i = 0; i < feats.size(); ++i) {
      const double p = sigmoid(feats[i].dot(wb.head(dim)) + wb[dim]);
      const double err = p - labels[i];
      for (std::size_t k = 0; k < feats[i].indices.size(); ++k) {
        grad[feats[i].indices[k]] += err * feats[i].values[k];
      }
      grad[dim] += err;
    }
    grad /= static_cast<double>(feats.size());
    opt.step(wb, grad);
  }
  clf.weights_ = wb.head(dim);
  clf.bias_ = wb[dim];

  long correct = 0;
  long held = 0;
  for (std::size_t k = n_fit; k < order.size(); ++k) {
    const auto& ex = data.examples[order[k]];
    const double p = clf.prob_nontoxic(ex.text.raw);
    const int predicted = p >= 0.5 ? 1 : 0;
    const int want = ex.label == Style::nontoxic ? 1 : 0;
    if (predicted == want) ++correct;
    ++held;
  }
  clf.holdout_accuracy_ =
      held == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(held);
  return clf;
}

double EvalClassifier::prob_nontoxic(const std::string& raw) const {
  const SparseVec v = trigram_features(raw, trigram_cols_, idf_);
  return sigmoid(v.dot(weights_) + bias_);
}

double sta(const std::vector<TokenSeq>& outputs, const EvalClassifier& clf) {
  if (outputs.empty()) throw ArgumentError("sta: empty output list");
  long nontoxic = 0;
  for (const auto& t : outputs) {
    if (clf.prob_nontoxic(t.raw) >= 0.5) ++nontoxic;
  }
  return static_cast<double>(nontoxic) / static_cast<double>(outputs.size());
}

Embedder make_embedder(const PolicyModel& m) { return Embedder{m.embedding()}; }

namespace {

Vec mean_embedding(const std::vector<int>& ids, const Mat& emb) {
  Vec v = Vec::Zero(emb.cols());
  if (ids.empty()) return v;
  for (int id : ids) {
    if (id < 0 || id >= emb.rows()) throw ArgumentError("sim: token id out of range");
    v += emb.row(id).transpose();
  }
  return v / static_cast<double>(ids.size());
}

}  // namespace

double sim(const TokenSeq& x, const TokenSeq& y, const Embedder& emb) {
  if (x.ids == y.ids) return 1.0;
  const Vec vx = mean_embedding(x.ids, emb.embeddings);
  const Vec vy = mean_embedding(y.ids, emb.embeddings);
  const double nx = vx.norm(), ny = vy.norm();
  if (nx == 0.0 || ny == 0.0) return 0.5;  // degenerate input, orthogonal-equivalent
  const double c = vx.dot(vy) / (nx * ny);
  return (c + 1.0) / 2.0;
}

FluencyModel fit_fluency(const Dataset& train,
                         const std::vector<TokenSeq>& calibration,
                         double target_pass_rate) {
  if (train.examples.empty()) throw ArgumentError("fit_fluency: empty training set");
  if (calibration.empty()) throw ArgumentError("fit_fluency: empty calibration set");
  if (!(target_pass_rate > 0.0 && target_pass_rate <= 1.0)) {
    throw ArgumentError("fit_fluency: target_pass_rate must be in (0, 1]");
  }

  FluencyModel lm;
  lm.n_ids_ = train.vocab.total_size();
  lm.row_totals_ = Vec::Zero(lm.n_ids_ + 1);
  for (const auto& ex : train.examples) {
    int prev = lm.n_ids_;  // start state
    for (int id : ex.text.ids) {
      const int cur = std::clamp(id, 0, lm.n_ids_ - 1);
      lm.bigram_[lm.key(prev, cur)] += 1.0;
      lm.row_totals_[prev] += 1.0;
      prev = cur;
    }
    lm.bigram_[lm.key(prev, lm.n_ids_)] += 1.0;  // end
    lm.row_totals_[prev] += 1.0;
  }

  std::vector<double> nlls;
  nlls.reserve(calibration.size());
  for (const auto& t : calibration) nlls.push_back(lm.mean_nll(t));
  std::sort(nlls.begin(), nlls.end());
  const std::size_t rank = std::min(
      nlls.size() - 1,
      static_cast<std::size_t>(
          std::ceil(target_pass_rate * static_cast<double>(nlls.size())) - 1));
  lm.threshold_ = nlls[rank];
  return lm;
}

double FluencyModel::mean_nll(const TokenSeq& t) const {
  if (t.ids.empty()) return std::numeric_limits<double>::infinity();
  const double k = smoothing_;
  const double denom_adjust = k * static_cast<double>(n_ids_ + 1);
  double nll = 0.0;
  int prev = n_ids_;
  auto step = [&](int next) {
    auto it = bigram_.find(key(prev, next));
    const double count = it == bigram_.end() ? 0.0 : it->second;
    const double total = row_totals_[prev];
    nll -= std::log((count + k) / (total + denom_adjust));
  };
  for (int id : t.ids) {
    const int cur = std::clamp(id, 0, n_ids_ - 1);
    step(cur);
    prev = cur;
  }
  step(n_ids_);
  return nll / static_cast<double>(t.ids.size() + 1);
}

double fl(const std::vector<TokenSeq>& outputs, const FluencyModel& lm) {
  if (outputs.empty()) throw ArgumentError("fl: empty output list");
  long fluent = 0;
  for (const auto& t : outputs) {
    if (lm.fluent(t)) ++fluent;
  }
  return static_cast<double>(fluent) / static_cast<double>(outputs.size());
}

double j_metric(double sta, double sim, double fl) {
  for (double v : {sta, sim, fl}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ArgumentError("j_metric: inputs must lie in [0, 1]");
    }
  }
  return sta * sim * fl;
}

TokenSeq baseline_duplicate(const TokenSeq& x) { return x; }

DeleteResult baseline_delete(const TokenSeq& x, const std::set<int>& lexicon,
                             const Vocab& vocab) {
  DeleteResult out;
  for (int id : x.ids) {
    if (lexicon.find(id) == lexicon.end()) out.seq.ids.push_back(id);
  }
  if (out.seq.ids.empty()) {
    out.seq.ids.push_back(vocab.unk_id());
    out.emptied = true;
  }
  out.seq.raw = detokenize(out.seq.ids, vocab);
  return out;
}

std::set<int> load_lexicon(const std::filesystem::path& path, const Vocab& vocab) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::set<int> ids;
  std::string line;
  while (std::getline(in, line)) {
    auto words = split_words(line);
    if (words.empty()) continue;
    for (const auto& w : words) {
      if (vocab.contains(w)) ids.insert(vocab.id_of(w));
      // tokens absent from the vocab cannot occur in any sentence; skip
    }
  }
  return ids;
}

EvalReport evaluate_system(const Rewriter& rewrite, const Dataset& test_toxic,
                           const EvalClassifier& clf, const Embedder& emb,
                           const FluencyModel& lm) {
  if (test_toxic.examples.empty()) {
    throw ArgumentError("evaluate_system: empty test set");
  }
  std::vector<TokenSeq> outputs;
  outputs.reserve(test_toxic.examples.size());
  double sim_sum = 0.0;
  for (const auto& ex : test_toxic.examples) {
    TokenSeq y = rewrite(ex.text);
    if (y.raw.empty() && !y.ids.empty()) y.raw = detokenize(y, test_toxic.vocab);
    sim_sum += sim(ex.text, y, emb);
    outputs.push_back(std::move(y));
  }
  EvalReport r;
  r.n = static_cast<long>(outputs.size());
  r.sta = sta(outputs, clf);
  r.sim = sim_sum / static_cast<double>(outputs.size());
  r.fl = fl(outputs, lm);
  r.j = j_metric(r.sta, r.sim, r.fl);
  return r;
}

void write_report_csv(const std::vector<std::pair<std::string, EvalReport>>& rows,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "model,sta,sim,fl,j,n\n";
  char buf[256];
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%ld\n", name.c_str(),
                  r.sta, r.sim, r.fl, r.j, r.n);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_report_table(
    const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::size_t width = 5;
  for (const auto& [name, r] : rows) width = std::max(width, name.size());
  std::ostringstream os;
  os << std::left;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-*s  %5s %5s %5s %5s\n",
                static_cast<int>(width), "Model", "STA", "SIM", "FL", "J");
  os << buf;
  os << std::string(width + 26, '-') << "\n";
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof(buf), "%-*s  %5.2f %5.2f %5.2f %5.2f\n",
                  static_cast<int>(width), name.c_str(), r.sta, r.sim, r.fl, r.j);
    os << buf;
  }
  return os.str();
}

}  // namespace sro
