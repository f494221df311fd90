#include "sro/screener.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace sro {

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "none") return NoiseKind::none;
  if (s == "relax") return NoiseKind::relax;
  if (s == "overkill") return NoiseKind::overkill;
  throw ArgumentError("unknown noise kind: " + s);
}

const char* noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::relax: return "relax";
    case NoiseKind::overkill: return "overkill";
  }
  return "none";
}

SvmScreener train_svm(const std::vector<SparseVec>& feats,
                      const std::vector<Style>& labels, int epochs,
                      double lambda, std::uint64_t seed) {
  if (feats.empty() || feats.size() != labels.size()) {
    throw ArgumentError("train_svm: features and labels must be non-empty and aligned");
  }
  if (!(lambda > 0.0)) throw ArgumentError("train_svm: lambda must be positive");

  bool has_pos = false, has_neg = false;
  for (Style s : labels) (s == Style::nontoxic ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw TrainingError("train_svm: both classes required");

  const int dim = feats.front().dim;
  bool all_zero = true;
  for (const auto& f : feats) {
    if (f.dim != dim) throw ArgumentError("train_svm: inconsistent feature dims");
    for (double v : f.values) {
      if (!std::isfinite(v)) throw NumericError("train_svm: non-finite feature value");
      if (v != 0.0) all_zero = false;
    }
  }
  if (all_zero) {
    std::cerr << "train_svm: warning: all feature vectors are zero; "
                 "classifier degenerates to sign(bias)\n";
  }

  SvmScreener model;
  model.weights = Vec::Zero(dim);
  model.bias = 0.0;

  Rng rng(seed);
  const long n = static_cast<long>(feats.size());
  long t = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (long step = 0; step < n; ++step) {
      ++t;
      const long i = rng.below(static_cast<int>(n));
      const auto& phi = feats[static_cast<std::size_t>(i)];
      const double y = labels[static_cast<std::size_t>(i)] == Style::nontoxic ? 1.0 : -1.0;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = y * (phi.dot(model.weights) + model.bias);
      model.weights *= (1.0 - eta * lambda);
      if (margin < 1.0) {
        for (std::size_t k = 0; k < phi.indices.size(); ++k) {
          model.weights[phi.indices[k]] += eta * y * phi.values[k];
        }
        model.bias += eta * y;
      }
    }
  }
  return model;
}

SvmScreener train_screener(const Dataset& train, const SvmOptions& opts) {
  TfidfModel tfidf = fit_tfidf(train);
  std::vector<SparseVec> feats;
  std::vector<Style> labels;
  feats.reserve(train.examples.size());
  labels.reserve(train.examples.size());
  for (const auto& ex : train.examples) {
    feats.push_back(transform(tfidf, ex.text));
    labels.push_back(ex.label);
  }
  SvmScreener model = train_svm(feats, labels, opts.epochs, opts.lambda, opts.seed);
  model.tfidf = std::move(tfidf);
  model.vocab = train.vocab;
  return model;
}

int classify(const SvmScreener& s, const TokenSeq& t) {
  return s.score(t) >= 0.0 ? 1 : 0;
}

int respond(const SvmScreener& s, const TokenSeq& t, const ScreenerNoise& noise,
            Rng& rng) {
  switch (noise.kind) {
    case NoiseKind::none:
      return classify(s, t);
    case NoiseKind::relax:
      return rng.uniform() < noise.rate ? 1 : classify(s, t);
    case NoiseKind::overkill:
      return rng.uniform() < noise.rate ? 0 : classify(s, t);
  }
  return classify(s, t);
}

double accuracy(const SvmScreener& s, const Dataset& test) {
  if (test.examples.empty()) throw ArgumentError("accuracy: empty test set");
  long correct = 0;
  for (const auto& ex : test.examples) {
    const int want = ex.label == Style::nontoxic ? 1 : 0;
    if (classify(s, ex.text) == want) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.examples.size());
}

void save_screener(const SvmScreener& s, const std::filesystem::path& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = "screener";
  j["vocab"] = s.vocab.base_tokens();
  j["bias"] = s.bias;
  j["weights"] = std::vector<double>(s.weights.begin(), s.weights.end());
  j["tfidf"]["column_tokens"] = s.tfidf.column_tokens;
  j["tfidf"]["idf"] = std::vector<double>(s.tfidf.idf.begin(), s.tfidf.idf.end());
  j["tfidf"]["n_docs"] = s.tfidf.n_docs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

SvmScreener load_screener(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": invalid JSON: " + e.what());
  }
  if (j.value("kind", "") != "screener") {
    throw SchemaError(path.string() + ": not a screener file");
  }
  SvmScreener s;
  s.vocab = Vocab::from_ordered_tokens(j.at("vocab").get<std::vector<std::string>>());
  s.bias = j.at("bias").get<double>();
  auto w = j.at("weights").get<std::vector<double>>();
  s.weights = Eigen::Map<const Vec>(w.data(), static_cast<Index>(w.size()));
  s.tfidf.column_tokens = j.at("tfidf").at("column_tokens").get<std::vector<int>>();
  auto idf = j.at("tfidf").at("idf").get<std::vector<double>>();
  s.tfidf.idf = Eigen::Map<const Vec>(idf.data(), static_cast<Index>(idf.size()));
  s.tfidf.n_docs = j.at("tfidf").at("n_docs").get<long>();
  int max_id = 0;
  for (int id : s.tfidf.column_tokens) max_id = std::max(max_id, id);
  s.tfidf.token_columns.assign(static_cast<std::size_t>(max_id) + 1, -1);
  for (int col = 0; col < s.tfidf.dim(); ++col) {
    s.tfidf.token_columns[static_cast<std::size_t>(s.tfidf.column_tokens[col])] = col;
  }
  return s;
}

}  // namespace sro
