#include "sro/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace sro {

namespace {

// RFC 4180 field splitter; handles quoted fields, doubled quotes, and
// embedded commas/newlines. Returns one record per call, false at EOF.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\r') {
      // swallow; CRLF handled at '\n'
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

Dataset finish_dataset(std::vector<std::pair<std::string, Style>> rows,
                       std::string provenance) {
  if (rows.empty()) throw SchemaError("dataset is empty: " + provenance);
  std::vector<std::string> all_words;
  for (const auto& [text, label] : rows) {
    auto words = split_words(text);
    all_words.insert(all_words.end(), words.begin(), words.end());
  }
  Dataset d;
  d.vocab = Vocab::from_tokens(std::move(all_words));
  d.provenance = std::move(provenance);
  d.examples.reserve(rows.size());
  for (auto& [text, label] : rows) {
    if (split_words(text).empty()) continue;  // skip degenerate blank rows
    d.examples.push_back({tokenize(text, d.vocab), label});
  }
  if (d.examples.empty()) throw SchemaError("dataset has no tokenizable rows: " + d.provenance);
  return d;
}

std::vector<std::pair<std::string, Style>> read_jsonl_rows(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::pair<std::string, Style>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                        ": invalid JSON: " + e.what());
    }
    if (!j.contains("text") || !j["text"].is_string()) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                        ": missing string field 'text'");
    }
    if (!j.contains("label") || !j["label"].is_string()) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                        ": missing string field 'label'");
    }
    const std::string label = j["label"].get<std::string>();
    if (label != "toxic" && label != "nontoxic") {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) +
                        ": label must be 'toxic' or 'nontoxic'");
    }
    rows.emplace_back(j["text"].get<std::string>(),
                      label == "toxic" ? Style::toxic : Style::nontoxic);
  }
  return rows;
}

}  // namespace

Dataset load_jigsaw_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<std::string> header;
  if (!read_csv_record(in, header)) throw SchemaError(path.string() + ": empty file");

  auto col = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int text_col = col("comment_text");
  const int toxic_col = col("toxic");
  if (text_col < 0) throw SchemaError(path.string() + ": missing column 'comment_text'");
  if (toxic_col < 0) throw SchemaError(path.string() + ": missing column 'toxic'");

  std::vector<std::pair<std::string, Style>> rows;
  std::vector<std::string> fields;
  std::size_t recno = 1;
  while (read_csv_record(in, fields)) {
    ++recno;
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    const std::size_t need =
        static_cast<std::size_t>(std::max(text_col, toxic_col)) + 1;
    if (fields.size() < need) {
      throw SchemaError(path.string() + ": record " + std::to_string(recno) +
                        " has " + std::to_string(fields.size()) + " fields");
    }
    long toxic_val = 0;
    try {
      toxic_val = std::stol(fields[static_cast<std::size_t>(toxic_col)]);
    } catch (...) {
      toxic_val = 0;  // anything that does not parse as 1 is nontoxic
    }
    rows.emplace_back(fields[static_cast<std::size_t>(text_col)],
                      toxic_val == 1 ? Style::toxic : Style::nontoxic);
  }
  return finish_dataset(std::move(rows), "jigsaw:" + path.string());
}

Dataset load_jsonl(const std::filesystem::path& path) {
  return finish_dataset(read_jsonl_rows(path), "jsonl:" + path.string());
}

Dataset load_jsonl(const std::filesystem::path& path, const Vocab& vocab) {
  auto rows = read_jsonl_rows(path);
  if (rows.empty()) throw SchemaError("dataset is empty: " + path.string());
  Dataset d;
  d.vocab = vocab;
  d.provenance = "jsonl:" + path.string();
  d.examples.reserve(rows.size());
  for (auto& [text, label] : rows) {
    if (split_words(text).empty()) continue;
    d.examples.push_back({tokenize(text, vocab), label});
  }
  if (d.examples.empty()) throw SchemaError("dataset has no tokenizable rows: " + d.provenance);
  return d;
}

void save_jsonl(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& ex : d.examples) {
    nlohmann::json j;
    j["text"] = ex.text.raw.empty() ? detokenize(ex.text, d.vocab) : ex.text.raw;
    j["label"] = style_name(ex.label);
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ArgumentError("split: train_fraction must be in (0, 1)");
  }
  const std::size_t n = d.examples.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const double guard = train_fraction * static_cast<double>(n) - 1e-9;
  std::size_t n_train = static_cast<std::size_t>(std::ceil(guard));
  n_train = std::min(n_train, n);
  if (n_train == n) {
    std::cerr << "split: warning: test side is empty (n=" << n
              << ", fraction=" << train_fraction << ")\n";
  }

  Dataset train{{}, d.vocab, d.provenance + "#train"};
  Dataset test{{}, d.vocab, d.provenance + "#test"};
  train.examples.reserve(n_train);
  test.examples.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).examples.push_back(d.examples[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

bool contains_marked_token(const TokenSeq& t, const std::vector<int>& marked) {
  for (int id : t.ids) {
    if (std::find(marked.begin(), marked.end(), id) != marked.end()) return true;
  }
  return false;
}

Dataset generate_synthetic(const SynthSpec& spec) {
  if (spec.vocab_size <= 0) throw ArgumentError("generate_synthetic: vocab_size must be positive");
  if (spec.toxic_token_ids.empty()) throw ArgumentError("generate_synthetic: toxic_token_ids is empty");
  for (int id : spec.toxic_token_ids) {
    if (id < 0 || id >= spec.vocab_size) {
      throw ArgumentError("generate_synthetic: toxic token id out of range");
    }
  }
  if (spec.n_toxic <= 0 || spec.n_nontoxic <= 0) {
    throw ArgumentError("generate_synthetic: counts must be positive");
  }
  if (spec.len_min < 1 || spec.len_min > spec.len_max) {
    throw ArgumentError("generate_synthetic: bad sentence length range");
  }
  if (static_cast<int>(spec.toxic_token_ids.size()) >= spec.vocab_size) {
    throw ArgumentError("generate_synthetic: no nontoxic tokens left in vocabulary");
  }

  Dataset d;
  d.vocab = Vocab::identity(spec.vocab_size);
  d.provenance = "synthetic:seed=" + std::to_string(spec.seed);

  Rng rng(spec.seed);
  // Rejection sampling keeps sentences uniform conditioned on their label.
  auto draw_sentence = [&](bool toxic) {
    std::vector<int> ids;
    for (;;) {
      const int len = rng.range(spec.len_min, spec.len_max);
      ids.clear();
      ids.reserve(static_cast<std::size_t>(len));
      for (int i = 0; i < len; ++i) ids.push_back(rng.below(spec.vocab_size));
      TokenSeq probe{ids, {}};
      if (contains_marked_token(probe, spec.toxic_token_ids) == toxic) break;
    }
    return ids;
  };

  d.examples.reserve(static_cast<std::size_t>(spec.n_toxic + spec.n_nontoxic));
  for (int i = 0; i < spec.n_toxic; ++i) {
    d.examples.push_back({make_seq(draw_sentence(true), d.vocab), Style::toxic});
  }
  for (int i = 0; i < spec.n_nontoxic; ++i) {
    d.examples.push_back({make_seq(draw_sentence(false), d.vocab), Style::nontoxic});
  }
  return d;
}

Dataset filter_style(const Dataset& d, Style keep) {
  Dataset out{{}, d.vocab, d.provenance + "#" + style_name(keep)};
  for (const auto& ex : d.examples) {
    if (ex.label == keep) out.examples.push_back(ex);
  }
  return out;
}

}  // namespace sro
