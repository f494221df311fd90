#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "sro/text.hpp"
#include "sro/types.hpp"

namespace sro {

enum class Style { toxic, nontoxic };

inline const char* style_name(Style s) {
  return s == Style::toxic ? "toxic" : "nontoxic";
}

struct LabeledExample {
  TokenSeq text;
  Style label = Style::nontoxic;
};

struct Dataset {
  std::vector<LabeledExample> examples;
  Vocab vocab;
  std::string provenance;

  std::size_t size() const { return examples.size(); }
};

// Synthetic toxic-token benchmark: uniform random sentences over a closed
// vocabulary, labeled toxic exactly when they contain a marked token.
struct SynthSpec {
  int vocab_size = 64;
  std::vector<int> toxic_token_ids;
  int len_min = 3;
  int len_max = 7;
  int n_toxic = 0;
  int n_nontoxic = 0;
  std::uint64_t seed = 0;
};

// Jigsaw-format CSV: header row with `comment_text` and `toxic` columns,
// RFC 4180 quoting. A row is toxic iff its `toxic` field parses as 1.
Dataset load_jigsaw_csv(const std::filesystem::path& path);

// Internal JSONL: one {"text": ..., "label": "toxic"|"nontoxic"} per line.
Dataset load_jsonl(const std::filesystem::path& path);
// Same file format, but tokenized under a caller-fixed vocabulary (used to
// keep ids aligned with a previously trained screener or checkpoint).
Dataset load_jsonl(const std::filesystem::path& path, const Vocab& vocab);
void save_jsonl(const Dataset& d, const std::filesystem::path& path);

// Deterministic shuffled partition. Train size is ceil(fraction * n) up to
// floating-point guard; a warning is printed when the test side is empty.
std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction,
                                  std::uint64_t seed);

Dataset generate_synthetic(const SynthSpec& spec);

Dataset filter_style(const Dataset& d, Style keep);

// Membership oracle for the synthetic task: toxic iff any id is marked.
bool contains_marked_token(const TokenSeq& t, const std::vector<int>& marked);

}  // namespace sro
