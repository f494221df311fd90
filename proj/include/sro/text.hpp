#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sro/types.hpp"

namespace sro {

// Token vocabulary: a dense id space over word types plus four reserved
// specials appended after the base tokens (UNK, BOS, EOS, SEP, in that
// order). Model vocabularies are always total_size() wide.
class Vocab {
 public:
  Vocab() = default;

  // Deterministic construction: unique tokens, sorted lexicographically.
  static Vocab from_tokens(std::vector<std::string> tokens);

  // Restores a serialized vocabulary; token position defines its id.
  static Vocab from_ordered_tokens(std::vector<std::string> tokens);

  // Synthetic-language vocabulary "w0".."w{n-1}" with id_of("wi") == i.
  static Vocab identity(int n_base);

  int n_base() const { return static_cast<int>(tokens_.size()); }
  int total_size() const { return n_base() + 4; }

  int unk_id() const { return n_base(); }
  int bos_id() const { return n_base() + 1; }
  int eos_id() const { return n_base() + 2; }
  int sep_id() const { return n_base() + 3; }

  // id for a base token, or unk_id() when absent
  int id_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token_of(int id) const;  // specials render as "<unk>" etc.

  const std::vector<std::string>& base_tokens() const { return tokens_; }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// A tokenized sentence. `raw` keeps the original surface string when the
// sequence came from text; sequences built from ids carry the detokenized
// form instead.
struct TokenSeq {
  std::vector<int> ids;
  std::string raw;

  bool operator==(const TokenSeq& other) const { return ids == other.ids; }
};

// Lowercased alphanumeric runs; whitespace and punctuation act as separators
// and are dropped.
std::vector<std::string> split_words(std::string_view s);

// Throws ArgumentError when the input produces no tokens or the vocab is
// empty. Out-of-vocabulary words map to unk_id().
TokenSeq tokenize(std::string_view s, const Vocab& vocab);

std::string detokenize(const std::vector<int>& ids, const Vocab& vocab);
inline std::string detokenize(const TokenSeq& t, const Vocab& vocab) {
  return detokenize(t.ids, vocab);
}

// TokenSeq from ids with raw filled in via detokenize.
TokenSeq make_seq(std::vector<int> ids, const Vocab& vocab);

}  // namespace sro
