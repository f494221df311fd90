#include "sro/text.hpp"

#include <algorithm>
#include <cctype>

namespace sro {

namespace {
const std::string kUnk = "<unk>";
const std::string kBos = "<bos>";
const std::string kEos = "<eos>";
const std::string kSep = "<sep>";
}  // namespace

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  Vocab v;
  v.tokens_ = std::move(tokens);
  v.index_.reserve(v.tokens_.size());
  for (int i = 0; i < static_cast<int>(v.tokens_.size()); ++i) {
    v.index_.emplace(v.tokens_[i], i);
  }
  return v;
}

Vocab Vocab::from_ordered_tokens(std::vector<std::string> tokens) {
  Vocab v;
  v.tokens_ = std::move(tokens);
  v.index_.reserve(v.tokens_.size());
  for (int i = 0; i < static_cast<int>(v.tokens_.size()); ++i) {
    auto [it, inserted] = v.index_.emplace(v.tokens_[i], i);
    if (!inserted) throw SchemaError("Vocab: duplicate token '" + v.tokens_[i] + "'");
  }
  return v;
}

Vocab Vocab::identity(int n_base) {
  if (n_base <= 0) throw ArgumentError("Vocab::identity: n_base must be positive");
  Vocab v;
  v.tokens_.reserve(static_cast<std::size_t>(n_base));
  for (int i = 0; i < n_base; ++i) {
    v.tokens_.push_back("w" + std::to_string(i));
    v.index_.emplace(v.tokens_.back(), i);
  }
  return v;
}

int Vocab::id_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? unk_id() : it->second;
}

bool Vocab::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

const std::string& Vocab::token_of(int id) const {
  if (id < 0 || id >= total_size()) throw ArgumentError("Vocab::token_of: id out of range");
  if (id < n_base()) return tokens_[static_cast<std::size_t>(id)];
  if (id == unk_id()) return kUnk;
  if (id == bos_id()) return kBos;
  if (id == eos_id()) return kEos;
  return kSep;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

TokenSeq tokenize(std::string_view s, const Vocab& vocab) {
  if (vocab.n_base() == 0) throw ArgumentError("tokenize: empty vocabulary");
  auto words = split_words(s);
  if (words.empty()) throw ArgumentError("tokenize: input has no tokens");
  TokenSeq t;
  t.raw.assign(s.begin(), s.end());
  t.ids.reserve(words.size());
  for (const auto& w : words) t.ids.push_back(vocab.id_of(w));
  return t;
}

std::string detokenize(const std::vector<int>& ids, const Vocab& vocab) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += vocab.token_of(ids[i]);
  }
  return out;
}

TokenSeq make_seq(std::vector<int> ids, const Vocab& vocab) {
  TokenSeq t;
  t.raw = detokenize(ids, vocab);
  t.ids = std::move(ids);
  return t;
}

}  // namespace sro
