#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "indicgec/corpus/corpus.hpp"
#include "indicgec/tokenize/tokenize.hpp"

namespace indicgec::tokenize {

enum class TokenizerKind { ByteBpe, WordPerToken };

using TokenId = std::int64_t;
// A merge rule joins two adjacent byte strings; its rank is its list position.
using MergeRule = std::pair<std::string, std::string>;

// A loadable subword tokenizer. Keys of `vocab` and both sides of every merge
// are raw byte strings.
struct TokenizerSpec {
  std::string name;
  TokenizerKind kind = TokenizerKind::ByteBpe;
  std::unordered_map<std::string, TokenId> vocab;
  std::vector<MergeRule> merges;
  std::set<std::string> special_tokens;
};

// Throws DataError when a merge result is missing from the vocab.
void validate(const TokenizerSpec& spec);

// JSON document: {"name", "kind": "ByteBpe"|"WordPerToken",
// "vocab": {base64(bytes): id}, "merges": [[base64, base64], ...],
// "special_tokens": [utf8, ...]}.
TokenizerSpec load_tokenizer_spec(const std::filesystem::path& path);
TokenizerSpec parse_tokenizer_spec(std::string_view json_text);
std::string dump_tokenizer_spec(const TokenizerSpec& spec);

// Precompiled merge ranks for repeated encoding with one spec.
class BpeEncoder {
 public:
  explicit BpeEncoder(const TokenizerSpec& spec);

  TokenSequence encode(std::string_view text) const;
  std::vector<TokenId> encode_ids(std::string_view text) const;
  const TokenizerSpec& spec() const noexcept { return *spec_; }

 private:
  struct PairHash {
    std::size_t operator()(const MergeRule& p) const noexcept;
  };

  // Appends the merged byte strings of one pre-token.
  void merge_piece(std::string_view piece, std::vector<std::string>& out) const;
  std::vector<std::string> encode_bytes(std::string_view text) const;

  const TokenizerSpec* spec_;
  std::unordered_map<MergeRule, std::size_t, PairHash> ranks_;
};

// Whitespace chunks with any preceding whitespace attached to the chunk that
// follows it; trailing whitespace forms its own piece. Concatenation of the
// pieces is the input.
std::vector<std::string_view> pretokenize(std::string_view text);

// Requires kind == ByteBpe. Throws DataError naming the bytes of any merged
// token that is not in the vocab.
TokenSequence bpe_encode(const TokenizerSpec& spec, std::string_view text);

enum class Side { Source, Reference };

struct FertilityReport {
  corpus::Language language;
  std::string tokenizer_name;
  std::size_t n_words = 0;
  std::size_t n_subword_tokens = 0;
  double fertility = 0.0;  // n_subword_tokens / n_words
};

// Words are word_tokenize tokens that are not punctuation-only. Subword
// tokens come from bpe_encode over the full text; a WordPerToken spec counts
// one token per word.
FertilityReport fertility(const TokenizerSpec& spec, const corpus::Corpus& corpus, Side side);

}  // namespace indicgec::tokenize
