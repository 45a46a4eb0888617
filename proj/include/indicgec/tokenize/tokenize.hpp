#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "indicgec/corpus/corpus.hpp"

namespace indicgec::tokenize {

enum class Origin { Word, Subword, Grapheme };

// Ordered tokens; no token is empty. Subword tokens hold raw bytes, which may
// be partial UTF-8 sequences.
struct TokenSequence {
  std::vector<std::string> tokens;
  Origin origin = Origin::Word;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Extended grapheme clusters.
TokenSequence graphemes(std::string_view text);

// Whitespace split, then leading and trailing punctuation graphemes are
// detached one per token. Punctuation inside a chunk stays attached
// ("a.b.c" is one token). The language is accepted for API symmetry; the
// rules are script-independent.
TokenSequence word_tokenize(std::string_view text, const corpus::Language& language);
TokenSequence word_tokenize(std::string_view text);

// Tokens made of anything other than punctuation.
std::size_t count_words(const TokenSequence& tokens);

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

// All contiguous n-token windows with multiplicity. Throws on n == 0.
NgramCounts ngrams(const TokenSequence& tokens, std::size_t n);
NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t n);

}  // namespace indicgec::tokenize
