#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "indicgec/tokenize/tokenize.hpp"

namespace indicgec::metrics {

inline constexpr std::size_t kGleuMaxOrder = 4;

// Recorded in every report; scores are only comparable within one variant.
inline constexpr std::string_view kGleuVariant =
    "gleu-gec/source-penalized/single-ref/1-4gram/corpus-summed/add-one-per-sentence";

// Smoothed n-gram statistics of one (source, hypothesis, reference) triple.
// Counts of several triples are summed for corpus-level scoring.
struct GleuCounts {
  std::array<std::size_t, kGleuMaxOrder> numerator{};
  std::array<std::size_t, kGleuMaxOrder> denominator{};
  std::size_t hypothesis_length = 0;
  std::size_t reference_length = 0;

  GleuCounts& operator+=(const GleuCounts& other);
};

struct GleuResult {
  double score = 0.0;  // in [0, 1]
  // Entries at index >= orders are unused and left at 0.
  std::array<double, kGleuMaxOrder> per_n_precision{};
  double brevity_penalty = 0.0;
  // Realizable orders, i.e. n with at least one hypothesis n-gram.
  std::size_t orders = 0;
};

struct GleuItem {
  tokenize::TokenSequence source;
  tokenize::TokenSequence hypothesis;
  tokenize::TokenSequence reference;
};

// Per order n, with hypothesis counts H, reference counts R and source counts S:
//   numerator   = max(0, sum min(H,R) - sum max(0, min(H,S) - min(H,R)))
//   denominator = number of hypothesis n-grams
// A zero numerator with a positive denominator becomes 1/(denominator+1).
// Throws on an empty reference.
GleuCounts gleu_counts(const tokenize::TokenSequence& source,
                       const tokenize::TokenSequence& hypothesis,
                       const tokenize::TokenSequence& reference);

// BP * exp(mean log p_n) over the realizable orders. An empty hypothesis
// yields score 0 with brevity_penalty 0.
GleuResult gleu_from_counts(const GleuCounts& counts);

GleuResult gleu_sentence(const tokenize::TokenSequence& source,
                         const tokenize::TokenSequence& hypothesis,
                         const tokenize::TokenSequence& reference);

// Sums counts over all items before taking ratios. Throws on an empty list.
GleuResult gleu_corpus(std::span<const GleuItem> items);

}  // namespace indicgec::metrics
