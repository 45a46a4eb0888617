#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "indicgec/tokenize/tokenize.hpp"

namespace indicgec::metrics {

// Replace source tokens [src_start, src_end) with `replacement`. Equal bounds
// mean a pure insertion; an empty replacement a pure deletion.
struct EditSpan {
  std::size_t src_start = 0;
  std::size_t src_end = 0;
  std::vector<std::string> replacement;

  friend bool operator==(const EditSpan&, const EditSpan&) = default;
  friend auto operator<=>(const EditSpan&, const EditSpan&) = default;
};

// Non-overlapping edits sorted by (src_start, src_end).
struct EditSet {
  std::size_t source_length = 0;
  std::vector<EditSpan> edits;
  // Alignment cost of the path the edits were read from.
  double cost = 0.0;
};

// Dice coefficient over codepoint multisets, in [0, 1].
double char_overlap(std::string_view a, std::string_view b);

// 1 + (1 - char_overlap) / 10: always more than a match and less than a
// deletion plus an insertion.
double substitution_cost(std::string_view a, std::string_view b);

// Minimal-cost alignment (match 0, insertion 1, deletion 1, substitution as
// above); contiguous non-match operations form one edit. Ties prefer a
// substitution over delete+insert and the earliest source position.
EditSet extract_edits(const tokenize::TokenSequence& source,
                      const tokenize::TokenSequence& target);

// Applies edits right to left. Throws on spans that are out of range or
// overlapping.
std::vector<std::string> apply_edits(const std::vector<std::string>& source,
                                     const EditSet& edits);

struct FScoreResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f_beta = 1.0;
  double beta = 0.5;
};

// Precision is 1 when nothing was proposed, recall is 1 when nothing was
// needed; both empty scores 1.
FScoreResult f_beta_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                double beta = 0.5);

// Exact matching on (span, replacement). Throws when the sets describe
// different source lengths or beta <= 0.
FScoreResult f_beta(const EditSet& hypothesis_edits, const EditSet& gold_edits,
                    double beta = 0.5);

}  // namespace indicgec::metrics
