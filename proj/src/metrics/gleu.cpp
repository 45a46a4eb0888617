#include "indicgec/metrics/gleu.hpp"

#include <algorithm>
#include <cmath>

#include "indicgec/error.hpp"

namespace indicgec::metrics {

GleuCounts& GleuCounts::operator+=(const GleuCounts& other) {
  for (std::size_t n = 0; n < kGleuMaxOrder; ++n) {
    numerator[n] += other.numerator[n];
    denominator[n] += other.denominator[n];
  }
  hypothesis_length += other.hypothesis_length;
  reference_length += other.reference_length;
  return *this;
}

GleuCounts gleu_counts(const tokenize::TokenSequence& source,
                       const tokenize::TokenSequence& hypothesis,
                       const tokenize::TokenSequence& reference) {
  if (reference.empty()) throw Error("GLEU requires a nonempty reference");
  GleuCounts counts;
  counts.hypothesis_length = hypothesis.size();
  counts.reference_length = reference.size();

  for (std::size_t n = 1; n <= kGleuMaxOrder; ++n) {
    const auto hyp = tokenize::ngrams(hypothesis, n);
    if (hyp.empty()) continue;
    const auto ref = tokenize::ngrams(reference, n);
    const auto src = tokenize::ngrams(source, n);

    std::size_t matched = 0;
    std::size_t penalty = 0;
    std::size_t total = 0;
    for (const auto& [gram, h] : hyp) {
      total += h;
      const auto r_it = ref.find(gram);
      const auto s_it = src.find(gram);
      const std::size_t in_ref = std::min(h, r_it == ref.end() ? 0 : r_it->second);
      const std::size_t in_src = std::min(h, s_it == src.end() ? 0 : s_it->second);
      matched += in_ref;
      if (in_src > in_ref) penalty += in_src - in_ref;
    }
    std::size_t numerator = matched > penalty ? matched - penalty : 0;
    std::size_t denominator = total;
    if (numerator == 0) {
      ++numerator;
      ++denominator;
    }
    counts.numerator[n - 1] = numerator;
    counts.denominator[n - 1] = denominator;
  }
  return counts;
}

GleuResult gleu_from_counts(const GleuCounts& counts) {
  GleuResult result;
  if (counts.hypothesis_length == 0) return result;

  double log_sum = 0.0;
  for (std::size_t n = 0; n < kGleuMaxOrder && counts.denominator[n] > 0; ++n) {
    const double p = static_cast<double>(counts.numerator[n]) /
                     static_cast<double>(counts.denominator[n]);
    result.per_n_precision[n] = p;
    ++result.orders;
    if (p <= 0.0) {
      log_sum = -INFINITY;
    } else {
      log_sum += std::log(p);
    }
  }

  const auto hyp = static_cast<double>(counts.hypothesis_length);
  const auto ref = static_cast<double>(counts.reference_length);
  result.brevity_penalty = hyp >= ref ? 1.0 : std::exp(1.0 - ref / hyp);
  if (std::isinf(log_sum)) return result;
  result.score = result.brevity_penalty *
                 std::exp(log_sum / static_cast<double>(result.orders));
  return result;
}

GleuResult gleu_sentence(const tokenize::TokenSequence& source,
                         const tokenize::TokenSequence& hypothesis,
                         const tokenize::TokenSequence& reference) {
  return gleu_from_counts(gleu_counts(source, hypothesis, reference));
}

GleuResult gleu_corpus(std::span<const GleuItem> items) {
  if (items.empty()) throw Error("corpus GLEU of an empty item list");
  GleuCounts total;
  for (const auto& item : items) total += gleu_counts(item.source, item.hypothesis, item.reference);
  return gleu_from_counts(total);
}

}  // namespace indicgec::metrics
