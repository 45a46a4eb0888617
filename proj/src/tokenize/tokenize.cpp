#include "indicgec/tokenize/tokenize.hpp"

#include <unicode/brkiter.h>
#include <unicode/utext.h>

#include <memory>

#include "indicgec/error.hpp"
#include "indicgec/text.hpp"

namespace indicgec::tokenize {

namespace {

// Byte ranges of the grapheme clusters of a UTF-8 string.
std::vector<std::string_view> grapheme_views(std::string_view text) {
  std::vector<std::string_view> out;
  if (text.empty()) return out;

  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<UText, decltype(&utext_close)> ut(
      utext_openUTF8(nullptr, text.data(), static_cast<int64_t>(text.size()), &status),
      &utext_close);
  // Character break iterators are cheap to clone but not thread-safe, so each
  // call gets its own.
  std::unique_ptr<icu::BreakIterator> it(
      icu::BreakIterator::createCharacterInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status)) throw Error("ICU grapheme segmentation unavailable");
  it->setText(ut.get(), status);
  if (U_FAILURE(status)) throw Error("ICU grapheme segmentation failed");

  // Native indices of a UTF-8 UText are byte offsets.
  int32_t start = it->first();
  for (int32_t end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
    out.push_back(text.substr(static_cast<std::size_t>(start),
                              static_cast<std::size_t>(end - start)));
  }
  return out;
}

bool starts_with_punctuation(std::string_view grapheme) {
  const auto cps = text::decode(grapheme);
  return !cps.empty() && text::is_punctuation(cps.front());
}

}  // namespace

TokenSequence graphemes(std::string_view text) {
  TokenSequence seq{{}, Origin::Grapheme};
  for (const auto g : grapheme_views(text)) seq.tokens.emplace_back(g);
  return seq;
}

TokenSequence word_tokenize(std::string_view text, const corpus::Language&) {
  return word_tokenize(text);
}

TokenSequence word_tokenize(std::string_view text) {
  TokenSequence seq{{}, Origin::Word};
  for (const auto chunk : text::split_whitespace(text)) {
    const auto gs = grapheme_views(chunk);
    std::size_t lead = 0;
    while (lead < gs.size() && starts_with_punctuation(gs[lead])) ++lead;
    std::size_t trail = gs.size();
    while (trail > lead && starts_with_punctuation(gs[trail - 1])) --trail;

    for (std::size_t i = 0; i < lead; ++i) seq.tokens.emplace_back(gs[i]);
    if (trail > lead) {
      const auto* begin = gs[lead].data();
      const auto* end = gs[trail - 1].data() + gs[trail - 1].size();
      seq.tokens.emplace_back(begin, end);
    }
    for (std::size_t i = trail; i < gs.size(); ++i) seq.tokens.emplace_back(gs[i]);
  }
  return seq;
}

std::size_t count_words(const TokenSequence& tokens) {
  std::size_t n = 0;
  for (const auto& t : tokens.tokens) {
    if (!text::is_punctuation_only(t)) ++n;
  }
  return n;
}

NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  if (n == 0) throw Error("n-gram order must be at least 1");
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

NgramCounts ngrams(const TokenSequence& tokens, std::size_t n) {
  return ngrams(tokens.tokens, n);
}

}  // namespace indicgec::tokenize
