#include "indicgec/metrics/edits.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "indicgec/error.hpp"
#include "indicgec/text.hpp"

namespace indicgec::metrics {

namespace {

// Costs are sums of at most a few dozen terms of the form k/10 and Dice
// ratios; ties are decided with this slack.
constexpr double kTieEpsilon = 1e-9;

enum class Op { Match, Substitute, Delete, Insert };

bool same_cost(double a, double b) { return std::fabs(a - b) <= kTieEpsilon; }

}  // namespace

double char_overlap(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  std::map<char32_t, std::size_t> counts;
  const auto ca = text::decode(a);
  const auto cb = text::decode(b);
  for (const char32_t c : ca) ++counts[c];
  std::size_t common = 0;
  for (const char32_t c : cb) {
    auto it = counts.find(c);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(ca.size() + cb.size());
}

double substitution_cost(std::string_view a, std::string_view b) {
  return 1.0 + (1.0 - char_overlap(a, b)) / 10.0;
}

EditSet extract_edits(const tokenize::TokenSequence& source,
                      const tokenize::TokenSequence& target) {
  const std::size_t n = source.size();
  const std::size_t m = target.size();
  const std::size_t width = m + 1;

  std::vector<double> dist((n + 1) * width, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return dist[i * width + j]; };
  auto diagonal_cost = [&](std::size_t i, std::size_t j) {
    return source[i] == target[j] ? 0.0 : substitution_cost(source[i], target[j]);
  };

  for (std::size_t i = 1; i <= n; ++i) at(i, 0) = static_cast<double>(i);
  for (std::size_t j = 1; j <= m; ++j) at(0, j) = static_cast<double>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::min({at(i - 1, j - 1) + diagonal_cost(i - 1, j - 1), at(i - 1, j) + 1.0,
                           at(i, j - 1) + 1.0});
    }
  }

  // Walking back from the end and preferring the diagonal pushes deletions
  // and insertions toward the start of the sentence.
  std::vector<Op> ops;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && same_cost(at(i, j), at(i - 1, j - 1) + diagonal_cost(i - 1, j - 1))) {
      ops.push_back(source[i - 1] == target[j - 1] ? Op::Match : Op::Substitute);
      --i;
      --j;
    } else if (i > 0 && same_cost(at(i, j), at(i - 1, j) + 1.0)) {
      ops.push_back(Op::Delete);
      --i;
    } else {
      ops.push_back(Op::Insert);
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());

  EditSet result;
  result.source_length = n;
  std::size_t si = 0;
  std::size_t ti = 0;
  EditSpan* open = nullptr;
  for (const Op op : ops) {
    if (op == Op::Match) {
      open = nullptr;
      ++si;
      ++ti;
      continue;
    }
    if (open == nullptr) {
      result.edits.push_back(EditSpan{si, si, {}});
      open = &result.edits.back();
    }
    switch (op) {
      case Op::Substitute:
        result.cost += substitution_cost(source[si], target[ti]);
        open->replacement.push_back(target[ti]);
        ++si;
        ++ti;
        break;
      case Op::Delete:
        result.cost += 1.0;
        ++si;
        break;
      case Op::Insert:
        result.cost += 1.0;
        open->replacement.push_back(target[ti]);
        ++ti;
        break;
      case Op::Match:
        break;
    }
    open->src_end = si;
  }
  return result;
}

std::vector<std::string> apply_edits(const std::vector<std::string>& source,
                                     const EditSet& edits) {
  std::vector<std::string> out = source;
  std::size_t limit = source.size();
  for (auto it = edits.edits.rbegin(); it != edits.edits.rend(); ++it) {
    if (it->src_start > it->src_end || it->src_end > limit) {
      throw Error("edit spans are out of range or overlapping");
    }
    if (it->src_start == it->src_end && it->replacement.empty()) {
      throw Error("empty edit span");
    }
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(it->src_start),
              out.begin() + static_cast<std::ptrdiff_t>(it->src_end));
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(it->src_start), it->replacement.begin(),
               it->replacement.end());
    limit = it->src_start;
  }
  return out;
}

FScoreResult f_beta_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, double beta) {
  if (!(beta > 0.0)) throw Error("beta must be positive");
  FScoreResult r{tp, fp, fn, 1.0, 1.0, 1.0, beta};
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (tp + fp == 0 && tp + fn == 0) return r;
  if (r.precision + r.recall == 0.0) {
    r.f_beta = 0.0;
    return r;
  }
  const double b2 = beta * beta;
  r.f_beta = (1.0 + b2) * r.precision * r.recall / (b2 * r.precision + r.recall);
  return r;
}

FScoreResult f_beta(const EditSet& hypothesis_edits, const EditSet& gold_edits, double beta) {
  if (hypothesis_edits.source_length != gold_edits.source_length) {
    throw Error("edit sets refer to sources of different length (" +
                std::to_string(hypothesis_edits.source_length) + " vs " +
                std::to_string(gold_edits.source_length) + ")");
  }
  std::vector<EditSpan> hyp = hypothesis_edits.edits;
  std::vector<EditSpan> gold = gold_edits.edits;
  std::sort(hyp.begin(), hyp.end());
  std::sort(gold.begin(), gold.end());
  std::vector<EditSpan> common;
  std::set_intersection(hyp.begin(), hyp.end(), gold.begin(), gold.end(),
                        std::back_inserter(common));
  const std::size_t tp = common.size();
  return f_beta_from_counts(tp, hyp.size() - tp, gold.size() - tp, beta);
}

}  // namespace indicgec::metrics
