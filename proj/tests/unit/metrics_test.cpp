#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "indicgec/error.hpp"
#include "indicgec/metrics/bertscore.hpp"
#include "indicgec/metrics/compliance.hpp"
#include "indicgec/metrics/edits.hpp"
#include "indicgec/metrics/gleu.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace indicgec;
using namespace indicgec::metrics;
using tokenize::Origin;
using tokenize::TokenSequence;
using Tokens = std::vector<std::string>;

namespace {

TokenSequence seq(Tokens t) { return TokenSequence{std::move(t), Origin::Word}; }

TokenSequence words(std::string_view s) { return tokenize::word_tokenize(s); }

}  // namespace

// ---- GLEU ------------------------------------------------------------------

TEST(GleuTest, IdentityScoresOne) {
  const auto s = words("the cat sat on the mat");
  EXPECT_EQ(gleu_sentence(s, s, s).score, 1.0);
}

TEST(GleuTest, PerfectCorrectionScoresOne) {
  const auto s = words("the cat sit on mat");
  const auto r = words("the cat sat on the mat");
  EXPECT_EQ(gleu_sentence(s, r, r).score, 1.0);
}

TEST(GleuTest, HandExampleMatchesBruteForceOracle) {
  // Frozen from the brute-force oracle: (1/3 * 1/3 * 1/2)^(1/3).
  const auto r = gleu_sentence(words("the cat sat"), words("the cat sat"), words("the cat sits"));
  EXPECT_NEAR(r.score, 0.38157141418444396, 1e-12);
  EXPECT_EQ(r.orders, 3u);
  EXPECT_DOUBLE_EQ(r.per_n_precision[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_n_precision[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_n_precision[2], 1.0 / 2.0);
  EXPECT_EQ(r.brevity_penalty, 1.0);
}

TEST(GleuTest, BrevityPenalty) {
  const auto r = gleu_sentence(words("a b"), words("a b"), words("a b c d"));
  EXPECT_DOUBLE_EQ(r.brevity_penalty, std::exp(1.0 - 4.0 / 2.0));
}

TEST(GleuTest, EmptyHypothesisSentinel) {
  const auto r = gleu_sentence(words("a"), seq({}), words("a"));
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.brevity_penalty, 0.0);
  EXPECT_THROW(gleu_sentence(words("a"), words("a"), seq({})), Error);
}

TEST(GleuTest, MatchesOracleOnRandomTriples) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 300; ++i) {
    const auto s = testutil::random_tokens(rng, 1, 15, 8);
    const auto h = testutil::random_tokens(rng, 1, 15, 8);
    const auto r = testutil::random_tokens(rng, 1, 15, 8);
    const double got = gleu_sentence(seq(s), seq(h), seq(r)).score;
    EXPECT_NEAR(got, oracle::gleu_sentence(s, h, r), 1e-9);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(GleuCorpusTest, SingleItemEqualsSentence) {
  const GleuItem item{words("he go home"), words("he goes home"), words("he goes home .")};
  EXPECT_EQ(gleu_corpus(std::span(&item, 1)).score,
            gleu_sentence(item.source, item.hypothesis, item.reference).score);
}

TEST(GleuCorpusTest, DuplicatesKeepTheScore) {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 50; ++i) {
    const GleuItem item{seq(testutil::random_tokens(rng, 1, 15, 8)),
                        seq(testutil::random_tokens(rng, 1, 15, 8)),
                        seq(testutil::random_tokens(rng, 1, 15, 8))};
    const double single = gleu_sentence(item.source, item.hypothesis, item.reference).score;
    for (const std::size_t k : {1, 2, 5, 10}) {
      const std::vector<GleuItem> copies(k, item);
      EXPECT_NEAR(gleu_corpus(copies).score, single, 1e-12);
    }
  }
}

TEST(GleuCorpusTest, TwoItemsMatchOracle) {
  const std::vector<GleuItem> items = {
      {words("the cat sat"), words("the cat sat"), words("the cat sits")},
      {words("a dog run fast today"), words("a dog runs fast today"),
       words("a dog runs fast today .")},
  };
  EXPECT_NEAR(gleu_corpus(items).score, 0.71403416682112797, 1e-12);
}

TEST(GleuCorpusTest, EmptyListIsAnError) {
  EXPECT_THROW(gleu_corpus(std::span<const GleuItem>{}), Error);
}

// ---- edit extraction ---------------------------------------------------------

TEST(ExtractEditsTest, IdenticalSequencesHaveNoEdits) {
  const auto e = extract_edits(seq({"a", "b"}), seq({"a", "b"}));
  EXPECT_TRUE(e.edits.empty());
  EXPECT_EQ(e.cost, 0.0);
}

TEST(ExtractEditsTest, Substitution) {
  // The only minimal alignment is M S M (exhaustive enumeration).
  const auto e = extract_edits(seq({"a", "b", "c"}), seq({"a", "x", "c"}));
  ASSERT_EQ(e.edits.size(), 1u);
  EXPECT_EQ(e.edits[0], (EditSpan{1, 2, {"x"}}));
  EXPECT_DOUBLE_EQ(e.cost, 1.1);
}

TEST(ExtractEditsTest, Insertion) {
  // The only minimal alignment is M I M.
  const auto e = extract_edits(seq({"a", "c"}), seq({"a", "b", "c"}));
  ASSERT_EQ(e.edits.size(), 1u);
  EXPECT_EQ(e.edits[0], (EditSpan{1, 1, {"b"}}));
}

TEST(ExtractEditsTest, EarlierPositionWinsTies) {
  const auto del = extract_edits(seq({"a", "a"}), seq({"a"}));
  ASSERT_EQ(del.edits.size(), 1u);
  EXPECT_EQ(del.edits[0], (EditSpan{0, 1, {}}));
  const auto ins = extract_edits(seq({"a"}), seq({"a", "a"}));
  ASSERT_EQ(ins.edits.size(), 1u);
  EXPECT_EQ(ins.edits[0], (EditSpan{0, 0, {"a"}}));
}

TEST(ExtractEditsTest, SimilarWordsPreferredForSubstitution) {
  // "kitab" -> "kitaben" is a cheaper substitution than "do" -> "kitaben".
  EXPECT_LT(substitution_cost("kitab", "kitaben"), substitution_cost("do", "kitaben"));
  const auto e = extract_edits(seq({"do", "kitab", "hai"}), seq({"do", "kitaben", "hain"}));
  ASSERT_EQ(e.edits.size(), 1u);
  EXPECT_EQ(e.edits[0], (EditSpan{1, 3, {"kitaben", "hain"}}));
}

TEST(ExtractEditsTest, ContiguousOperationsMerge) {
  const auto e = extract_edits(seq({"a", "b", "c", "d"}), seq({"a", "x", "y", "z", "d"}));
  ASSERT_EQ(e.edits.size(), 1u);
  EXPECT_EQ(e.edits[0].src_start, 1u);
  EXPECT_EQ(e.edits[0].src_end, 3u);
  EXPECT_EQ(e.edits[0].replacement, (Tokens{"x", "y", "z"}));
}

TEST(ExtractEditsTest, PropertyApplyAndCost) {
  std::mt19937_64 rng(107);
  for (int i = 0; i < 1000; ++i) {
    const auto s = testutil::random_tokens(rng, 0, 12, 5);
    const auto t = testutil::random_tokens(rng, 0, 12, 5);
    const auto e = extract_edits(seq(s), seq(t));
    ASSERT_EQ(apply_edits(s, e), t);
    ASSERT_NEAR(e.cost, oracle::min_alignment_cost(s, t), 1e-9);
    for (std::size_t k = 1; k < e.edits.size(); ++k) {
      ASSERT_LT(e.edits[k - 1].src_end, e.edits[k].src_start);
    }
  }
}

TEST(ApplyEditsTest, RejectsBadSpans) {
  EditSet bad{2, {EditSpan{1, 3, {}}}, 0.0};
  EXPECT_THROW(apply_edits({"a", "b"}, bad), Error);
  EditSet overlap{3, {EditSpan{0, 2, {"x"}}, EditSpan{1, 2, {"y"}}}, 0.0};
  EXPECT_THROW(apply_edits({"a", "b", "c"}, overlap), Error);
}

// ---- F0.5 ------------------------------------------------------------------------

TEST(FBetaTest, BothEmptyIsPerfect) {
  const EditSet none{3, {}, 0.0};
  const auto r = f_beta(none, none);
  EXPECT_EQ(r.tp + r.fp + r.fn, 0u);
  EXPECT_EQ(r.f_beta, 1.0);
}

TEST(FBetaTest, ClosedForms) {
  const auto a = f_beta_from_counts(1, 1, 1, 0.5);
  EXPECT_EQ(a.precision, 0.5);
  EXPECT_EQ(a.recall, 0.5);
  EXPECT_EQ(a.f_beta, 0.5);
  const auto b = f_beta_from_counts(2, 0, 1, 0.5);
  EXPECT_EQ(b.precision, 1.0);
  EXPECT_NEAR(b.recall, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.f_beta, 10.0 / 11.0, 1e-12);
}

TEST(FBetaTest, Conventions) {
  // Edits proposed where none were needed, and vice versa.
  EXPECT_EQ(f_beta_from_counts(0, 2, 0).f_beta, 0.0);
  EXPECT_EQ(f_beta_from_counts(0, 0, 2).f_beta, 0.0);
  EXPECT_THROW(f_beta_from_counts(1, 0, 0, 0.0), Error);
}

TEST(FBetaTest, CountsExactMatchesOnly) {
  const EditSet hyp{4, {EditSpan{0, 1, {"x"}}, EditSpan{2, 3, {"y"}}}, 0.0};
  const EditSet gold{4, {EditSpan{0, 1, {"x"}}, EditSpan{2, 3, {"z"}}, EditSpan{4, 4, {"."}}}, 0.0};
  const auto r = f_beta(hyp, gold);
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 2u);
}

TEST(FBetaTest, MismatchedSourcesRejected) {
  EXPECT_THROW(f_beta(EditSet{3, {}, 0.0}, EditSet{4, {}, 0.0}), Error);
}

TEST(FBetaTest, SwappingSidesSwapsPrecisionAndRecall) {
  std::mt19937_64 rng(109);
  for (int i = 0; i < 200; ++i) {
    const auto s = testutil::random_tokens(rng, 1, 8, 4);
    const auto a = extract_edits(seq(s), seq(testutil::random_tokens(rng, 1, 8, 4)));
    const auto b = extract_edits(seq(s), seq(testutil::random_tokens(rng, 1, 8, 4)));
    const auto ab = f_beta(a, b);
    const auto ba = f_beta(b, a);
    EXPECT_EQ(ab.precision, ba.recall);
    EXPECT_EQ(ab.recall, ba.precision);
  }
}

// ---- BERTScore ---------------------------------------------------------------

TEST(BertScoreTest, IdenticalMatricesScoreOne) {
  Eigen::MatrixXd m(3, 4);
  m << 0.3, -1.2, 4.0, 0.01, 2.0, 2.0, 2.0, 2.0, -0.7, 0.1, 0.0, 9.0;
  const auto r = bertscore(m, m);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
}

TEST(BertScoreTest, OrthogonalRowsScoreZero) {
  Eigen::MatrixXd h(2, 4), r(2, 4);
  h << 1, 0, 0, 0, 0, 1, 0, 0;
  r << 0, 0, 1, 0, 0, 0, 0, 1;
  const auto s = bertscore(h, r);
  EXPECT_EQ(s.precision, 0.0);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.f1, 0.0);
}

TEST(BertScoreTest, TwoByTwoExample) {
  const double h = std::sqrt(0.5);
  Eigen::MatrixXd hyp(2, 2), ref(2, 2);
  hyp << 1, 0, 0, 1;
  ref << 1, 0, h, h;
  // Cosine matrix [[1, h], [0, h]]: every row and column maximum is 1 or h.
  const double expected = (1.0 + h) / 2.0;
  const auto s = bertscore(hyp, ref);
  EXPECT_NEAR(s.precision, expected, 1e-12);
  EXPECT_NEAR(s.recall, expected, 1e-12);
  EXPECT_NEAR(s.f1, expected, 1e-12);
}

TEST(BertScoreTest, IdfWeighting) {
  Eigen::MatrixXd hyp(2, 2), ref(1, 2);
  hyp << 1, 0, 0, 1;
  ref << 1, 0;
  const auto s = bertscore(hyp, ref, IdfWeights{{3.0, 1.0}, {1.0}});
  EXPECT_DOUBLE_EQ(s.precision, 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(s.recall, 1.0);
}

TEST(BertScoreTest, Errors) {
  Eigen::MatrixXd a(1, 2), b(1, 3), z(1, 2), empty(0, 2);
  a << 1, 0;
  b << 1, 0, 0;
  z << 0, 0;
  EXPECT_THROW(bertscore(a, b), Error);
  EXPECT_THROW(bertscore(a, z), Error);
  EXPECT_THROW(bertscore(empty, a), Error);
}

TEST(BertScoreTest, Duality) {
  std::mt19937_64 rng(113);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const auto rows_h = 1 + static_cast<Eigen::Index>(rng() % 6);
    const auto rows_r = 1 + static_cast<Eigen::Index>(rng() % 6);
    Eigen::MatrixXd h(rows_h, 5), r(rows_r, 5);
    for (auto* m : {&h, &r}) {
      for (Eigen::Index x = 0; x < m->size(); ++x) m->data()[x] = g(rng);
    }
    EXPECT_NEAR(bertscore(h, r).precision, bertscore(r, h).recall, 1e-12);
  }
}

// ---- identity compliance ---------------------------------------------------------

namespace {

corpus::Corpus identity_corpus(std::size_t n) {
  const auto lang = *corpus::preset_language("tam");
  std::vector<corpus::SentencePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string s = "sentence " + std::to_string(i);
    pairs.push_back({"test-" + std::to_string(i + 1), s, s, lang});
  }
  return corpus::Corpus(lang, corpus::Split::Test, pairs);
}

}  // namespace

TEST(ComplianceTest, AllUnchanged) {
  const auto c = identity_corpus(4);
  std::map<std::string, std::string> out;
  for (const auto& p : c.pairs()) out[p.id] = p.source + " ";
  EXPECT_EQ(identity_compliance(c, out).rate, 1.0);
}

TEST(ComplianceTest, HalfChanged) {
  const auto c = identity_corpus(4);
  std::map<std::string, std::string> out;
  for (const auto& p : c.pairs()) out[p.id] = p.source;
  out["test-1"] = "edited";
  out["test-2"] = "edited";
  const auto r = identity_compliance(c, out);
  EXPECT_EQ(r.rate, 0.5);
  EXPECT_EQ(r.n_unchanged, 2u);
}

TEST(ComplianceTest, EmptySubsetIsVacuous) {
  const auto r = identity_compliance(identity_corpus(0), {});
  EXPECT_EQ(r.rate, 1.0);
  EXPECT_TRUE(r.vacuous);
}

TEST(ComplianceTest, MissingIdIsAnError) {
  EXPECT_THROW(identity_compliance(identity_corpus(2), {{"test-1", "sentence 0"}}), Error);
}
