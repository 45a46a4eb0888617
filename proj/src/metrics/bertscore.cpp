#include "indicgec/metrics/bertscore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "indicgec/error.hpp"

namespace indicgec::metrics {

namespace {

void check_rows(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() == 0) throw Error(std::string("bertscore: empty ") + what + " embeddings");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.row(r).squaredNorm() == 0.0) {
      throw Error(std::string("bertscore: zero-norm ") + what + " row " + std::to_string(r));
    }
  }
}

// cos(a, b) = a.b / sqrt(|a|^2 |b|^2). Symmetric in its arguments bit for
// bit, and exactly 1 for a == b.
double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
}

// Weighted mean over rows of `from` of the best cosine against `to`.
double greedy_side(const Eigen::MatrixXd& from, const Eigen::MatrixXd& to,
                   const std::vector<double>* weights) {
  double numerator = 0.0;
  double denominator = 0.0;
  for (Eigen::Index i = 0; i < from.rows(); ++i) {
    const Eigen::VectorXd a = from.row(i).transpose();
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < to.rows(); ++j) {
      best = std::max(best, cosine(a, to.row(j).transpose()));
    }
    const double w = weights ? (*weights)[static_cast<std::size_t>(i)] : 1.0;
    numerator += w * best;
    denominator += w;
  }
  if (denominator <= 0.0) throw Error("bertscore: idf weights sum to zero");
  return numerator / denominator;
}

}  // namespace

BertScoreResult bertscore(const Eigen::MatrixXd& hypothesis, const Eigen::MatrixXd& reference,
                          const std::optional<IdfWeights>& idf) {
  check_rows(hypothesis, "hypothesis");
  check_rows(reference, "reference");
  if (hypothesis.cols() != reference.cols()) {
    throw Error("bertscore: embedding dimensions differ (" + std::to_string(hypothesis.cols()) +
                " vs " + std::to_string(reference.cols()) + ")");
  }
  if (idf && (idf->hypothesis.size() != static_cast<std::size_t>(hypothesis.rows()) ||
              idf->reference.size() != static_cast<std::size_t>(reference.rows()))) {
    throw Error("bertscore: idf weight counts do not match the token counts");
  }

  BertScoreResult r;
  r.precision = greedy_side(hypothesis, reference, idf ? &idf->hypothesis : nullptr);
  r.recall = greedy_side(reference, hypothesis, idf ? &idf->reference : nullptr);
  const double sum = r.precision + r.recall;
  r.f1 = sum > 0.0 ? 2.0 * r.precision * r.recall / sum : 0.0;
  return r;
}

}  // namespace indicgec::metrics
