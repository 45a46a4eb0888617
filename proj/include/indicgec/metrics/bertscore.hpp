#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace indicgec::metrics {

struct BertScoreResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct IdfWeights {
  std::vector<double> hypothesis;  // one per hypothesis row
  std::vector<double> reference;   // one per reference row
};

// Greedy cosine matching between token embeddings (one row per token).
// Recall averages each reference row's best match, precision each
// hypothesis row's; no baseline rescaling. Throws on empty matrices,
// mismatched widths and zero rows.
BertScoreResult bertscore(const Eigen::MatrixXd& hypothesis, const Eigen::MatrixXd& reference,
                          const std::optional<IdfWeights>& idf = std::nullopt);

}  // namespace indicgec::metrics
