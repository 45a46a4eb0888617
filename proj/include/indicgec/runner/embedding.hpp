#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "indicgec/prompting/client.hpp"
#include "indicgec/prompting/retry.hpp"
#include "indicgec/runner/config.hpp"

namespace indicgec::runner {

// Maps tokens to one embedding row each.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Eigen::MatrixXd embed(const std::vector<std::string>& tokens) = 0;
  // Printed in every report next to BERTScore numbers.
  virtual std::string name() const = 0;
};

// Offline stand-in: counts hashed codepoint n-grams of "<token>" into a
// fixed number of buckets (FNV-1a). Entries are non-negative and every token
// yields at least one n-gram, so rows are never zero.
class CharNgramEmbedder : public EmbeddingProvider {
 public:
  CharNgramEmbedder(std::size_t dim, std::size_t n);
  Eigen::MatrixXd embed(const std::vector<std::string>& tokens) override;
  std::string name() const override;

 private:
  std::size_t dim_;
  std::size_t n_;
};

// OpenAI-style POST {base}/embeddings with {"model", "input": [...]}.
// Token vectors are memoized for the lifetime of the object.
class HttpEmbedder : public EmbeddingProvider {
 public:
  HttpEmbedder(std::string base_url, std::string model, std::string credential,
               prompting::RetryPolicy retry = {}, prompting::Sleeper sleep = prompting::real_sleep);
  Eigen::MatrixXd embed(const std::vector<std::string>& tokens) override;
  std::string name() const override;

 private:
  prompting::BaseUrl url_;
  std::string model_;
  std::string credential_;
  prompting::RetryPolicy retry_;
  prompting::Sleeper sleep_;
  std::mutex mu_;
  std::unordered_map<std::string, Eigen::VectorXd> memo_;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Reads credentials from the environment when the provider needs them.
std::unique_ptr<EmbeddingProvider> make_embedder(const EmbeddingConfig& config);

}  // namespace indicgec::runner
