#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "indicgec/corpus/corpus.hpp"
#include "indicgec/error.hpp"
#include "indicgec/prompting/cache.hpp"
#include "indicgec/prompting/client.hpp"
#include "indicgec/prompting/prompt.hpp"
#include "indicgec/prompting/retry.hpp"

namespace indicgec::prompting {

struct ModelResponse {
  std::string raw_text;
  std::string normalized_text;
  std::int64_t latency_ms = 0;
  bool from_cache = false;
  std::map<std::string, std::string> provider_meta;
  std::string cache_key;
};

// A provider answered with a status that retrying cannot fix (400, 401, ...),
// or with a body that could not be interpreted.
class ProviderError : public Error {
 public:
  ProviderError(int status, const std::string& message);
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class RetryExhaustedError : public ProviderError {
 public:
  RetryExhaustedError(int last_status, int attempts, const std::string& last_error);
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

struct CorrectOptions {
  RetryPolicy retry;
  Sleeper sleep = real_sleep;
  // Shared across workers when set; not owned.
  RateLimiter* limiter = nullptr;
  // Seeds backoff jitter only; results never depend on it.
  std::uint64_t jitter_seed = 0;
};

// Cache hit: returns the stored response with from_cache set. Miss: sends
// under the retry policy, normalizes, stores, returns. `cache` may be null.
ModelResponse correct(const PromptBundle& bundle, ChatClient& client, const Cache* cache,
                      const CorrectOptions& options = {});

struct ItemFailure {
  std::string kind;  // "empty-response", "retry-exhausted", "provider", "error"
  std::string message;
  int status = 0;
  std::string raw_text;
};

struct CorpusRunOptions {
  std::size_t parallelism = 1;
  // Largest tolerated fraction of failed items; 0 means any failure fails the run.
  double failure_threshold = 0.0;
  CorrectOptions correct;
  DecodingParams decoding;
  // Called after each item, possibly from worker threads.
  std::function<void(const std::string& id, bool ok)> on_item;
};

struct CorpusRunResult {
  std::map<std::string, ModelResponse> responses;
  std::map<std::string, ItemFailure> failures;

  std::size_t from_cache() const;
  double failure_fraction() const;
};

class RunFailedError : public Error {
 public:
  explicit RunFailedError(std::shared_ptr<const CorpusRunResult> partial, double threshold);
  const CorpusRunResult& partial() const noexcept { return *partial_; }

 private:
  std::shared_ptr<const CorpusRunResult> partial_;
};

// Corrects every pair with at most `parallelism` requests in flight. Per-item
// errors are collected; the call throws RunFailedError (carrying everything
// finished so far) only when the failure fraction exceeds the threshold.
// Finished items are cached as they complete, so a rerun resumes.
CorpusRunResult correct_corpus(const corpus::Corpus& corpus, const PromptTemplate& tmpl,
                               const std::optional<ExemplarSet>& exemplars, ChatClient& client,
                               const Cache* cache, const CorpusRunOptions& options);

}  // namespace indicgec::prompting
