#include "indicgec/prompting/correct.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>
#include <vector>

#include <fmt/format.h>

namespace indicgec::prompting {

ProviderError::ProviderError(int status, const std::string& message)
    : Error(message), status_(status) {}

RetryExhaustedError::RetryExhaustedError(int last_status, int attempts,
                                         const std::string& last_error)
    : ProviderError(last_status, fmt::format("gave up after {} attempts; last status {}: {}",
                                             attempts, last_status, last_error)),
      attempts_(attempts) {}

RunFailedError::RunFailedError(std::shared_ptr<const CorpusRunResult> partial, double threshold)
    : Error(fmt::format("{} of {} items failed (fraction {:.4f} exceeds threshold {:.4f})",
                        partial->failures.size(),
                        partial->failures.size() + partial->responses.size(),
                        partial->failure_fraction(), threshold)),
      partial_(std::move(partial)) {}

std::size_t CorpusRunResult::from_cache() const {
  std::size_t n = 0;
  for (const auto& [id, r] : responses) n += r.from_cache ? 1 : 0;
  return n;
}

double CorpusRunResult::failure_fraction() const {
  const auto total = responses.size() + failures.size();
  return total == 0 ? 0.0 : static_cast<double>(failures.size()) / static_cast<double>(total);
}

ModelResponse correct(const PromptBundle& bundle, ChatClient& client, const Cache* cache,
                      const CorrectOptions& options) {
  validate(options.retry);
  const auto key = cache_key(bundle);
  if (cache != nullptr) {
    if (auto hit = cache->load(key)) {
      return ModelResponse{hit->raw_text, hit->normalized_text, 0, true, hit->provider_meta, key};
    }
  }

  std::mt19937_64 rng(options.jitter_seed ^ std::hash<std::string>{}(key));
  ChatOutcome outcome;
  int attempt = 0;
  std::int64_t latency = 0;
  while (true) {
    ++attempt;
    if (options.limiter != nullptr) options.limiter->acquire();
    const auto t0 = std::chrono::steady_clock::now();
    outcome = client.send(bundle);
    latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    if (outcome.ok()) break;
    if (outcome.status == 200) throw ProviderError(200, outcome.error);
    if (!is_retryable(outcome.status)) {
      throw ProviderError(outcome.status,
                          fmt::format("provider {} refused the request: {}",
                                      client.provider_name(), outcome.error));
    }
    if (attempt >= options.retry.max_attempts) {
      throw RetryExhaustedError(outcome.status, attempt, outcome.error);
    }
    options.sleep(backoff_delay(options.retry, attempt, outcome.retry_after, rng));
  }

  // Throws EmptyResponseError with the raw text on refusals and blank replies.
  const auto normalized = normalize_response(outcome.text);
  auto meta = outcome.meta;
  meta["provider"] = client.provider_name();
  meta["attempts"] = std::to_string(attempt);
  if (cache != nullptr) {
    cache->store(key, CacheRecord{canonical_request(bundle), outcome.text, normalized,
                                  utc_timestamp(), meta});
  }
  return ModelResponse{outcome.text, normalized, latency, false, std::move(meta), key};
}

CorpusRunResult correct_corpus(const corpus::Corpus& corpus, const PromptTemplate& tmpl,
                               const std::optional<ExemplarSet>& exemplars, ChatClient& client,
                               const Cache* cache, const CorpusRunOptions& options) {
  if (options.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (!(options.failure_threshold >= 0.0 && options.failure_threshold <= 1.0)) {
    throw ConfigError("failure threshold must be in [0, 1]");
  }
  validate(options.correct.retry);

  // Render everything up front so template problems surface before any request.
  std::vector<PromptBundle> bundles;
  bundles.reserve(corpus.size());
  for (const auto& p : corpus.pairs()) {
    bundles.push_back(render(tmpl, corpus.language(), exemplars, p.source, options.decoding));
  }

  auto result = std::make_shared<CorpusRunResult>();
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const auto i = next.fetch_add(1);
      if (i >= bundles.size()) return;
      const auto& id = corpus.pairs()[i].id;
      std::optional<ModelResponse> response;
      ItemFailure failure;
      try {
        response = correct(bundles[i], client, cache, options.correct);
      } catch (const EmptyResponseError& e) {
        failure = {"empty-response", e.what(), 200, e.raw()};
      } catch (const RetryExhaustedError& e) {
        failure = {"retry-exhausted", e.what(), e.status(), ""};
      } catch (const ProviderError& e) {
        failure = {"provider", e.what(), e.status(), ""};
      } catch (const std::exception& e) {
        failure = {"error", e.what(), 0, ""};
      }
      {
        std::lock_guard lock(mu);
        if (response) {
          result->responses.emplace(id, std::move(*response));
        } else {
          result->failures.emplace(id, std::move(failure));
        }
      }
      if (options.on_item) options.on_item(id, response.has_value());
    }
  };

  const auto n_workers = std::min(options.parallelism, std::max<std::size_t>(bundles.size(), 1));
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  if (result->failure_fraction() > options.failure_threshold) {
    throw RunFailedError(result, options.failure_threshold);
  }
  return std::move(*result);
}

}  // namespace indicgec::prompting
