#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <random>

namespace indicgec::prompting {

using Millis = std::chrono::milliseconds;
// Injected so tests can run retry loops without real waiting.
using Sleeper = std::function<void(Millis)>;

void real_sleep(Millis d);

struct RetryPolicy {
  int max_attempts = 5;
  Millis initial_backoff{500};
  double multiplier = 2.0;
  Millis max_backoff{30000};
  // Each delay is scaled by a uniform factor in [1 - jitter, 1 + jitter].
  double jitter = 0.2;
  bool honor_retry_after = true;
};

// Throws ConfigError on nonsensical values (max_attempts < 1, negative
// durations, multiplier < 1, jitter outside [0, 1]).
void validate(const RetryPolicy& policy);

// 429, 408 and 5xx are transient; status 0 stands for a transport failure.
bool is_retryable(int status);

// Delay before attempt `attempt + 1`, given that `attempt` (1-based) failed.
// A server-provided Retry-After wins when it is longer.
Millis backoff_delay(const RetryPolicy& policy, int attempt, std::optional<Millis> retry_after,
                     std::mt19937_64& rng);

// Spaces request starts at least 60/rpm seconds apart across all threads.
// rpm == 0 disables limiting.
class RateLimiter {
 public:
  explicit RateLimiter(std::size_t rpm, Sleeper sleep = real_sleep);

  // Blocks until the caller may start a request.
  void acquire();
  std::size_t rpm() const noexcept { return rpm_; }

 private:
  using Clock = std::chrono::steady_clock;
  std::size_t rpm_;
  Sleeper sleep_;
  std::mutex mu_;
  Clock::time_point next_{};
};

}  // namespace indicgec::prompting
