#include "indicgec/prompting/retry.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "indicgec/error.hpp"

namespace indicgec::prompting {

void real_sleep(Millis d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

void validate(const RetryPolicy& p) {
  if (p.max_attempts < 1) throw ConfigError("retry: max_attempts must be at least 1");
  if (p.initial_backoff.count() < 0 || p.max_backoff.count() < 0) {
    throw ConfigError("retry: backoff durations must be non-negative");
  }
  if (!(p.multiplier >= 1.0)) throw ConfigError("retry: multiplier must be at least 1");
  if (!(p.jitter >= 0.0 && p.jitter <= 1.0)) throw ConfigError("retry: jitter must be in [0, 1]");
}

bool is_retryable(int status) {
  return status == 0 || status == 408 || status == 429 || (status >= 500 && status <= 599);
}

Millis backoff_delay(const RetryPolicy& p, int attempt, std::optional<Millis> retry_after,
                     std::mt19937_64& rng) {
  const double base = static_cast<double>(p.initial_backoff.count()) *
                      std::pow(p.multiplier, std::max(0, attempt - 1));
  double ms = std::min(base, static_cast<double>(p.max_backoff.count()));
  if (p.jitter > 0.0) {
    std::uniform_real_distribution<double> u(1.0 - p.jitter, 1.0 + p.jitter);
    ms *= u(rng);
  }
  auto delay = Millis(static_cast<Millis::rep>(std::llround(ms)));
  if (p.honor_retry_after && retry_after && *retry_after > delay) delay = *retry_after;
  return delay;
}

RateLimiter::RateLimiter(std::size_t rpm, Sleeper sleep) : rpm_(rpm), sleep_(std::move(sleep)) {}

void RateLimiter::acquire() {
  if (rpm_ == 0) return;
  const auto interval = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(60.0 / static_cast<double>(rpm_)));
  Clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    slot = std::max(Clock::now(), next_);
    next_ = slot + interval;
  }
  const auto wait = slot - Clock::now();
  if (wait > Clock::duration::zero()) {
    sleep_(std::chrono::ceil<Millis>(wait));
  }
}

}  // namespace indicgec::prompting
