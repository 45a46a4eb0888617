#include "indicgec/runner/embedding.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "indicgec/error.hpp"
#include "indicgec/text.hpp"

namespace indicgec::runner {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CharNgramEmbedder::CharNgramEmbedder(std::size_t dim, std::size_t n) : dim_(dim), n_(n) {
  if (dim_ == 0 || n_ == 0) throw ConfigError("char-ngram embedder needs positive dim and n");
}

Eigen::MatrixXd CharNgramEmbedder::embed(const std::vector<std::string>& tokens) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tokens.size()),
                                            static_cast<Eigen::Index>(dim_));
  for (std::size_t row = 0; row < tokens.size(); ++row) {
    std::vector<std::string> cps{"<"};
    for (const char32_t cp : text::decode(tokens[row])) cps.push_back(text::encode(cp));
    cps.emplace_back(">");
    const std::size_t n = std::min(n_, cps.size());
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      std::string gram;
      for (std::size_t k = 0; k < n; ++k) gram += cps[i + k];
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(fnv1a64(gram) % dim_)) += 1.0;
    }
  }
  return m;
}

std::string CharNgramEmbedder::name() const {
  return fmt::format("char-ngram(n={},dim={},fnv1a)", n_, dim_);
}

HttpEmbedder::HttpEmbedder(std::string base_url, std::string model, std::string credential,
                           prompting::RetryPolicy retry, prompting::Sleeper sleep)
    : url_(prompting::parse_base_url(base_url)),
      model_(std::move(model)),
      credential_(std::move(credential)),
      retry_(retry),
      sleep_(std::move(sleep)) {
  prompting::validate(retry_);
}

Eigen::MatrixXd HttpEmbedder::embed(const std::vector<std::string>& tokens) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    for (const auto& t : tokens) {
      if (!memo_.contains(t) &&
          std::find(missing.begin(), missing.end(), t) == missing.end()) {
        missing.push_back(t);
      }
    }
  }
  if (!missing.empty()) {
    std::vector<std::pair<std::string, std::string>> headers;
    if (!credential_.empty()) headers.emplace_back("Authorization", "Bearer " + credential_);
    const auto body = nlohmann::json{{"model", model_}, {"input", missing}}.dump();
    std::mt19937_64 rng(fnv1a64(body));
    prompting::HttpResponse res;
    for (int attempt = 1;; ++attempt) {
      res = prompting::http_post_json(url_, "/embeddings", headers, body, {});
      if (res.status == 200) break;
      if (!prompting::is_retryable(res.status)) {
        throw Error("embedding provider: " + res.error);
      }
      if (attempt >= retry_.max_attempts) {
        throw Error(fmt::format("embedding provider: gave up after {} attempts: {}", attempt, res.error));
      }
      sleep_(prompting::backoff_delay(retry_, attempt, res.retry_after, rng));
    }
    try {
      const auto j = nlohmann::json::parse(res.body);
      const auto& data = j.at("data");
      if (data.size() != missing.size()) {
        throw Error(fmt::format("embedding provider returned {} vectors for {} inputs", data.size(),
                                missing.size()));
      }
      std::lock_guard lock(mu_);
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& item = data[i];
        const auto index = item.contains("index") ? item.at("index").get<std::size_t>() : i;
        if (index >= missing.size()) throw Error("embedding provider returned an out-of-range index");
        const auto values = item.at("embedding").get<std::vector<double>>();
        memo_[missing[index]] = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                                  static_cast<Eigen::Index>(values.size()));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("embedding provider: unexpected response: ") + e.what());
    }
  }
  std::lock_guard lock(mu_);
  if (tokens.empty()) return Eigen::MatrixXd(0, 0);
  const auto dim = memo_.at(tokens.front()).size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(tokens.size()), dim);
  for (std::size_t row = 0; row < tokens.size(); ++row) {
    const auto& v = memo_.at(tokens[row]);
    if (v.size() != dim) throw Error("embedding provider returned vectors of different widths");
    m.row(static_cast<Eigen::Index>(row)) = v.transpose();
  }
  return m;
}

std::string HttpEmbedder::name() const { return "http:" + model_; }

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbeddingConfig& config) {
  if (config.provider == "char-ngram") {
    return std::make_unique<CharNgramEmbedder>(config.dim, config.ngram);
  }
  if (config.provider == "http") {
    std::string credential;
    if (!config.auth_env_var.empty()) {
      const char* v = std::getenv(config.auth_env_var.c_str());
      if (v == nullptr || *v == '\0') {
        throw ConfigError("embedding provider: environment variable " + config.auth_env_var +
                          " is not set");
      }
      credential = v;
    }
    return std::make_unique<HttpEmbedder>(config.base_url, config.model, credential);
  }
  throw ConfigError("unknown embedding provider \"" + config.provider + "\"");
}

}  // namespace indicgec::runner
