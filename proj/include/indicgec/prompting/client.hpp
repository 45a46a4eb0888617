#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "indicgec/prompting/prompt.hpp"

namespace indicgec::prompting {

// Result of one request. status is the HTTP status, or 0 when the request
// never got an answer (connection refused, timeout).
struct ChatOutcome {
  int status = 0;
  std::string text;
  // Set when the exchange failed or the body could not be interpreted.
  std::string error;
  std::optional<std::chrono::milliseconds> retry_after;
  std::map<std::string, std::string> meta;

  bool ok() const { return status == 200 && error.empty(); }
};

// One chat-completion endpoint. Implementations must be safe to call from
// several threads at once.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatOutcome send(const PromptBundle& bundle) = 0;
  virtual std::string provider_name() const = 0;
};

enum class Dialect { OpenAi, Gemini, Echo };

std::string to_string(Dialect d);
// "openai", "gemini", "echo". Throws ConfigError otherwise.
Dialect parse_dialect(std::string_view name);

struct ProviderPreset {
  std::string name;
  std::string base_url;
  // Environment variable holding the credential; empty means none needed.
  std::string auth_env_var;
  Dialect dialect = Dialect::OpenAi;
  // Requests per minute; 0 disables limiting.
  std::size_t rpm_limit = 0;
  // Empty selects the dialect's default ("Authorization" with a Bearer
  // prefix for openai, "x-goog-api-key" for gemini). Any other header carries
  // the bare credential.
  std::string auth_header;

  bool operator==(const ProviderPreset&) const = default;
};

// Built-in presets: "openai", "gemini", "sarvam", "echo".
std::optional<ProviderPreset> preset_provider(std::string_view name);
std::vector<std::string> preset_provider_names();

// Reads the preset's credential from the environment. Throws ConfigError
// naming the variable when it is unset or empty. Returns "" when the preset
// needs no credential.
std::string credential_from_env(const ProviderPreset& preset);

struct BaseUrl {
  std::string origin;       // scheme://host[:port]
  std::string path_prefix;  // "" or "/v1" style, no trailing slash
};

// Throws ConfigError for anything other than http(s)://host[:port][/path].
BaseUrl parse_base_url(std::string_view url);

struct HttpOptions {
  std::chrono::seconds connect_timeout{10};
  std::chrono::seconds read_timeout{120};
};

struct HttpResponse {
  int status = 0;  // 0 when no answer arrived
  std::string body;
  std::string error;
  std::optional<std::chrono::milliseconds> retry_after;
};

// POSTs a JSON body to origin + path. Transport failures come back as
// status 0 with `error` set; nothing throws.
HttpResponse http_post_json(const BaseUrl& url, const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& headers,
                            const std::string& body, const HttpOptions& options);

// Serializes a bundle in the dialect's wire format.
std::string request_body(Dialect dialect, const PromptBundle& bundle);
// Extracts the reply text and metadata from a 200 response body.
ChatOutcome parse_response(Dialect dialect, std::string_view body);

class HttpChatClient : public ChatClient {
 public:
  HttpChatClient(ProviderPreset preset, std::string credential, HttpOptions options = {});

  ChatOutcome send(const PromptBundle& bundle) override;
  std::string provider_name() const override { return preset_.name; }

 private:
  ProviderPreset preset_;
  std::string credential_;
  HttpOptions options_;
  BaseUrl url_;
};

// Offline provider that answers with the final user message unchanged.
class EchoChatClient : public ChatClient {
 public:
  explicit EchoChatClient(std::string name = "echo") : name_(std::move(name)) {}

  ChatOutcome send(const PromptBundle& bundle) override;
  std::string provider_name() const override { return name_; }
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::string name_;
  std::atomic<std::size_t> calls_{0};
};

// Checks credentials first, then builds the client for the preset's dialect.
std::unique_ptr<ChatClient> make_client(const ProviderPreset& preset, HttpOptions options = {});

}  // namespace indicgec::prompting
