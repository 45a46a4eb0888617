#include "indicgec/prompting/client.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "indicgec/error.hpp"
#include "indicgec/text.hpp"

namespace indicgec::prompting {

namespace {

using nlohmann::json;

std::string meta_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string snippet(std::string_view body) {
  constexpr std::size_t kMax = 300;
  return text::escape_bytes(body.substr(0, kMax)) + (body.size() > kMax ? "..." : "");
}

std::optional<std::chrono::milliseconds> parse_retry_after(const std::string& v) {
  if (v.empty()) return std::nullopt;
  char* end = nullptr;
  const double seconds = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || seconds < 0) return std::nullopt;
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

std::string gemini_model_path(const std::string& model_id) {
  constexpr std::string_view kPrefix = "models/";
  std::string_view m = model_id;
  if (m.starts_with(kPrefix)) m.remove_prefix(kPrefix.size());
  return "/models/" + std::string(m) + ":generateContent";
}

}  // namespace

std::string to_string(Dialect d) {
  switch (d) {
    case Dialect::OpenAi:
      return "openai";
    case Dialect::Gemini:
      return "gemini";
    case Dialect::Echo:
      return "echo";
  }
  return "openai";
}

Dialect parse_dialect(std::string_view name) {
  if (name == "openai") return Dialect::OpenAi;
  if (name == "gemini") return Dialect::Gemini;
  if (name == "echo") return Dialect::Echo;
  throw ConfigError("unknown provider dialect \"" + std::string(name) +
                    "\" (expected openai, gemini or echo)");
}

std::optional<ProviderPreset> preset_provider(std::string_view name) {
  if (name == "openai") {
    return ProviderPreset{"openai", "https://api.openai.com/v1", "OPENAI_API_KEY",
                          Dialect::OpenAi, 500, ""};
  }
  if (name == "gemini") {
    return ProviderPreset{"gemini", "https://generativelanguage.googleapis.com/v1beta",
                          "GEMINI_API_KEY", Dialect::Gemini, 60, ""};
  }
  if (name == "sarvam") {
    return ProviderPreset{"sarvam", "https://api.sarvam.ai/v1", "SARVAM_API_KEY",
                          Dialect::OpenAi, 60, "api-subscription-key"};
  }
  if (name == "echo") return ProviderPreset{"echo", "", "", Dialect::Echo, 0, ""};
  return std::nullopt;
}

std::vector<std::string> preset_provider_names() { return {"openai", "gemini", "sarvam", "echo"}; }

std::string credential_from_env(const ProviderPreset& preset) {
  if (preset.auth_env_var.empty()) return "";
  const char* v = std::getenv(preset.auth_env_var.c_str());
  if (v == nullptr || *v == '\0') {
    throw ConfigError("provider " + preset.name + ": environment variable " +
                      preset.auth_env_var + " is not set");
  }
  return v;
}

BaseUrl parse_base_url(std::string_view url) {
  static const std::regex re(R"(^(https?://[A-Za-z0-9.\-]+|https?://\[[0-9A-Fa-f:.]+\])(:[0-9]{1,5})?(/.*)?$)");
  std::cmatch m;
  if (!std::regex_match(url.data(), url.data() + url.size(), m, re)) {
    throw ConfigError("invalid base URL \"" + std::string(url) + "\"");
  }
  BaseUrl out{m[1].str() + m[2].str(), m[3].str()};
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

std::string request_body(Dialect dialect, const PromptBundle& b) {
  if (dialect == Dialect::Gemini) {
    json system_parts = json::array();
    json contents = json::array();
    for (const auto& m : b.messages) {
      if (m.role == Role::System) {
        system_parts.push_back({{"text", m.text}});
      } else {
        contents.push_back({{"role", m.role == Role::Assistant ? "model" : "user"},
                            {"parts", json::array({{{"text", m.text}}})}});
      }
    }
    json body = {{"contents", contents},
                 {"generationConfig",
                  {{"temperature", b.temperature}, {"maxOutputTokens", b.max_output_tokens}}}};
    if (!system_parts.empty()) body["systemInstruction"] = {{"parts", system_parts}};
    return body.dump();
  }
  json messages = json::array();
  for (const auto& m : b.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.text}});
  }
  return json{{"model", b.model_id},
              {"messages", messages},
              {"temperature", b.temperature},
              {"max_tokens", b.max_output_tokens}}
      .dump();
}

ChatOutcome parse_response(Dialect dialect, std::string_view body) {
  ChatOutcome out;
  out.status = 200;
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    out.error = "response is not JSON: " + snippet(body);
    return out;
  }
  try {
    if (dialect == Dialect::Gemini) {
      if (j.contains("promptFeedback") && j["promptFeedback"].contains("blockReason")) {
        out.meta["block_reason"] = meta_value(j["promptFeedback"]["blockReason"]);
      }
      if (j.contains("candidates") && !j["candidates"].empty()) {
        const auto& c = j["candidates"][0];
        if (c.contains("finishReason")) out.meta["finish_reason"] = meta_value(c["finishReason"]);
        if (c.contains("content") && c["content"].contains("parts")) {
          for (const auto& p : c["content"]["parts"]) {
            if (p.contains("text")) out.text += p["text"].get<std::string>();
          }
        }
      }
      if (j.contains("usageMetadata")) {
        const auto& u = j["usageMetadata"];
        if (u.contains("promptTokenCount")) out.meta["prompt_tokens"] = meta_value(u["promptTokenCount"]);
        if (u.contains("candidatesTokenCount")) {
          out.meta["completion_tokens"] = meta_value(u["candidatesTokenCount"]);
        }
      }
      if (j.contains("modelVersion")) out.meta["model"] = meta_value(j["modelVersion"]);
      return out;
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
      out.error = "response has no choices: " + snippet(body);
      return out;
    }
    const auto& c = j["choices"][0];
    if (c.contains("finish_reason")) out.meta["finish_reason"] = meta_value(c["finish_reason"]);
    if (c.contains("message") && c["message"].contains("content") &&
        c["message"]["content"].is_string()) {
      out.text = c["message"]["content"].get<std::string>();
    }
    if (c.contains("message") && c["message"].contains("refusal") &&
        c["message"]["refusal"].is_string()) {
      out.meta["refusal"] = c["message"]["refusal"].get<std::string>();
    }
    if (j.contains("usage")) {
      const auto& u = j["usage"];
      if (u.contains("prompt_tokens")) out.meta["prompt_tokens"] = meta_value(u["prompt_tokens"]);
      if (u.contains("completion_tokens")) {
        out.meta["completion_tokens"] = meta_value(u["completion_tokens"]);
      }
    }
    if (j.contains("model")) out.meta["model"] = meta_value(j["model"]);
  } catch (const json::exception& e) {
    out.error = std::string("unexpected response shape: ") + e.what();
  }
  return out;
}

HttpChatClient::HttpChatClient(ProviderPreset preset, std::string credential, HttpOptions options)
    : preset_(std::move(preset)),
      credential_(std::move(credential)),
      options_(options),
      url_(parse_base_url(preset_.base_url)) {
  if (preset_.dialect == Dialect::Echo) {
    throw ConfigError("provider " + preset_.name + ": echo dialect has no HTTP client");
  }
}

HttpResponse http_post_json(const BaseUrl& url, const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& headers,
                            const std::string& body, const HttpOptions& options) {
  // One client per call keeps callers free of shared mutable state.
  httplib::Client cli(url.origin);
  cli.set_connection_timeout(options.connect_timeout);
  cli.set_read_timeout(options.read_timeout);
  cli.set_write_timeout(options.read_timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);

  HttpResponse out;
  const auto res = cli.Post(url.path_prefix + path, h, body, "application/json");
  if (!res) {
    out.error = "transport error: " + httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  if (res->status != 200) {
    out.error = "HTTP " + std::to_string(res->status) + ": " + snippet(res->body);
    out.retry_after = parse_retry_after(res->get_header_value("Retry-After"));
  }
  return out;
}

ChatOutcome HttpChatClient::send(const PromptBundle& bundle) {
  const std::string path = preset_.dialect == Dialect::Gemini ? gemini_model_path(bundle.model_id)
                                                              : "/chat/completions";
  std::vector<std::pair<std::string, std::string>> headers;
  if (!credential_.empty()) {
    std::string header = preset_.auth_header;
    if (header.empty()) header = preset_.dialect == Dialect::Gemini ? "x-goog-api-key" : "Authorization";
    const bool bearer = header == "Authorization";
    headers.emplace_back(header, bearer ? "Bearer " + credential_ : credential_);
  }
  const auto res = http_post_json(url_, path, headers, request_body(preset_.dialect, bundle), options_);
  if (res.status != 200) {
    ChatOutcome out;
    out.status = res.status;
    out.error = res.error;
    out.retry_after = res.retry_after;
    return out;
  }
  return parse_response(preset_.dialect, res.body);
}

ChatOutcome EchoChatClient::send(const PromptBundle& bundle) {
  calls_.fetch_add(1);
  ChatOutcome out;
  out.status = 200;
  for (auto it = bundle.messages.rbegin(); it != bundle.messages.rend(); ++it) {
    if (it->role == Role::User) {
      out.text = it->text;
      break;
    }
  }
  out.meta["model"] = bundle.model_id;
  return out;
}

std::unique_ptr<ChatClient> make_client(const ProviderPreset& preset, HttpOptions options) {
  const auto credential = credential_from_env(preset);
  if (preset.dialect == Dialect::Echo) return std::make_unique<EchoChatClient>(preset.name);
  return std::make_unique<HttpChatClient>(preset, credential, options);
}

}  // namespace indicgec::prompting
