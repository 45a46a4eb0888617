#include "indicgec/runner/config.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <json.hpp>

#include "indicgec/error.hpp"

namespace indicgec::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void only_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ConfigError(std::string(where) + ": unknown key \"" + k + "\"");
    }
  }
}

template <typename T>
T get(const json& obj, const char* key, std::string_view where, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

template <typename T>
T require(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key)) throw ConfigError(std::string(where) + ": missing \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string expand(std::string pattern, std::string_view lang, std::string_view split) {
  return prompting::substitute(pattern, {{"lang", std::string(lang)}, {"split", std::string(split)}});
}

bool safe_name(const std::string& s) {
  static const std::regex re(R"([A-Za-z0-9][A-Za-z0-9._-]*)");
  return std::regex_match(s, re);
}

corpus::Split split_of(const std::string& s, std::string_view where) {
  try {
    return corpus::parse_split(s);
  } catch (const Error&) {
    throw ConfigError(std::string(where) + ": unknown split \"" + s + "\"");
  }
}

corpus::Language parse_language(const json& j) {
  if (j.is_string()) {
    const auto code = j.get<std::string>();
    const auto preset = corpus::preset_language(code);
    if (!preset) {
      throw ConfigError("languages: \"" + code +
                        "\" is not a preset; give {code, display_name, script} instead");
    }
    return *preset;
  }
  only_keys(j, "languages[]", {"code", "display_name", "script"});
  const auto code = require<std::string>(j, "code", "languages[]");
  corpus::Script script = corpus::Script::Other;
  if (j.contains("script")) {
    try {
      script = corpus::parse_script(j.at("script").get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(std::string("languages[") + code + "].script: " + e.what());
    }
  }
  return corpus::make_language(code, get<std::string>(j, "display_name", "languages[]", code), script);
}

prompting::ProviderPreset parse_provider(const json& j) {
  only_keys(j, "providers[]", {"name", "base_url", "auth_env_var", "dialect", "rpm_limit", "auth_header"});
  prompting::ProviderPreset p;
  p.name = require<std::string>(j, "name", "providers[]");
  const std::string where = "providers[" + p.name + "]";
  p.dialect = prompting::parse_dialect(get<std::string>(j, "dialect", where, "openai"));
  p.base_url = get<std::string>(j, "base_url", where, "");
  if (p.dialect != prompting::Dialect::Echo) prompting::parse_base_url(p.base_url);
  p.auth_env_var = get<std::string>(j, "auth_env_var", where, "");
  p.rpm_limit = get<std::size_t>(j, "rpm_limit", where, 0);
  p.auth_header = get<std::string>(j, "auth_header", where, "");
  return p;
}

prompting::PromptTemplate parse_template(const json& j) {
  only_keys(j, "templates[]", {"name", "instructions", "exemplar_intro", "style"});
  const auto name = require<std::string>(j, "name", "templates[]");
  const auto style = get<std::string>(j, "style", "templates[" + name + "]", "zero-shot");
  prompting::PromptStyle s;
  if (style == "zero-shot") {
    s = prompting::PromptStyle::ZeroShot;
  } else if (style == "few-shot") {
    s = prompting::PromptStyle::FewShot;
  } else {
    throw ConfigError("templates[" + name + "].style: expected zero-shot or few-shot");
  }
  return prompting::make_template(name, require<std::string>(j, "instructions", "templates[]"),
                                  get<std::string>(j, "exemplar_intro", "templates[]", ""), s);
}

ExemplarSpec parse_exemplars(const json& j, const std::string& where, const fs::path& base) {
  only_keys(j, where, {"mode", "k", "seed", "path"});
  ExemplarSpec e;
  const auto mode = get<std::string>(j, "mode", where, "random");
  e.k = get<std::size_t>(j, "k", where, 10);
  if (e.k == 0) throw ConfigError(where + ".k: must be at least 1");
  if (mode == "random") {
    e.mode = prompting::SelectionMode::RandomSeeded;
    if (j.contains("seed")) e.seed = require<std::uint64_t>(j, "seed", where);
  } else if (mode == "curated") {
    e.mode = prompting::SelectionMode::CuratedFile;
    e.path_pattern = resolve(base, require<std::string>(j, "path", where)).string();
  } else {
    throw ConfigError(where + ".mode: expected random or curated");
  }
  return e;
}

}  // namespace

fs::path RunConfig::corpus_path(const corpus::Language& lang, corpus::Split split) const {
  return data_dir / expand(layout, lang.code, corpus::to_string(split));
}

const corpus::Language& RunConfig::language(std::string_view code) const {
  for (const auto& l : languages) {
    if (l.code == code) return l;
  }
  throw ConfigError("language \"" + std::string(code) + "\" is not configured");
}

const SystemConfig& RunConfig::system(std::string_view name) const {
  for (const auto& s : systems) {
    if (s.name == name) return s;
  }
  throw ConfigError("system \"" + std::string(name) + "\" is not configured");
}

RunConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(root, "config",
            {"languages", "splits", "data_dir", "layout", "format", "has_header", "nfc", "eval_split",
             "fertility_split", "providers", "templates", "systems", "retry", "failure_threshold",
             "metrics", "embedding", "tokenizers", "fertility_side", "seed", "parallelism",
             "cache_dir", "output_dir"});
  RunConfig c;

  if (!root.contains("languages") || !root["languages"].is_array() || root["languages"].empty()) {
    throw ConfigError("config: \"languages\" must be a nonempty list");
  }
  std::set<std::string> codes;
  for (const auto& l : root["languages"]) {
    c.languages.push_back(parse_language(l));
    if (!codes.insert(c.languages.back().code).second) {
      throw ConfigError("languages: duplicate code \"" + c.languages.back().code + "\"");
    }
  }
  if (root.contains("splits")) {
    c.splits.clear();
    for (const auto& s : require<std::vector<std::string>>(root, "splits", "config")) {
      c.splits.push_back(split_of(s, "splits"));
    }
  }
  c.data_dir = resolve(base_dir, require<std::string>(root, "data_dir", "config"));
  c.layout = get<std::string>(root, "layout", "config", c.layout);
  const auto format = get<std::string>(root, "format", "config", "tsv");
  if (format == "tsv") {
    c.format = corpus::FileFormat::Tsv;
  } else if (format == "csv") {
    c.format = corpus::FileFormat::Csv;
  } else {
    throw ConfigError("config.format: expected tsv or csv");
  }
  c.load.has_header = get<bool>(root, "has_header", "config", false);
  c.load.nfc = get<bool>(root, "nfc", "config", false);
  c.eval_split = split_of(get<std::string>(root, "eval_split", "config", "test"), "eval_split");
  c.fertility_split =
      split_of(get<std::string>(root, "fertility_split", "config", "test"), "fertility_split");

  for (const auto& name : prompting::preset_provider_names()) {
    c.providers.emplace(name, *prompting::preset_provider(name));
  }
  if (root.contains("providers")) {
    for (const auto& p : root["providers"]) {
      auto preset = parse_provider(p);
      c.providers.insert_or_assign(preset.name, std::move(preset));
    }
  }
  for (const auto& name : prompting::preset_template_names()) {
    c.templates.emplace(name, *prompting::preset_template(name));
  }
  if (root.contains("templates")) {
    for (const auto& t : root["templates"]) {
      auto tmpl = parse_template(t);
      c.templates.insert_or_assign(tmpl.name, std::move(tmpl));
    }
  }

  std::set<std::string> system_names;
  if (root.contains("systems")) {
    for (const auto& s : root["systems"]) {
      only_keys(s, "systems[]",
                {"name", "provider", "model_id", "template", "exemplars", "temperature",
                 "max_output_tokens"});
      SystemConfig sys;
      sys.name = require<std::string>(s, "name", "systems[]");
      const std::string where = "systems[" + sys.name + "]";
      if (!safe_name(sys.name)) {
        throw ConfigError(where + ": names may use letters, digits, '.', '_' and '-' only");
      }
      if (!system_names.insert(sys.name).second) throw ConfigError(where + ": duplicate name");
      sys.provider = require<std::string>(s, "provider", where);
      if (!c.providers.contains(sys.provider)) {
        throw ConfigError(where + ": unknown provider \"" + sys.provider + "\"");
      }
      sys.model_id = require<std::string>(s, "model_id", where);
      sys.template_name = require<std::string>(s, "template", where);
      const auto t = c.templates.find(sys.template_name);
      if (t == c.templates.end()) {
        throw ConfigError(where + ": unknown template \"" + sys.template_name + "\"");
      }
      if (s.contains("exemplars")) sys.exemplars = parse_exemplars(s["exemplars"], where + ".exemplars", base_dir);
      const bool few = t->second.style == prompting::PromptStyle::FewShot;
      if (few && !sys.exemplars) throw ConfigError(where + ": few-shot template needs \"exemplars\"");
      if (!few && sys.exemplars) throw ConfigError(where + ": zero-shot template takes no exemplars");
      sys.temperature = get<double>(s, "temperature", where, 0.0);
      if (s.contains("max_output_tokens") && !s["max_output_tokens"].is_null()) {
        sys.max_output_tokens = require<std::size_t>(s, "max_output_tokens", where);
      }
      c.systems.push_back(std::move(sys));
    }
  }

  if (root.contains("retry")) {
    const auto& r = root["retry"];
    only_keys(r, "retry", {"max_attempts", "initial_backoff_ms", "multiplier", "max_backoff_ms",
                           "jitter", "honor_retry_after"});
    c.retry.max_attempts = get<int>(r, "max_attempts", "retry", c.retry.max_attempts);
    c.retry.initial_backoff =
        prompting::Millis(get<long>(r, "initial_backoff_ms", "retry", c.retry.initial_backoff.count()));
    c.retry.multiplier = get<double>(r, "multiplier", "retry", c.retry.multiplier);
    c.retry.max_backoff =
        prompting::Millis(get<long>(r, "max_backoff_ms", "retry", c.retry.max_backoff.count()));
    c.retry.jitter = get<double>(r, "jitter", "retry", c.retry.jitter);
    c.retry.honor_retry_after = get<bool>(r, "honor_retry_after", "retry", true);
  }
  prompting::validate(c.retry);
  c.failure_threshold = get<double>(root, "failure_threshold", "config", 0.0);
  if (!(c.failure_threshold >= 0.0 && c.failure_threshold <= 1.0)) {
    throw ConfigError("config.failure_threshold: must be in [0, 1]");
  }

  if (root.contains("metrics")) {
    const auto& m = root["metrics"];
    only_keys(m, "metrics", {"gleu", "f05", "bertscore", "compliance", "beta"});
    c.metrics.gleu = get<bool>(m, "gleu", "metrics", true);
    c.metrics.f05 = get<bool>(m, "f05", "metrics", true);
    c.metrics.bertscore = get<bool>(m, "bertscore", "metrics", false);
    c.metrics.compliance = get<bool>(m, "compliance", "metrics", true);
    c.metrics.beta = get<double>(m, "beta", "metrics", 0.5);
    if (!(c.metrics.beta > 0.0)) throw ConfigError("metrics.beta: must be positive");
  }
  if (root.contains("embedding")) {
    const auto& e = root["embedding"];
    only_keys(e, "embedding", {"provider", "dim", "ngram", "base_url", "auth_env_var", "model"});
    c.embedding.provider = get<std::string>(e, "provider", "embedding", "char-ngram");
    c.embedding.dim = get<std::size_t>(e, "dim", "embedding", 256);
    c.embedding.ngram = get<std::size_t>(e, "ngram", "embedding", 3);
    c.embedding.base_url = get<std::string>(e, "base_url", "embedding", "");
    c.embedding.auth_env_var = get<std::string>(e, "auth_env_var", "embedding", "");
    c.embedding.model = get<std::string>(e, "model", "embedding", "");
    if (c.embedding.provider == "char-ngram") {
      if (c.embedding.dim == 0 || c.embedding.ngram == 0) {
        throw ConfigError("embedding: dim and ngram must be positive");
      }
    } else if (c.embedding.provider == "http") {
      prompting::parse_base_url(c.embedding.base_url);
      if (c.embedding.model.empty()) throw ConfigError("embedding: http provider needs a model");
    } else {
      throw ConfigError("embedding.provider: expected char-ngram or http");
    }
  }

  for (const auto& t : get<std::vector<std::string>>(root, "tokenizers", "config", {})) {
    c.tokenizers.push_back(resolve(base_dir, t));
  }
  const auto side = get<std::string>(root, "fertility_side", "config", "source");
  if (side == "source") {
    c.fertility_side = tokenize::Side::Source;
  } else if (side == "reference") {
    c.fertility_side = tokenize::Side::Reference;
  } else {
    throw ConfigError("config.fertility_side: expected source or reference");
  }

  c.seed = get<std::uint64_t>(root, "seed", "config", 0);
  c.parallelism = get<std::size_t>(root, "parallelism", "config", 4);
  if (c.parallelism == 0) throw ConfigError("config.parallelism: must be at least 1");
  c.cache_dir = resolve(base_dir, get<std::string>(root, "cache_dir", "config", "cache"));
  c.output_dir = resolve(base_dir, get<std::string>(root, "output_dir", "config", "out"));
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = corpus::read_file_bytes(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  try {
    auto c = parse_config(text, fs::absolute(path).parent_path());
    c.config_path = fs::absolute(path).lexically_normal();
    return c;
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> missing_files(const RunConfig& c) {
  std::vector<std::string> out;
  auto check = [&](const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) out.push_back(what + ": missing file " + p.string());
  };
  for (const auto& lang : c.languages) {
    for (const auto split : c.splits) {
      check(c.corpus_path(lang, split), lang.code + " " + std::string(corpus::to_string(split)));
    }
    for (const auto& sys : c.systems) {
      if (sys.exemplars && sys.exemplars->mode == prompting::SelectionMode::CuratedFile) {
        check(expand(sys.exemplars->path_pattern, lang.code, "train"),
              "system " + sys.name + " curated exemplars for " + lang.code);
      }
    }
  }
  for (const auto& t : c.tokenizers) check(t, "tokenizer spec");
  return out;
}

}  // namespace indicgec::runner
