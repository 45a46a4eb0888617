#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "indicgec/corpus/corpus.hpp"
#include "indicgec/prompting/client.hpp"
#include "indicgec/prompting/prompt.hpp"
#include "indicgec/prompting/retry.hpp"
#include "indicgec/tokenize/bpe.hpp"

namespace indicgec::runner {

struct ExemplarSpec {
  prompting::SelectionMode mode = prompting::SelectionMode::RandomSeeded;
  std::size_t k = 10;
  // Falls back to the run seed.
  std::optional<std::uint64_t> seed;
  // CuratedFile only; "{lang}" expands to the language code.
  std::string path_pattern;
};

struct SystemConfig {
  std::string name;  // also used as a file name
  std::string provider;
  std::string model_id;
  std::string template_name;
  std::optional<ExemplarSpec> exemplars;
  double temperature = 0.0;
  std::optional<std::size_t> max_output_tokens;
};

struct MetricToggles {
  bool gleu = true;
  bool f05 = true;
  bool bertscore = false;
  bool compliance = true;
  double beta = 0.5;
};

struct EmbeddingConfig {
  // "char-ngram" (offline, deterministic) or "http" (OpenAI-style /embeddings).
  std::string provider = "char-ngram";
  std::size_t dim = 256;
  std::size_t ngram = 3;
  std::string base_url;
  std::string auth_env_var;
  std::string model;
};

struct RunConfig {
  std::filesystem::path config_path;
  std::vector<corpus::Language> languages;
  std::vector<corpus::Split> splits = {corpus::Split::Train, corpus::Split::Dev,
                                       corpus::Split::Test};
  std::filesystem::path data_dir;
  // Relative to data_dir; "{lang}" and "{split}" are expanded.
  std::string layout = "{lang}/{split}.tsv";
  corpus::FileFormat format = corpus::FileFormat::Tsv;
  corpus::LoadOptions load;
  corpus::Split eval_split = corpus::Split::Test;
  corpus::Split fertility_split = corpus::Split::Test;

  std::map<std::string, prompting::ProviderPreset> providers;
  std::map<std::string, prompting::PromptTemplate> templates;
  std::vector<SystemConfig> systems;
  prompting::RetryPolicy retry;
  double failure_threshold = 0.0;

  MetricToggles metrics;
  EmbeddingConfig embedding;
  std::vector<std::filesystem::path> tokenizers;
  tokenize::Side fertility_side = tokenize::Side::Source;

  std::uint64_t seed = 0;
  std::size_t parallelism = 4;
  std::filesystem::path cache_dir;
  std::filesystem::path output_dir;

  std::filesystem::path corpus_path(const corpus::Language& lang, corpus::Split split) const;
  const corpus::Language& language(std::string_view code) const;
  const SystemConfig& system(std::string_view name) const;
};

// Parses a JSON config document. Relative paths resolve against `base_dir`.
// Unknown keys, duplicate names and dangling references are ConfigErrors.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Problems with files the config points at (corpora, tokenizer specs,
// curated exemplar files), one message per missing file.
std::vector<std::string> missing_files(const RunConfig& config);

}  // namespace indicgec::runner
