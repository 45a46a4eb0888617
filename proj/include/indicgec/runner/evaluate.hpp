#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "indicgec/corpus/corpus.hpp"
#include "indicgec/runner/config.hpp"
#include "indicgec/runner/embedding.hpp"

namespace indicgec::runner {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kWordDefinition =
    "whitespace chunks with leading/trailing punctuation detached; punctuation-only tokens are "
    "not words";

// ---- hypothesis files: id \t source \t hypothesis, no header ----

struct Hypothesis {
  std::string id;
  std::string source;
  std::string hypothesis;
  bool operator==(const Hypothesis&) const = default;
};

// Throws DataError naming the row on wrong field counts, duplicate ids,
// empty hypotheses or invalid UTF-8.
std::vector<Hypothesis> read_hypotheses(const std::filesystem::path& path);
// Refuses fields containing tabs or line breaks.
void write_hypotheses(const std::filesystem::path& path, const std::vector<Hypothesis>& rows);

// ---- scoring ----

struct FScoreSummary {
  double score = 0.0;  // x100
  double precision = 0.0;
  double recall = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct ComplianceSummary {
  double rate = 1.0;  // in [0, 1]
  std::size_t n_pairs = 0;
  std::size_t n_unchanged = 0;
  bool vacuous = false;
};

struct EvalRow {
  std::string language;
  std::string system;
  std::size_t n_pairs = 0;
  std::size_t n_identity = 0;
  std::optional<double> gleu;  // x100
  std::optional<FScoreSummary> f05;
  std::optional<double> bertscore_f1;  // x100, mean of sentence F1
  std::optional<ComplianceSummary> compliance;
  std::string hypotheses_sha256;
  std::vector<std::string> cache_keys;  // sorted
};

// Scores one system on one corpus. `hypotheses` maps pair id to output text
// and must cover every id. `embedder` is required when BERTScore is on.
EvalRow evaluate_system(const corpus::Corpus& corpus,
                        const std::map<std::string, std::string>& hypotheses,
                        const MetricToggles& metrics, EmbeddingProvider* embedder);

struct SystemInfo {
  std::string name;
  std::string provider;
  std::string model_id;
  std::string template_name;
  std::string template_digest;
  std::string exemplars;  // human-readable description, "" for zero-shot
  double temperature = 0.0;
  std::optional<std::size_t> max_output_tokens;
};

SystemInfo describe_system(const RunConfig& config, const SystemConfig& system);

struct Evaluation {
  int schema_version = kSchemaVersion;
  std::string gleu_variant;
  double beta = 0.5;
  std::string word_definition;
  std::string embedding_provider;  // "" when BERTScore is off
  std::string eval_split;
  std::uint64_t seed = 0;
  std::vector<corpus::Language> languages;
  std::vector<SystemInfo> systems;
  std::vector<EvalRow> rows;
  // Everything that may differ between otherwise identical runs.
  std::map<std::string, std::string> run_metadata;
};

std::string to_json(const Evaluation& e);
// Throws DataError on malformed documents or an unsupported schema_version.
Evaluation evaluation_from_json(std::string_view text, const std::string& origin);

std::string to_csv(const Evaluation& e);
std::string to_markdown(const Evaluation& e);

// Writes <dir>/evaluation.{json,csv,md}.
void write_evaluation(const Evaluation& e, const std::filesystem::path& dir);

// Two-decimal rendering used by every human-readable table.
std::string fixed2(double v);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace indicgec::runner
