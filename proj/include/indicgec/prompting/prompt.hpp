#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "indicgec/corpus/corpus.hpp"
#include "indicgec/error.hpp"

namespace indicgec::prompting {

enum class PromptStyle { ZeroShot, FewShot };

std::string to_string(PromptStyle style);

// System prompt = instructions, then (few-shot only) the exemplar
// introduction on its own line. Both may use {language}; the introduction
// may also use {k}.
struct PromptTemplate {
  std::string name;
  std::string instructions;
  std::string exemplar_intro;
  PromptStyle style = PromptStyle::ZeroShot;

  std::string system_text() const;
  bool operator==(const PromptTemplate&) const = default;
};

// Validates and builds a template. Throws ConfigError when the instructions
// are empty, or when a few-shot template lacks an exemplar introduction.
PromptTemplate make_template(std::string name, std::string instructions,
                             std::string exemplar_intro, PromptStyle style);

// Bundled presets: "gemini-fs", "gemini-zs", "gpt-fs", "gpt-zs".
std::optional<PromptTemplate> preset_template(std::string_view name);
std::vector<std::string> preset_template_names();

// Hex SHA-256 over name, style and system text.
std::string template_digest(const PromptTemplate& t);

// Replaces each "{key}" with its value; unknown placeholders stay as written.
std::string substitute(std::string_view text,
                       const std::vector<std::pair<std::string, std::string>>& values);

struct Exemplar {
  std::string erroneous;
  std::string corrected;
  bool operator==(const Exemplar&) const = default;
};

enum class ExemplarProvenance { Curated, RandomSeeded };
enum class SelectionMode { RandomSeeded, CuratedFile };

std::string to_string(ExemplarProvenance p);

struct ExemplarSet {
  std::vector<Exemplar> exemplars;
  ExemplarProvenance provenance = ExemplarProvenance::RandomSeeded;
  std::optional<std::uint64_t> seed;
  std::size_t k = 0;
  bool operator==(const ExemplarSet&) const = default;
};

using ExemplarSource = std::variant<std::uint64_t, std::filesystem::path>;

// RandomSeeded draws k distinct pairs from `train` (seed in `source`);
// CuratedFile reads a headerless two-column TSV of exactly k pairs (path in
// `source`). `train` must be a Train split in both modes.
ExemplarSet select_exemplars(const corpus::Corpus& train, std::size_t k, SelectionMode mode,
                             const ExemplarSource& source);

// Indices of a uniform k-subset of [0, n) in draw order. Uses mt19937_64 and
// rejection sampling only, so results are identical across platforms.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

enum class Role { System, User, Assistant };

std::string to_string(Role role);

struct Message {
  Role role = Role::User;
  std::string text;
  bool operator==(const Message&) const = default;
};

struct PromptBundle {
  std::vector<Message> messages;
  std::string model_id;
  double temperature = 0.0;
  std::size_t max_output_tokens = 0;
  bool operator==(const PromptBundle&) const = default;
};

struct DecodingParams {
  std::string model_id;
  double temperature = 0.0;
  // Unset means four tokens per input codepoint.
  std::optional<std::size_t> max_output_tokens;
};

// Builds the message list: system prompt, exemplars as user/assistant turns
// (few-shot), then the input sentence verbatim as the last user message.
// Throws ConfigError when exemplars are given to a zero-shot template or are
// missing/empty for a few-shot one, and Error for an empty input.
PromptBundle render(const PromptTemplate& t, const corpus::Language& language,
                    const std::optional<ExemplarSet>& exemplars, std::string_view input,
                    const DecodingParams& decoding);

// Canonical JSON of everything that affects the provider's answer.
std::string canonical_request(const PromptBundle& bundle);
// Hex SHA-256 of canonical_request.
std::string cache_key(const PromptBundle& bundle);

// Raised when a provider answers with nothing usable. Keeps the raw payload.
class EmptyResponseError : public Error {
 public:
  explicit EmptyResponseError(std::string raw);
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

// Trims, strips one pair of quotes wrapping the whole text, and turns runs of
// CR/LF into single spaces. Nothing else is touched. Idempotent. Throws
// EmptyResponseError when nothing is left.
std::string normalize_response(std::string_view raw);

}  // namespace indicgec::prompting
