#include "indicgec/prompting/prompt.hpp"

#include <array>
#include <limits>
#include <random>
#include <numeric>

#include <json.hpp>

#include "indicgec/text.hpp"

namespace indicgec::prompting {

namespace {

constexpr std::string_view kGeminiInstructions =
    "You are a {language} Grammatical Error Correction assistant, in low resource settings. "
    "Your task is to accurately identify and correct grammatical errors in the given {language} "
    "sentence. Correct all types of grammatical errors:\n"
    "Verb usage: Correct conjugation, tense, aspect, and agreement with the subject.,\n"
    "Pronouns: Usage of proper personal, possessive, and reflexive pronouns.,\n"
    "Prepositions: Correct use of postpositions or prepositions in context.,\n"
    "Fix spelling mistakes, diacritic marks (matras), and punctuation errors.,\n"
    "Gender and number agreement: Ensure adjectives, nouns, and verbs match in gender "
    "(masculine/feminine) and number (singular/plural).,\n"
    "The output should be ONLY the CORRECTED sentence, without any extra text or explanation. "
    "If the input is already correct, return it unchanged. Please ensure the corrections follow "
    "the rules and preserve the intended meaning.";

constexpr std::string_view kGeminiIntro = "Below are {k} random sentences for your reference.";

constexpr std::string_view kGptInstructions =
    "You are a Grammatical Error Correction (GEC) assistant for low-resource Indian languages.\n"
    "Your job: correct only grammar, spelling, spacing, matras/diacritics, punctuation, and light "
    "word-form errors.\n"
    "Do NOT translate. Preserve the meaning, script, and style of the input language.\n"
    "Return ONLY the corrected sentence with no quotes, no labels, no extra text.\n"
    "If the input is already correct, return it unchanged.";

constexpr std::string_view kGptIntro = "Below are {k} examples for your reference.";

struct QuotePair {
  std::string_view open;
  std::string_view close;
};

constexpr std::array<QuotePair, 5> kQuotes = {{
    {"\"", "\""},
    {"'", "'"},
    {"“", "”"},
    {"‘", "’"},
    {"«", "»"},
}};

// The text between the quotes when `s` is wrapped by one pair whose opening
// quote is closed by the final character; nullopt otherwise.
std::optional<std::string_view> unwrap(std::string_view s) {
  for (const auto& q : kQuotes) {
    if (s.size() < q.open.size() + q.close.size()) continue;
    if (!s.starts_with(q.open) || !s.ends_with(q.close)) continue;
    const auto inner = s.substr(q.open.size(), s.size() - q.open.size() - q.close.size());
    if (q.open == q.close) {
      if (inner.find(q.open) == std::string_view::npos) return inner;
      continue;
    }
    long depth = 0;
    bool balanced = true;
    for (std::size_t i = 0; i < inner.size();) {
      if (inner.substr(i).starts_with(q.open)) {
        ++depth;
        i += q.open.size();
      } else if (inner.substr(i).starts_with(q.close)) {
        if (--depth < 0) {
          balanced = false;
          break;
        }
        i += q.close.size();
      } else {
        ++i;
      }
    }
    if (balanced && depth == 0) return inner;
  }
  return std::nullopt;
}

std::string collapse_line_breaks(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '\r' || s[i] == '\n') {
      out.push_back(' ');
      while (i < s.size() && (s[i] == '\r' || s[i] == '\n')) ++i;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do x = rng(); while (x >= limit);
  return x % n;
}

}  // namespace

std::string to_string(PromptStyle style) {
  return style == PromptStyle::ZeroShot ? "zero-shot" : "few-shot";
}

std::string to_string(ExemplarProvenance p) {
  return p == ExemplarProvenance::Curated ? "curated" : "random-seeded";
}

std::string to_string(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

std::string PromptTemplate::system_text() const {
  if (style == PromptStyle::ZeroShot) return instructions;
  return instructions + "\n" + exemplar_intro;
}

PromptTemplate make_template(std::string name, std::string instructions,
                             std::string exemplar_intro, PromptStyle style) {
  if (name.empty()) throw ConfigError("prompt template needs a name");
  if (text::trim(instructions).empty()) {
    throw ConfigError("prompt template " + name + ": empty instructions");
  }
  if (style == PromptStyle::FewShot && text::trim(exemplar_intro).empty()) {
    throw ConfigError("prompt template " + name + ": few-shot template needs an exemplar introduction");
  }
  if (style == PromptStyle::ZeroShot) exemplar_intro.clear();
  return PromptTemplate{std::move(name), std::move(instructions), std::move(exemplar_intro), style};
}

std::optional<PromptTemplate> preset_template(std::string_view name) {
  if (name == "gemini-fs") {
    return make_template("gemini-fs", std::string(kGeminiInstructions), std::string(kGeminiIntro),
                         PromptStyle::FewShot);
  }
  if (name == "gemini-zs") {
    return make_template("gemini-zs", std::string(kGeminiInstructions), "", PromptStyle::ZeroShot);
  }
  if (name == "gpt-fs") {
    return make_template("gpt-fs", std::string(kGptInstructions), std::string(kGptIntro),
                         PromptStyle::FewShot);
  }
  if (name == "gpt-zs") {
    return make_template("gpt-zs", std::string(kGptInstructions), "", PromptStyle::ZeroShot);
  }
  return std::nullopt;
}

std::vector<std::string> preset_template_names() {
  return {"gemini-fs", "gemini-zs", "gpt-fs", "gpt-zs"};
}

std::string template_digest(const PromptTemplate& t) {
  const nlohmann::json j = {
      {"name", t.name}, {"style", to_string(t.style)}, {"system_text", t.system_text()}};
  return text::sha256_hex(j.dump());
}

std::string substitute(std::string_view text,
                       const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool replaced = false;
    if (text[i] == '{') {
      for (const auto& [key, value] : values) {
        const std::string token = "{" + key + "}";
        if (text.substr(i).starts_with(token)) {
          out += value;
          i += token.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(text[i++]);
  }
  return out;
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) {
    throw Error("cannot draw " + std::to_string(k) + " exemplars from " + std::to_string(n) +
                " training pairs");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(bounded(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

ExemplarSet select_exemplars(const corpus::Corpus& train, std::size_t k, SelectionMode mode,
                             const ExemplarSource& source) {
  if (train.split() != corpus::Split::Train) {
    throw ConfigError("exemplars must come from a train split, got " +
                      std::string(corpus::to_string(train.split())));
  }
  if (k == 0) throw ConfigError("exemplar count k must be at least 1");
  ExemplarSet set;
  set.k = k;
  if (mode == SelectionMode::RandomSeeded) {
    const auto* seed = std::get_if<std::uint64_t>(&source);
    if (seed == nullptr) throw ConfigError("random exemplar selection needs a seed");
    set.provenance = ExemplarProvenance::RandomSeeded;
    set.seed = *seed;
    for (const auto i : sample_indices(train.size(), k, *seed)) {
      const auto& p = train.pairs()[i];
      set.exemplars.push_back({p.source, p.reference});
    }
    return set;
  }
  const auto* path = std::get_if<std::filesystem::path>(&source);
  if (path == nullptr) throw ConfigError("curated exemplar selection needs a file path");
  const auto curated =
      corpus::load_two_column(*path, train.language(), corpus::Split::Train, corpus::FileFormat::Tsv);
  if (curated.size() != k) {
    throw DataError(path->string() + ": expected " + std::to_string(k) + " curated exemplars, got " +
                    std::to_string(curated.size()));
  }
  set.provenance = ExemplarProvenance::Curated;
  for (const auto& p : curated.pairs()) set.exemplars.push_back({p.source, p.reference});
  return set;
}

PromptBundle render(const PromptTemplate& t, const corpus::Language& language,
                    const std::optional<ExemplarSet>& exemplars, std::string_view input,
                    const DecodingParams& decoding) {
  if (text::trim(input).empty()) throw Error("cannot render a prompt for an empty sentence");
  if (t.style == PromptStyle::ZeroShot && exemplars.has_value()) {
    throw ConfigError("template " + t.name + " is zero-shot but exemplars were supplied");
  }
  if (t.style == PromptStyle::FewShot && (!exemplars || exemplars->exemplars.empty())) {
    throw ConfigError("template " + t.name + " is few-shot and needs a nonempty exemplar set");
  }
  const std::size_t k = exemplars ? exemplars->exemplars.size() : 0;
  PromptBundle b;
  b.model_id = decoding.model_id;
  b.temperature = decoding.temperature;
  b.max_output_tokens =
      decoding.max_output_tokens.value_or(4 * text::codepoint_count(input));
  b.messages.push_back({Role::System, substitute(t.system_text(), {{"language", language.display_name},
                                                                   {"k", std::to_string(k)}})});
  if (exemplars) {
    for (const auto& e : exemplars->exemplars) {
      b.messages.push_back({Role::User, e.erroneous});
      b.messages.push_back({Role::Assistant, e.corrected});
    }
  }
  b.messages.push_back({Role::User, std::string(input)});
  return b;
}

std::string canonical_request(const PromptBundle& bundle) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : bundle.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.text}});
  }
  const nlohmann::json j = {{"model_id", bundle.model_id},
                            {"messages", messages},
                            {"temperature", bundle.temperature},
                            {"max_output_tokens", bundle.max_output_tokens}};
  return j.dump();
}

std::string cache_key(const PromptBundle& bundle) {
  return text::sha256_hex(canonical_request(bundle));
}

EmptyResponseError::EmptyResponseError(std::string raw)
    : Error("empty response from provider (raw: \"" + text::escape_bytes(raw) + "\")"),
      raw_(std::move(raw)) {}

std::string normalize_response(std::string_view raw) {
  std::string s = collapse_line_breaks(text::trim(raw));
  if (const auto inner = unwrap(s)) {
    const auto stripped = text::trim(*inner);
    if (!unwrap(stripped)) s = std::string(stripped);
  }
  if (s.empty()) throw EmptyResponseError(std::string(raw));
  return s;
}

}  // namespace indicgec::prompting
