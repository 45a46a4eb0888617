#include "indicgec/runner/fertility.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "indicgec/error.hpp"
#include "indicgec/runner/evaluate.hpp"

namespace indicgec::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string upper(std::string s) {
  for (auto& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

const FertilityRow* find_row(const FertilityTable& t, const std::string& lang, const std::string& tok) {
  for (const auto& r : t.rows) {
    if (r.language == lang && r.tokenizer == tok) return &r;
  }
  return nullptr;
}

}  // namespace

std::string script_family(corpus::Script script) {
  switch (script) {
    case corpus::Script::Devanagari: return "Devanagari";
    case corpus::Script::EasternNagari: return "Eastern Nagari";
    case corpus::Script::Tamil:
    case corpus::Script::Telugu:
    case corpus::Script::Malayalam: return "Dravidian";
    case corpus::Script::Other: break;
  }
  return "Other";
}

FertilityTable compute_fertility(const std::vector<corpus::Corpus>& corpora,
                                 const std::vector<fs::path>& specs, tokenize::Side side) {
  FertilityTable t;
  t.side = side == tokenize::Side::Source ? "source" : "reference";
  if (!corpora.empty()) t.split = std::string(corpus::to_string(corpora.front().split()));
  for (const auto& c : corpora) t.languages.push_back(c.language().code);
  for (const auto& path : specs) {
    tokenize::TokenizerSpec spec;
    try {
      spec = tokenize::load_tokenizer_spec(path);
    } catch (const Error& e) {
      t.errors.push_back(path.string() + ": " + e.what());
      continue;
    }
    if (std::find(t.tokenizers.begin(), t.tokenizers.end(), spec.name) != t.tokenizers.end()) {
      t.errors.push_back(path.string() + ": duplicate tokenizer name \"" + spec.name + "\"");
      continue;
    }
    std::vector<FertilityRow> rows;
    try {
      for (const auto& c : corpora) {
        const auto r = tokenize::fertility(spec, c, side);
        rows.push_back({c.language().code, script_family(c.language().script), spec.name, r.n_words,
                        r.n_subword_tokens, r.fertility});
      }
    } catch (const Error& e) {
      t.errors.push_back(path.string() + ": " + e.what());
      continue;
    }
    t.tokenizers.push_back(spec.name);
    t.rows.insert(t.rows.end(), rows.begin(), rows.end());
  }
  return t;
}

std::string to_json(const FertilityTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"language", r.language},
                    {"script_family", r.script_family},
                    {"tokenizer", r.tokenizer},
                    {"n_words", r.n_words},
                    {"n_tokens", r.n_tokens},
                    {"fertility", r.fertility}});
  }
  const json doc = {{"schema_version", kSchemaVersion},
                    {"kind", "fertility"},
                    {"split", t.split},
                    {"side", t.side},
                    {"word_definition", kWordDefinition},
                    {"languages", t.languages},
                    {"tokenizers", t.tokenizers},
                    {"rows", rows},
                    {"errors", t.errors}};
  return doc.dump(2) + "\n";
}

FertilityTable fertility_from_json(std::string_view text, const std::string& origin) {
  try {
    const auto j = json::parse(text);
    if (j.value("kind", "") != "fertility") throw DataError(origin + ": not a fertility document");
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw DataError(origin + ": unsupported schema_version");
    }
    FertilityTable t;
    t.split = j.at("split").get<std::string>();
    t.side = j.at("side").get<std::string>();
    t.languages = j.at("languages").get<std::vector<std::string>>();
    t.tokenizers = j.at("tokenizers").get<std::vector<std::string>>();
    t.errors = j.at("errors").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      t.rows.push_back({r.at("language").get<std::string>(), r.at("script_family").get<std::string>(),
                        r.at("tokenizer").get<std::string>(), r.at("n_words").get<std::size_t>(),
                        r.at("n_tokens").get<std::size_t>(), r.at("fertility").get<double>()});
    }
    return t;
  } catch (const json::exception& e) {
    throw DataError(origin + ": malformed fertility document: " + e.what());
  }
}

std::string to_csv(const FertilityTable& t) {
  std::string out = "language,script_family,tokenizer,n_words,n_tokens,fertility\r\n";
  for (const auto& r : t.rows) {
    out += fmt::format("{},{},{},{},{},{}\r\n", corpus::csv_escape(r.language),
                       corpus::csv_escape(r.script_family), corpus::csv_escape(r.tokenizer), r.n_words,
                       r.n_tokens, fixed2(r.fertility));
  }
  return out;
}

std::string to_markdown(const FertilityTable& t) {
  std::string out = fmt::format("# Tokenizer fertility\n\nSubword tokens per word, {} side of the {} split.\n\n",
                                t.side, t.split);
  if (t.tokenizers.empty()) {
    out += "No tokenizer spec could be loaded.\n";
  } else {
    out += "| Language | Script Family | " + fmt::format("{}", fmt::join(t.tokenizers, " | ")) + " |\n";
    out += "|---|---|";
    for (std::size_t i = 0; i < t.tokenizers.size(); ++i) out += "---:|";
    out += "\n";
    for (const auto& lang : t.languages) {
      std::string family;
      double lowest = INFINITY;
      for (const auto& tok : t.tokenizers) {
        if (const auto* r = find_row(t, lang, tok)) {
          family = r->script_family;
          lowest = std::min(lowest, std::stod(fixed2(r->fertility)));
        }
      }
      out += "| " + upper(lang) + " | " + family + " |";
      for (const auto& tok : t.tokenizers) {
        const auto* r = find_row(t, lang, tok);
        if (r == nullptr) {
          out += " n/a |";
          continue;
        }
        const auto cell = fixed2(r->fertility);
        const bool best = t.tokenizers.size() > 1 && std::stod(cell) == lowest;
        out += best ? " **" + cell + "** |" : " " + cell + " |";
      }
      out += "\n";
    }
  }
  if (!t.errors.empty()) {
    out += "\nSpecs that failed:\n\n";
    for (const auto& e : t.errors) out += "- " + e + "\n";
  }
  return out;
}

void write_fertility(const FertilityTable& t, const fs::path& dir) {
  write_text_file(dir / "fertility.json", to_json(t));
  write_text_file(dir / "fertility.csv", to_csv(t));
  write_text_file(dir / "fertility.md", to_markdown(t));
}

}  // namespace indicgec::runner
