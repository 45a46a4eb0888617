#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "indicgec/corpus/corpus.hpp"
#include "indicgec/tokenize/bpe.hpp"

namespace indicgec::runner {

// "Devanagari", "Eastern Nagari", "Dravidian" (Tamil, Telugu, Malayalam) or "Other".
std::string script_family(corpus::Script script);

struct FertilityRow {
  std::string language;  // code
  std::string script_family;
  std::string tokenizer;
  std::size_t n_words = 0;
  std::size_t n_tokens = 0;
  double fertility = 0.0;
};

struct FertilityTable {
  std::string split;
  std::string side;
  std::vector<std::string> languages;   // column order of the rows
  std::vector<std::string> tokenizers;  // specs that loaded, in config order
  std::vector<FertilityRow> rows;
  // One message per spec that failed to load or encode.
  std::vector<std::string> errors;
};

// One row per (corpus, loadable spec). A spec that fails is reported in
// `errors` and skipped; the others are still computed.
FertilityTable compute_fertility(const std::vector<corpus::Corpus>& corpora,
                                 const std::vector<std::filesystem::path>& specs,
                                 tokenize::Side side);

std::string to_json(const FertilityTable& t);
FertilityTable fertility_from_json(std::string_view text, const std::string& origin);
std::string to_csv(const FertilityTable& t);
// Language | Script Family | one column per tokenizer; lowest value per row in bold.
std::string to_markdown(const FertilityTable& t);

// Writes <dir>/fertility.{json,csv,md}.
void write_fertility(const FertilityTable& t, const std::filesystem::path& dir);

}  // namespace indicgec::runner
