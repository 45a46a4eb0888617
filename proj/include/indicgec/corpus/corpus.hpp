#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace indicgec::corpus {

enum class Script { Devanagari, EasternNagari, Tamil, Telugu, Malayalam, Other };

std::string_view to_string(Script script);
Script parse_script(std::string_view name);

struct Language {
  std::string code;  // nonempty lowercase ASCII, e.g. "hi"
  std::string display_name;
  Script script = Script::Other;

  friend bool operator==(const Language&, const Language&) = default;
};

// Validates the code and builds a Language. Throws ConfigError.
Language make_language(std::string code, std::string display_name, Script script);

// The five shared-task languages: tam, mal, hi, bn, tel.
std::optional<Language> preset_language(std::string_view code);

enum class Split { Train, Dev, Test };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

enum class FileFormat { Tsv, Csv };

struct SentencePair {
  std::string id;
  std::string source;     // erroneous sentence, exactly as read
  std::string reference;  // gold correction, exactly as read
  Language language;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

// source == reference after whitespace trim.
bool is_identity(const SentencePair& pair);

// An ordered parallel corpus for one language and split. Immutable once built;
// the constructor enforces unique ids.
class Corpus {
 public:
  Corpus(Language language, Split split, std::vector<SentencePair> pairs);

  const Language& language() const noexcept { return language_; }
  Split split() const noexcept { return split_; }
  const std::vector<SentencePair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

  // nullptr when absent.
  const SentencePair* find(std::string_view id) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  Language language_;
  Split split_;
  std::vector<SentencePair> pairs_;
};

struct CorpusStats {
  std::size_t n_pairs = 0;
  std::size_t n_identity = 0;
  double mean_source_codepoints = 0.0;
  double mean_source_words = 0.0;  // whitespace-delimited chunks
};

struct LoadOptions {
  bool has_header = false;
  // Explicit NFC normalization of both columns; off by default so that text
  // reaches the metrics byte-for-byte.
  bool nfc = false;
};

// One record per row; ids are "<split>-<row>" with 1-based data-row numbers.
// Throws DataError naming the row on malformed input.
Corpus load_two_column(const std::filesystem::path& path, const Language& language,
                       Split split, FileFormat format, const LoadOptions& options = {});

// Line-aligned .src/.tgt files.
Corpus load_src_tgt(const std::filesystem::path& src_path,
                    const std::filesystem::path& tgt_path, const Language& language,
                    Split split, const LoadOptions& options = {});

// Inverse of load_two_column (no header). TSV refuses fields containing
// tabs or line breaks.
void write_two_column(const Corpus& corpus, const std::filesystem::path& path,
                      FileFormat format);

// Throws DataError on an empty corpus.
CorpusStats stats(const Corpus& corpus);

// Pairs whose reference equals the source; order preserved, may be empty.
Corpus identity_subset(const Corpus& corpus);

// Shared low-level readers, also used for hypothesis and exemplar files.
std::string read_file_bytes(const std::filesystem::path& path);
// Splits on LF, dropping one trailing CR per line and the empty piece after a
// final newline.
std::vector<std::string_view> split_lines(std::string_view data);
// RFC 4180 records. Throws DataError on unterminated quotes.
std::vector<std::vector<std::string>> parse_csv(std::string_view data);
std::string csv_escape(std::string_view field);

}  // namespace indicgec::corpus
