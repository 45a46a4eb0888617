#include "indicgec/corpus/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "indicgec/error.hpp"
#include "indicgec/text.hpp"

namespace indicgec::corpus {

namespace {

constexpr std::array<std::pair<Script, std::string_view>, 6> kScriptNames{{
    {Script::Devanagari, "Devanagari"},
    {Script::EasternNagari, "EasternNagari"},
    {Script::Tamil, "Tamil"},
    {Script::Telugu, "Telugu"},
    {Script::Malayalam, "Malayalam"},
    {Script::Other, "Other"},
}};

std::string row_prefix(std::size_t row) { return "row " + std::to_string(row) + ": "; }

std::string make_id(Split split, std::size_t index) {
  return std::string(to_string(split)) + "-" + std::to_string(index);
}

std::string maybe_nfc(std::string s, const LoadOptions& options) {
  return options.nfc ? text::to_nfc(s) : s;
}

void check_utf8(std::string_view field, const std::string& where) {
  const auto bad = text::find_invalid_utf8(field);
  if (bad != std::string_view::npos) {
    throw DataError(where + "invalid UTF-8 at byte " + std::to_string(bad) +
                    " (input must be valid UTF-8)");
  }
}

}  // namespace

std::string_view to_string(Script script) {
  for (const auto& [s, name] : kScriptNames) {
    if (s == script) return name;
  }
  return "Other";
}

Script parse_script(std::string_view name) {
  for (const auto& [s, n] : kScriptNames) {
    if (n == name) return s;
  }
  throw ConfigError("unknown script: " + std::string(name));
}

Language make_language(std::string code, std::string display_name, Script script) {
  if (code.empty()) throw ConfigError("language code must be nonempty");
  for (const char c : code) {
    const auto uc = static_cast<unsigned char>(c);
    if (uc >= 0x80 || !(std::islower(uc) || std::isdigit(uc) || c == '_' || c == '-')) {
      throw ConfigError("language code must be lowercase ASCII: " + code);
    }
  }
  if (display_name.empty()) display_name = code;
  return Language{std::move(code), std::move(display_name), script};
}

std::optional<Language> preset_language(std::string_view code) {
  if (code == "tam") return Language{"tam", "Tamil", Script::Tamil};
  if (code == "mal") return Language{"mal", "Malayalam", Script::Malayalam};
  if (code == "hi") return Language{"hi", "Hindi", Script::Devanagari};
  if (code == "bn") return Language{"bn", "Bangla", Script::EasternNagari};
  if (code == "tel") return Language{"tel", "Telugu", Script::Telugu};
  return std::nullopt;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train:
      return "train";
    case Split::Dev:
      return "dev";
    case Split::Test:
      return "test";
  }
  return "test";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "dev") return Split::Dev;
  if (name == "test") return Split::Test;
  throw ConfigError("unknown split: " + std::string(name));
}

bool is_identity(const SentencePair& pair) {
  return text::trim(pair.source) == text::trim(pair.reference);
}

Corpus::Corpus(Language language, Split split, std::vector<SentencePair> pairs)
    : language_(std::move(language)), split_(split), pairs_(std::move(pairs)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& p : pairs_) {
    if (!seen.insert(p.id).second) throw DataError("duplicate pair id: " + p.id);
  }
}

const SentencePair* Corpus::find(std::string_view id) const {
  const auto it = std::find_if(pairs_.begin(), pairs_.end(),
                               [&](const SentencePair& p) { return p.id == id; });
  return it == pairs_.end() ? nullptr : &*it;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string_view> split_lines(std::string_view data) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t end = data.find('\n', start);
    const bool last = end == std::string_view::npos;
    if (last) end = data.size();
    std::string_view line = data.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view data) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_open = false;
  std::size_t i = 0;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_open = false;
  };

  while (i < data.size()) {
    const char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        if (i < data.size() && data[i] != ',' && data[i] != '\n' && data[i] != '\r') {
          throw DataError(row_prefix(records.size() + 1) +
                          "unexpected character after closing quote");
        }
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    record_open = true;
    if (c == '"' && field.empty() && !field_was_quoted) {
      in_quotes = true;
      field_was_quoted = true;
      ++i;
    } else if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') {
      end_record();
      i += 2;
    } else if (c == '\n') {
      end_record();
      ++i;
    } else {
      field.push_back(c);
      ++i;
    }
  }
  if (in_quotes) {
    throw DataError(row_prefix(records.size() + 1) + "unterminated quoted field");
  }
  if (record_open) end_record();
  return records;
}

std::string csv_escape(std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                            (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Corpus load_two_column(const std::filesystem::path& path, const Language& language,
                       Split split, FileFormat format, const LoadOptions& options) {
  const std::string data = read_file_bytes(path);
  if (data.empty()) throw DataError(path.string() + ": empty file");

  std::vector<std::vector<std::string>> records;
  if (format == FileFormat::Tsv) {
    for (const auto line : split_lines(data)) {
      std::vector<std::string> fields;
      std::size_t start = 0;
      while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
          fields.emplace_back(line.substr(start));
          break;
        }
        fields.emplace_back(line.substr(start, tab - start));
        start = tab + 1;
      }
      records.push_back(std::move(fields));
    }
  } else {
    try {
      records = parse_csv(data);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }

  const std::size_t first = options.has_header ? 1 : 0;
  if (records.size() <= first) throw DataError(path.string() + ": empty file");

  std::vector<SentencePair> pairs;
  pairs.reserve(records.size() - first);
  for (std::size_t r = first; r < records.size(); ++r) {
    const std::size_t row = r - first + 1;
    const auto& fields = records[r];
    const std::string where = path.string() + ": " + row_prefix(row);
    if (fields.size() != 2) {
      throw DataError(where + "expected 2 fields, got " + std::to_string(fields.size()));
    }
    check_utf8(fields[0], where);
    check_utf8(fields[1], where);
    if (text::trim(fields[0]).empty()) throw DataError(where + "empty source");
    if (text::trim(fields[1]).empty()) throw DataError(where + "empty reference");
    pairs.push_back(SentencePair{make_id(split, row), maybe_nfc(fields[0], options),
                                 maybe_nfc(fields[1], options), language});
  }
  return Corpus(language, split, std::move(pairs));
}

Corpus load_src_tgt(const std::filesystem::path& src_path,
                    const std::filesystem::path& tgt_path, const Language& language,
                    Split split, const LoadOptions& options) {
  const std::string src_data = read_file_bytes(src_path);
  const std::string tgt_data = read_file_bytes(tgt_path);
  const auto src = split_lines(src_data);
  const auto tgt = split_lines(tgt_data);
  if (src.size() != tgt.size()) {
    throw DataError("line count mismatch " + std::to_string(src.size()) + " vs " +
                    std::to_string(tgt.size()) + " (" + src_path.string() + ", " +
                    tgt_path.string() + ")");
  }
  if (src.empty()) throw DataError(src_path.string() + ": empty file");

  std::vector<SentencePair> pairs;
  pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::string line = std::to_string(i + 1);
    check_utf8(src[i], src_path.string() + ": line " + line + ": ");
    check_utf8(tgt[i], tgt_path.string() + ": line " + line + ": ");
    if (text::trim(src[i]).empty()) throw DataError("empty source at line " + line);
    if (text::trim(tgt[i]).empty()) throw DataError("empty reference at line " + line);
    pairs.push_back(SentencePair{make_id(split, i + 1), maybe_nfc(std::string(src[i]), options),
                                 maybe_nfc(std::string(tgt[i]), options), language});
  }
  return Corpus(language, split, std::move(pairs));
}

void write_two_column(const Corpus& corpus, const std::filesystem::path& path,
                      FileFormat format) {
  std::ostringstream out;
  for (const auto& p : corpus.pairs()) {
    if (format == FileFormat::Tsv) {
      for (const auto* field : {&p.source, &p.reference}) {
        if (field->find_first_of("\t\r\n") != std::string::npos) {
          throw DataError("pair " + p.id + ": TSV fields cannot contain tabs or line breaks");
        }
      }
      out << p.source << '\t' << p.reference << '\n';
    } else {
      out << csv_escape(p.source) << ',' << csv_escape(p.reference) << "\r\n";
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write " + path.string());
  file << out.str();
}

CorpusStats stats(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("stats of an empty corpus");
  CorpusStats s;
  s.n_pairs = corpus.size();
  std::size_t codepoints = 0;
  std::size_t words = 0;
  for (const auto& p : corpus.pairs()) {
    if (is_identity(p)) ++s.n_identity;
    codepoints += text::codepoint_count(p.source);
    words += text::split_whitespace(p.source).size();
  }
  s.mean_source_codepoints = static_cast<double>(codepoints) / static_cast<double>(s.n_pairs);
  s.mean_source_words = static_cast<double>(words) / static_cast<double>(s.n_pairs);
  return s;
}

Corpus identity_subset(const Corpus& corpus) {
  std::vector<SentencePair> kept;
  std::copy_if(corpus.pairs().begin(), corpus.pairs().end(), std::back_inserter(kept),
               is_identity);
  return Corpus(corpus.language(), corpus.split(), std::move(kept));
}

}  // namespace indicgec::corpus
