#include "indicgec/tokenize/bpe.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <functional>
#include <limits>
#include <json.hpp>

#include "indicgec/error.hpp"
#include "indicgec/text.hpp"

namespace indicgec::tokenize {

using json = nlohmann::json;

namespace {

constexpr std::size_t kNoRank = std::numeric_limits<std::size_t>::max();

std::string_view kind_name(TokenizerKind kind) {
  return kind == TokenizerKind::ByteBpe ? "ByteBpe" : "WordPerToken";
}

}  // namespace

void validate(const TokenizerSpec& spec) {
  for (std::size_t i = 0; i < spec.merges.size(); ++i) {
    const auto& [left, right] = spec.merges[i];
    if (left.empty() || right.empty()) {
      throw DataError(spec.name + ": merge " + std::to_string(i) + " has an empty side");
    }
    if (!spec.vocab.contains(left + right)) {
      throw DataError(spec.name + ": merge " + std::to_string(i) + " result \"" +
                      text::escape_bytes(left + right) + "\" is not in the vocab");
    }
  }
}

TokenizerSpec parse_tokenizer_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError(std::string("tokenizer spec is not valid JSON: ") + e.what());
  }
  TokenizerSpec spec;
  try {
    spec.name = doc.at("name").get<std::string>();
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "ByteBpe") {
      spec.kind = TokenizerKind::ByteBpe;
    } else if (kind == "WordPerToken") {
      spec.kind = TokenizerKind::WordPerToken;
    } else {
      throw DataError("unknown tokenizer kind: " + kind);
    }
    if (doc.contains("vocab")) {
      for (const auto& [key, id] : doc.at("vocab").items()) {
        spec.vocab.emplace(text::base64_decode(key), id.get<TokenId>());
      }
    }
    if (doc.contains("merges")) {
      for (const auto& m : doc.at("merges")) {
        if (!m.is_array() || m.size() != 2) throw DataError("merge entries must be pairs");
        spec.merges.emplace_back(text::base64_decode(m[0].get<std::string>()),
                                 text::base64_decode(m[1].get<std::string>()));
      }
    }
    if (doc.contains("special_tokens")) {
      for (const auto& t : doc.at("special_tokens")) spec.special_tokens.insert(t.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed tokenizer spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

TokenizerSpec load_tokenizer_spec(const std::filesystem::path& path) {
  try {
    return parse_tokenizer_spec(corpus::read_file_bytes(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string dump_tokenizer_spec(const TokenizerSpec& spec) {
  json vocab = json::object();
  for (const auto& [bytes, id] : spec.vocab) vocab[text::base64_encode(bytes)] = id;
  json merges = json::array();
  for (const auto& [l, r] : spec.merges) {
    merges.push_back({text::base64_encode(l), text::base64_encode(r)});
  }
  json doc = {{"name", spec.name},
              {"kind", kind_name(spec.kind)},
              {"vocab", std::move(vocab)},
              {"merges", std::move(merges)},
              {"special_tokens", spec.special_tokens}};
  return doc.dump(1);
}

std::vector<std::string_view> pretokenize(std::string_view text) {
  std::vector<std::string_view> pieces;
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  std::size_t piece_start = 0;
  bool seen_content = false;
  int32_t i = 0;
  while (i < length) {
    const auto start = static_cast<std::size_t>(i);
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    const bool ws = c >= 0 && u_isUWhiteSpace(c);
    if (ws && seen_content) {
      pieces.push_back(text.substr(piece_start, start - piece_start));
      piece_start = start;
      seen_content = false;
    } else if (!ws) {
      seen_content = true;
    }
  }
  if (piece_start < text.size()) pieces.push_back(text.substr(piece_start));
  return pieces;
}

std::size_t BpeEncoder::PairHash::operator()(const MergeRule& p) const noexcept {
  const std::size_t h1 = std::hash<std::string>{}(p.first);
  const std::size_t h2 = std::hash<std::string>{}(p.second);
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

BpeEncoder::BpeEncoder(const TokenizerSpec& spec) : spec_(&spec) {
  if (spec.kind != TokenizerKind::ByteBpe) {
    throw Error(spec.name + ": BPE encoding requires a ByteBpe tokenizer");
  }
  ranks_.reserve(spec.merges.size());
  for (std::size_t rank = 0; rank < spec.merges.size(); ++rank) {
    // First occurrence wins if a rule is listed twice.
    ranks_.emplace(spec.merges[rank], rank);
  }
}

void BpeEncoder::merge_piece(std::string_view piece, std::vector<std::string>& out) const {
  std::vector<std::string> symbols;
  symbols.reserve(piece.size());
  for (const char b : piece) symbols.emplace_back(1, b);

  while (symbols.size() > 1) {
    std::size_t best = kNoRank;
    const MergeRule* best_rule = nullptr;
    MergeRule probe;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      probe.first = symbols[i];
      probe.second = symbols[i + 1];
      const auto it = ranks_.find(probe);
      if (it != ranks_.end() && it->second < best) {
        best = it->second;
        best_rule = &it->first;
      }
    }
    if (best_rule == nullptr) break;

    // Merge every occurrence of the winning rule left to right, then rescan.
    std::vector<std::string> merged;
    merged.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == best_rule->first &&
          symbols[i + 1] == best_rule->second) {
        merged.push_back(symbols[i] + symbols[i + 1]);
        i += 2;
      } else {
        merged.push_back(std::move(symbols[i]));
        ++i;
      }
    }
    symbols = std::move(merged);
  }
  for (auto& s : symbols) out.push_back(std::move(s));
}

std::vector<std::string> BpeEncoder::encode_bytes(std::string_view text) const {
  std::vector<std::string> out;
  auto encode_plain = [&](std::string_view segment) {
    for (const auto piece : pretokenize(segment)) merge_piece(piece, out);
  };

  std::size_t segment_start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::string* match = nullptr;
    for (const auto& special : spec_->special_tokens) {
      if (!special.empty() && text.substr(i).starts_with(special) &&
          (match == nullptr || special.size() > match->size())) {
        match = &special;
      }
    }
    if (match == nullptr) {
      ++i;
      continue;
    }
    encode_plain(text.substr(segment_start, i - segment_start));
    out.push_back(*match);
    i += match->size();
    segment_start = i;
  }
  encode_plain(text.substr(segment_start));

  for (const auto& token : out) {
    if (!spec_->vocab.contains(token)) {
      throw DataError(spec_->name + ": token bytes \"" + text::escape_bytes(token) +
                      "\" not in vocab");
    }
  }
  return out;
}

TokenSequence BpeEncoder::encode(std::string_view text) const {
  return TokenSequence{encode_bytes(text), Origin::Subword};
}

std::vector<TokenId> BpeEncoder::encode_ids(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const auto& token : encode_bytes(text)) ids.push_back(spec_->vocab.at(token));
  return ids;
}

TokenSequence bpe_encode(const TokenizerSpec& spec, std::string_view text) {
  return BpeEncoder(spec).encode(text);
}

FertilityReport fertility(const TokenizerSpec& spec, const corpus::Corpus& corpus, Side side) {
  if (corpus.empty()) throw DataError("fertility of an empty corpus");
  FertilityReport report{corpus.language(), spec.name, 0, 0, 0.0};

  std::optional<BpeEncoder> encoder;
  if (spec.kind == TokenizerKind::ByteBpe) encoder.emplace(spec);

  for (const auto& pair : corpus.pairs()) {
    const std::string& text = side == Side::Source ? pair.source : pair.reference;
    const std::size_t words = count_words(word_tokenize(text));
    report.n_words += words;
    report.n_subword_tokens += encoder ? encoder->encode(text).size() : words;
  }
  if (report.n_words == 0) {
    throw DataError("fertility: corpus " + corpus.language().code + " contains no words");
  }
  report.fertility =
      static_cast<double>(report.n_subword_tokens) / static_cast<double>(report.n_words);
  return report;
}

}  // namespace indicgec::tokenize
