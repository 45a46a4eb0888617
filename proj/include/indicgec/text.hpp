#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by every module. All strings in the library are UTF-8
// encoded std::string; nothing here normalizes text unless asked to.
namespace indicgec::text {

// Returns the byte offset of the first ill-formed sequence, or npos.
std::size_t find_invalid_utf8(std::string_view s);
inline bool is_valid_utf8(std::string_view s) {
  return find_invalid_utf8(s) == std::string_view::npos;
}

std::vector<char32_t> decode(std::string_view s);
std::string encode(char32_t cp);
std::size_t codepoint_count(std::string_view s);

// Unicode White_Space property.
bool is_whitespace(char32_t cp);
// General category P*, which covers danda (U+0964) and double danda (U+0965).
bool is_punctuation(char32_t cp);
// True when every codepoint of a nonempty string is punctuation.
bool is_punctuation_only(std::string_view s);

// Strips leading/trailing White_Space codepoints.
std::string_view trim(std::string_view s);

// Splits on runs of White_Space; no empty pieces.
std::vector<std::string_view> split_whitespace(std::string_view s);

std::string to_nfc(std::string_view s);

// Printable rendering of arbitrary bytes for error messages, e.g. "ab\xE0".
std::string escape_bytes(std::string_view s);

std::string base64_encode(std::string_view bytes);
// Throws DataError on malformed input.
std::string base64_decode(std::string_view b64);

std::string sha256_hex(std::string_view bytes);

}  // namespace indicgec::text
