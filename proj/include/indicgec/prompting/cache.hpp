#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace indicgec::prompting {

struct CacheRecord {
  std::string request;  // canonical request JSON
  std::string raw_text;
  std::string normalized_text;
  std::string timestamp;  // UTC, ISO 8601
  std::map<std::string, std::string> provider_meta;

  bool operator==(const CacheRecord&) const = default;
};

// Content-addressed response store: one "<key>.json" file per request in a
// single directory. Writes go through a temporary file and a rename, so
// concurrent writers and interrupted runs never leave partial entries.
// Credentials never reach this layer.
class Cache {
 public:
  // Creates the directory when missing.
  explicit Cache(std::filesystem::path dir);

  std::optional<CacheRecord> load(const std::string& key) const;
  void store(const std::string& key, const CacheRecord& record) const;
  bool contains(const std::string& key) const;

  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

std::string utc_timestamp();

}  // namespace indicgec::prompting
