#include "indicgec/prompting/cache.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "indicgec/corpus/corpus.hpp"
#include "indicgec/error.hpp"

namespace indicgec::prompting {

namespace fs = std::filesystem;

namespace {

void check_key(const std::string& key) {
  const bool ok = !key.empty() && key.find_first_not_of("0123456789abcdef") == std::string::npos;
  if (!ok) throw Error("invalid cache key \"" + key + "\"");
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

Cache::Cache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw ConfigError("cannot create cache directory " + dir_.string() + ": " + ec.message());
  }
}

fs::path Cache::path_for(const std::string& key) const {
  check_key(key);
  return dir_ / (key + ".json");
}

bool Cache::contains(const std::string& key) const { return fs::exists(path_for(key)); }

std::optional<CacheRecord> Cache::load(const std::string& key) const {
  const auto path = path_for(key);
  if (!fs::exists(path)) return std::nullopt;
  const auto bytes = corpus::read_file_bytes(path);
  try {
    const auto j = nlohmann::json::parse(bytes);
    CacheRecord r;
    r.request = j.at("request").dump();
    r.raw_text = j.at("raw_text").get<std::string>();
    r.normalized_text = j.at("normalized_text").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.provider_meta = j.at("provider_meta").get<std::map<std::string, std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": corrupt cache entry: " + e.what());
  }
}

void Cache::store(const std::string& key, const CacheRecord& r) const {
  const auto path = path_for(key);
  nlohmann::json j;
  try {
    j["request"] = nlohmann::json::parse(r.request);
  } catch (const nlohmann::json::exception&) {
    j["request"] = r.request;
  }
  j["raw_text"] = r.raw_text;
  j["normalized_text"] = r.normalized_text;
  j["timestamp"] = r.timestamp;
  j["provider_meta"] = r.provider_meta;

  static std::atomic<unsigned long> counter{0};
  const auto tmp = dir_ / fmt::format(".{}.{}.{}.tmp", key,
                                      std::hash<std::thread::id>{}(std::this_thread::get_id()),
                                      counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    out.close();
    if (!out) throw Error("cannot write cache entry " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move cache entry into place at " + path.string() + ": " + ec.message());
  }
}

}  // namespace indicgec::prompting
