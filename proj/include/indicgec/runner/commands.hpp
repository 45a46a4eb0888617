#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "indicgec/prompting/client.hpp"
#include "indicgec/prompting/retry.hpp"
#include "indicgec/runner/config.hpp"
#include "indicgec/runner/report.hpp"

namespace indicgec::runner {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRunFailed = 3;

struct Overrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
};

void apply(const Overrides& o, RunConfig& config);

using ClientFactory = std::function<std::unique_ptr<prompting::ChatClient>(const prompting::ProviderPreset&)>;

struct Context {
  std::ostream* out = nullptr;  // stdout when null
  std::ostream* err = nullptr;  // stderr when null
  bool quiet = false;
  // Defaults to prompting::make_client.
  ClientFactory make_client;
  prompting::Sleeper sleep = prompting::real_sleep;
};

// Output layout below RunConfig::output_dir.
std::filesystem::path hypothesis_path(const RunConfig& c, std::string_view lang, std::string_view system);
std::filesystem::path hypothesis_meta_path(const RunConfig& c, std::string_view lang, std::string_view system);
std::filesystem::path manifest_path(const RunConfig& c);
std::filesystem::path evaluation_dir(const RunConfig& c);
std::filesystem::path fertility_dir(const RunConfig& c);
std::filesystem::path report_dir(const RunConfig& c);

// Loads every configured (language, split) and prints pair and identity
// counts. Problems are printed per file; any problem gives kExitDataError.
int cmd_validate(const RunConfig& config, const Context& ctx);

// Checks every system's credential before the first request, then writes
// one hypothesis file and one metadata file per (language, system) plus a
// run manifest. A failure-threshold breach writes a partial manifest and
// returns kExitRunFailed.
int cmd_correct(const RunConfig& config, const Context& ctx);

// Scores hypothesis files (from `hypothesis_dir`, default the correct
// output) and writes the evaluation bundle.
int cmd_evaluate(const RunConfig& config, const Context& ctx,
                 const std::optional<std::filesystem::path>& hypothesis_dir = std::nullopt);

// Writes the fertility bundle. Returns kExitDataError when any spec failed,
// after computing the rest.
int cmd_fertility(const RunConfig& config, const Context& ctx);

// Merges evaluation outputs (default: the evaluate output) and an optional
// fertility output (default: the fertility output when present).
int cmd_report(const RunConfig& config, const Context& ctx,
               const std::vector<std::filesystem::path>& evaluations = {},
               const std::optional<std::filesystem::path>& fertility = std::nullopt);

// Runs `body` and maps exceptions to exit codes with a message on ctx.err.
int guarded(const Context& ctx, const std::function<int()>& body);

}  // namespace indicgec::runner
