#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "indicgec/runner/commands.hpp"
#include "indicgec/runner/config.hpp"

namespace fs = std::filesystem;
using namespace indicgec::runner;

int main(int argc, char** argv) {
  CLI::App app{"Indic grammatical error correction: data checks, LLM correction, scoring and reports"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string config_path = "indicgec.json";
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
  bool quiet = false;
  app.add_option("--config", config_path, "Run configuration (JSON)")->capture_default_str();
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--seed", seed, "Run seed (overrides the config)");
  app.add_option("--parallelism", parallelism, "Requests in flight (overrides the config)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Print errors only");

  auto* validate = app.add_subcommand("validate", "Load every configured corpus and print counts");
  auto* correct = app.add_subcommand("correct", "Correct the evaluation split with every system");
  auto* evaluate = app.add_subcommand("evaluate", "Score hypothesis files");
  std::optional<std::string> hyp_dir;
  evaluate->add_option("--hypotheses", hyp_dir, "Directory with <lang>/<system>.tsv files");
  auto* fertility = app.add_subcommand("fertility", "Tokenizer fertility per language");
  auto* report = app.add_subcommand("report", "Merge evaluation outputs into one report");
  std::vector<std::string> eval_inputs;
  std::optional<std::string> fert_input;
  report->add_option("--evaluation", eval_inputs, "evaluation.json files (repeatable)");
  report->add_option("--fertility", fert_input, "fertility.json file");

  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.quiet = quiet;
  return guarded(ctx, [&] {
    auto config = load_config(config_path);
    Overrides o;
    if (out_dir) o.output_dir = fs::path(*out_dir);
    o.seed = seed;
    o.parallelism = parallelism;
    apply(o, config);
    if (validate->parsed()) return cmd_validate(config, ctx);
    if (correct->parsed()) return cmd_correct(config, ctx);
    if (evaluate->parsed()) {
      return cmd_evaluate(config, ctx, hyp_dir ? std::optional<fs::path>(*hyp_dir) : std::nullopt);
    }
    if (fertility->parsed()) return cmd_fertility(config, ctx);
    std::vector<fs::path> inputs(eval_inputs.begin(), eval_inputs.end());
    return cmd_report(config, ctx, inputs, fert_input ? std::optional<fs::path>(*fert_input) : std::nullopt);
  });
}
