#include "indicgec/runner/commands.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "indicgec/error.hpp"
#include "indicgec/metrics/gleu.hpp"
#include "indicgec/prompting/cache.hpp"
#include "indicgec/prompting/correct.hpp"
#include "indicgec/runner/embedding.hpp"
#include "indicgec/runner/evaluate.hpp"
#include "indicgec/runner/fertility.hpp"
#include "indicgec/text.hpp"

namespace indicgec::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ostream& out_of(const Context& ctx) { return ctx.out ? *ctx.out : std::cout; }
std::ostream& err_of(const Context& ctx) { return ctx.err ? *ctx.err : std::cerr; }

void say(const Context& ctx, const std::string& line) {
  if (!ctx.quiet) out_of(ctx) << line << '\n';
}

corpus::Corpus load_corpus(const RunConfig& c, const corpus::Language& lang, corpus::Split split) {
  return corpus::load_two_column(c.corpus_path(lang, split), lang, split, c.format, c.load);
}

std::map<std::string, std::string> base_metadata(const RunConfig& c) {
  return {{"created_at", prompting::utc_timestamp()},
          {"config_path", c.config_path.string()},
          {"tool_version", std::string(kToolVersion)}};
}

json decoding_json(const SystemConfig& s) {
  return {{"model_id", s.model_id},
          {"temperature", s.temperature},
          {"max_output_tokens", s.max_output_tokens ? json(*s.max_output_tokens) : json("4x input codepoints")}};
}

json exemplars_json(const std::optional<prompting::ExemplarSet>& set) {
  if (!set) return nullptr;
  json pairs = json::array();
  for (const auto& e : set->exemplars) pairs.push_back({{"erroneous", e.erroneous}, {"corrected", e.corrected}});
  return {{"provenance", prompting::to_string(set->provenance)},
          {"seed", set->seed ? json(*set->seed) : json(nullptr)},
          {"k", set->k},
          {"pairs", pairs}};
}

std::optional<prompting::ExemplarSet> load_exemplars(const RunConfig& c, const SystemConfig& s,
                                                     const corpus::Language& lang) {
  if (!s.exemplars) return std::nullopt;
  const auto& spec = *s.exemplars;
  const auto train = load_corpus(c, lang, corpus::Split::Train);
  if (spec.mode == prompting::SelectionMode::RandomSeeded) {
    return prompting::select_exemplars(train, spec.k, spec.mode, spec.seed.value_or(c.seed));
  }
  const fs::path path = prompting::substitute(spec.path_pattern, {{"lang", lang.code}});
  return prompting::select_exemplars(train, spec.k, spec.mode, path);
}

// Moves responses that cannot be written to a TSV row into the failures.
void reject_unwritable(prompting::CorpusRunResult& r) {
  for (auto it = r.responses.begin(); it != r.responses.end();) {
    if (it->second.normalized_text.find('\t') != std::string::npos) {
      r.failures[it->first] = {"unwritable", "response contains a tab", 200, it->second.raw_text};
      it = r.responses.erase(it);
    } else {
      ++it;
    }
  }
}

json failures_json(const std::string& lang, const std::string& system,
                   const std::map<std::string, prompting::ItemFailure>& failures) {
  json arr = json::array();
  for (const auto& [id, f] : failures) {
    arr.push_back({{"language", lang},
                   {"system", system},
                   {"id", id},
                   {"kind", f.kind},
                   {"status", f.status},
                   {"message", f.message}});
  }
  return arr;
}

}  // namespace

void apply(const Overrides& o, RunConfig& config) {
  if (o.output_dir) config.output_dir = fs::absolute(*o.output_dir);
  if (o.seed) config.seed = *o.seed;
  if (o.parallelism) {
    if (*o.parallelism == 0) throw ConfigError("--parallelism must be at least 1");
    config.parallelism = *o.parallelism;
  }
}

fs::path hypothesis_path(const RunConfig& c, std::string_view lang, std::string_view system) {
  return c.output_dir / "hypotheses" / std::string(lang) / (std::string(system) + ".tsv");
}

fs::path hypothesis_meta_path(const RunConfig& c, std::string_view lang, std::string_view system) {
  return c.output_dir / "hypotheses" / std::string(lang) / (std::string(system) + ".meta.json");
}

fs::path manifest_path(const RunConfig& c) { return c.output_dir / "correct_manifest.json"; }
fs::path evaluation_dir(const RunConfig& c) { return c.output_dir / "evaluation"; }
fs::path fertility_dir(const RunConfig& c) { return c.output_dir / "fertility"; }
fs::path report_dir(const RunConfig& c) { return c.output_dir / "report"; }

// ---- validate ----

int cmd_validate(const RunConfig& config, const Context& ctx) {
  // Missing corpora are already listed here.
  std::vector<std::string> problems = missing_files(config);

  std::vector<std::string> header = {"language"};
  for (const auto s : config.splits) header.emplace_back(corpus::to_string(s));
  std::vector<std::vector<std::string>> table;
  for (const auto& lang : config.languages) {
    std::vector<std::string> row = {lang.code};
    for (const auto split : config.splits) {
      const auto path = config.corpus_path(lang, split);
      if (!fs::exists(path)) {
        row.emplace_back("missing");
        continue;
      }
      try {
        const auto c = load_corpus(config, lang, split);
        std::size_t identity = 0;
        for (const auto& p : c.pairs()) identity += corpus::is_identity(p) ? 1 : 0;
        row.push_back(fmt::format("{} ({} identity)", c.size(), identity));
      } catch (const Error& e) {
        row.emplace_back("error");
        problems.emplace_back(e.what());
      }
    }
    table.push_back(std::move(row));
  }

  if (!ctx.quiet) {
    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = text::codepoint_count(header[i]);
    for (const auto& row : table) {
      for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], text::codepoint_count(row[i]));
    }
    const auto print = [&](const std::vector<std::string>& row) {
      std::string line;
      for (std::size_t i = 0; i < row.size(); ++i) {
        line += row[i] + std::string(width[i] - text::codepoint_count(row[i]) + 2, ' ');
      }
      out_of(ctx) << std::string(text::trim(line)) << '\n';
    };
    print(header);
    for (const auto& row : table) print(row);
  }
  for (const auto& p : problems) err_of(ctx) << "error: " << p << '\n';
  return problems.empty() ? kExitOk : kExitDataError;
}

// ---- correct ----

int cmd_correct(const RunConfig& config, const Context& ctx) {
  if (config.systems.empty()) throw ConfigError("no systems configured");
  const ClientFactory factory =
      ctx.make_client ? ctx.make_client
                      : [](const prompting::ProviderPreset& p) { return prompting::make_client(p); };

  // Credentials first, so a misnamed variable fails before any traffic.
  std::map<std::string, std::unique_ptr<prompting::ChatClient>> clients;
  std::map<std::string, std::unique_ptr<prompting::RateLimiter>> limiters;
  for (const auto& s : config.systems) {
    if (clients.contains(s.provider)) continue;
    const auto& preset = config.providers.at(s.provider);
    prompting::credential_from_env(preset);
    clients[s.provider] = factory(preset);
    limiters[s.provider] = std::make_unique<prompting::RateLimiter>(preset.rpm_limit, ctx.sleep);
  }

  std::vector<corpus::Corpus> corpora;
  for (const auto& lang : config.languages) corpora.push_back(load_corpus(config, lang, config.eval_split));

  const prompting::Cache cache(config.cache_dir);
  json outputs = json::array();
  json all_failures = json::array();
  const auto write_manifest = [&](const std::string& status) {
    const json doc = {{"schema_version", kSchemaVersion},
                      {"kind", "correct-manifest"},
                      {"status", status},
                      {"split", std::string(corpus::to_string(config.eval_split))},
                      {"failure_threshold", config.failure_threshold},
                      {"outputs", outputs},
                      {"failures", all_failures},
                      {"created_at", prompting::utc_timestamp()}};
    write_text_file(manifest_path(config), doc.dump(2) + "\n");
  };

  for (const auto& c : corpora) {
    const auto& lang = c.language();
    for (const auto& s : config.systems) {
      const auto exemplars = load_exemplars(config, s, lang);
      prompting::CorpusRunOptions opts;
      opts.parallelism = config.parallelism;
      opts.failure_threshold = config.failure_threshold;
      opts.correct.retry = config.retry;
      opts.correct.sleep = ctx.sleep;
      opts.correct.limiter = limiters.at(s.provider).get();
      opts.correct.jitter_seed = config.seed;
      opts.decoding = {s.model_id, s.temperature, s.max_output_tokens};

      prompting::CorpusRunResult result;
      bool breached = false;
      try {
        result = prompting::correct_corpus(c, config.templates.at(s.template_name), exemplars,
                                           *clients.at(s.provider), &cache, opts);
      } catch (const prompting::RunFailedError& e) {
        result = e.partial();
        breached = true;
      }
      reject_unwritable(result);
      breached = breached || result.failure_fraction() > config.failure_threshold;
      for (const auto& f : failures_json(lang.code, s.name, result.failures)) all_failures.push_back(f);

      if (breached) {
        outputs.push_back({{"language", lang.code},
                           {"system", s.name},
                           {"status", "failed"},
                           {"n_items", c.size()},
                           {"n_done", result.responses.size()},
                           {"n_failures", result.failures.size()}});
        write_manifest("failed");
        err_of(ctx) << fmt::format(
            "error: {}/{}: {} of {} items failed, above the threshold {}; finished items are cached, "
            "partial manifest at {}\n",
            lang.code, s.name, result.failures.size(), c.size(), config.failure_threshold,
            manifest_path(config).string());
        return kExitRunFailed;
      }

      std::vector<Hypothesis> rows;
      std::vector<std::string> keys;
      std::vector<std::string> fallback;
      for (const auto& p : c.pairs()) {
        const auto it = result.responses.find(p.id);
        if (it == result.responses.end()) {
          fallback.push_back(p.id);
          rows.push_back({p.id, p.source, p.source});
          continue;
        }
        keys.push_back(it->second.cache_key);
        rows.push_back({p.id, p.source, it->second.normalized_text});
      }
      std::sort(keys.begin(), keys.end());
      const auto path = hypothesis_path(config, lang.code, s.name);
      write_hypotheses(path, rows);
      const auto info = describe_system(config, s);
      const json meta = {{"schema_version", kSchemaVersion},
                         {"kind", "hypotheses-meta"},
                         {"language", lang.code},
                         {"system", s.name},
                         {"split", std::string(corpus::to_string(c.split()))},
                         {"provider", s.provider},
                         {"template", s.template_name},
                         {"template_digest", info.template_digest},
                         {"exemplars", exemplars_json(exemplars)},
                         {"decoding", decoding_json(s)},
                         {"n_items", c.size()},
                         {"n_from_cache", result.from_cache()},
                         {"fallback_to_source", fallback},
                         {"cache_keys", keys},
                         {"created_at", prompting::utc_timestamp()}};
      write_text_file(hypothesis_meta_path(config, lang.code, s.name), meta.dump(2) + "\n");
      outputs.push_back({{"language", lang.code},
                         {"system", s.name},
                         {"status", "complete"},
                         {"path", path.string()},
                         {"n_items", c.size()},
                         {"n_from_cache", result.from_cache()},
                         {"n_failures", result.failures.size()}});
      say(ctx, fmt::format("{}/{}: {} items, {} from cache, {} failed", lang.code, s.name, c.size(),
                           result.from_cache(), result.failures.size()));
    }
  }
  write_manifest("complete");
  return kExitOk;
}

// ---- evaluate ----

int cmd_evaluate(const RunConfig& config, const Context& ctx, const std::optional<fs::path>& hypothesis_dir) {
  if (config.systems.empty()) throw ConfigError("no systems configured");
  std::unique_ptr<EmbeddingProvider> embedder;
  if (config.metrics.bertscore) embedder = make_embedder(config.embedding);

  Evaluation e;
  e.gleu_variant = std::string(metrics::kGleuVariant);
  e.beta = config.metrics.beta;
  e.word_definition = std::string(kWordDefinition);
  e.embedding_provider = embedder ? embedder->name() : "";
  e.eval_split = std::string(corpus::to_string(config.eval_split));
  e.seed = config.seed;
  e.languages = config.languages;
  for (const auto& s : config.systems) e.systems.push_back(describe_system(config, s));

  for (const auto& lang : config.languages) {
    const auto c = load_corpus(config, lang, config.eval_split);
    for (const auto& s : config.systems) {
      const auto path = hypothesis_dir ? *hypothesis_dir / lang.code / (s.name + ".tsv")
                                       : hypothesis_path(config, lang.code, s.name);
      if (!fs::exists(path)) throw DataError(path.string() + ": hypothesis file not found");
      std::map<std::string, std::string> hyps;
      for (auto& h : read_hypotheses(path)) {
        const auto* pair = c.find(h.id);
        if (pair == nullptr) throw DataError(path.string() + ": id " + h.id + " is not in the corpus");
        if (pair->source != h.source) {
          throw DataError(path.string() + ": id " + h.id + ": source column differs from the corpus");
        }
        hyps.emplace(h.id, std::move(h.hypothesis));
      }
      for (const auto& p : c.pairs()) {
        if (!hyps.contains(p.id)) throw DataError(path.string() + ": missing hypothesis for id " + p.id);
      }
      auto row = evaluate_system(c, hyps, config.metrics, embedder.get());
      row.system = s.name;
      row.hypotheses_sha256 = text::sha256_hex(corpus::read_file_bytes(path));
      auto meta_path = path;
      meta_path.replace_extension(".meta.json");
      if (fs::exists(meta_path)) {
        try {
          row.cache_keys = json::parse(corpus::read_file_bytes(meta_path))
                               .at("cache_keys")
                               .get<std::vector<std::string>>();
        } catch (const json::exception& ex) {
          throw DataError(meta_path.string() + ": " + ex.what());
        }
      }
      e.rows.push_back(std::move(row));
    }
  }
  e.run_metadata = base_metadata(config);
  write_evaluation(e, evaluation_dir(config));
  if (!ctx.quiet) out_of(ctx) << to_markdown(e);
  return kExitOk;
}

// ---- fertility ----

int cmd_fertility(const RunConfig& config, const Context& ctx) {
  if (config.tokenizers.empty()) throw ConfigError("no tokenizer specs configured");
  std::vector<corpus::Corpus> corpora;
  for (const auto& lang : config.languages) corpora.push_back(load_corpus(config, lang, config.fertility_split));
  const auto t = compute_fertility(corpora, config.tokenizers, config.fertility_side);
  write_fertility(t, fertility_dir(config));
  if (!ctx.quiet) out_of(ctx) << to_markdown(t);
  for (const auto& msg : t.errors) err_of(ctx) << "error: " << msg << '\n';
  return t.errors.empty() ? kExitOk : kExitDataError;
}

// ---- report ----

int cmd_report(const RunConfig& config, const Context& ctx, const std::vector<fs::path>& evaluations,
               const std::optional<fs::path>& fertility) {
  auto inputs = evaluations;
  if (inputs.empty()) inputs.push_back(evaluation_dir(config) / "evaluation.json");
  std::vector<Evaluation> docs;
  std::vector<std::string> names;
  for (const auto& p : inputs) {
    docs.push_back(evaluation_from_json(corpus::read_file_bytes(p), p.string()));
    names.push_back(p.filename().string() == "evaluation.json" && p.has_parent_path()
                        ? p.parent_path().filename().string() + "/" + p.filename().string()
                        : p.filename().string());
  }
  auto report = merge_evaluations(docs, names);
  auto fert = fertility;
  if (!fert && fs::exists(fertility_dir(config) / "fertility.json")) fert = fertility_dir(config) / "fertility.json";
  if (fert) report.fertility = fertility_from_json(corpus::read_file_bytes(*fert), fert->string());
  report.merged.run_metadata = {{"created_at", prompting::utc_timestamp()},
                                {"tool_version", std::string(kToolVersion)}};
  write_report(report, report_dir(config));
  if (!ctx.quiet) out_of(ctx) << to_markdown(report);
  return kExitOk;
}

int guarded(const Context& ctx, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err_of(ctx) << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err_of(ctx) << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace indicgec::runner
