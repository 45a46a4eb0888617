#include "indicgec/runner/evaluate.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "indicgec/error.hpp"
#include "indicgec/metrics/bertscore.hpp"
#include "indicgec/metrics/compliance.hpp"
#include "indicgec/metrics/edits.hpp"
#include "indicgec/metrics/gleu.hpp"
#include "indicgec/text.hpp"
#include "indicgec/tokenize/tokenize.hpp"

namespace indicgec::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string md_cell(std::string s) {
  std::string out;
  for (const char c : s) {
    if (c == '|') out += "\\|";
    else out.push_back(c);
  }
  return out;
}

}  // namespace

std::string fixed2(double v) { return fmt::format("{:.2f}", v); }

void write_text_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << contents;
    out.close();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

// ---- hypothesis files ----

std::vector<Hypothesis> read_hypotheses(const fs::path& path) {
  const auto bytes = corpus::read_file_bytes(path);
  if (const auto bad = text::find_invalid_utf8(bytes); bad != std::string::npos) {
    throw DataError(path.string() + ": invalid UTF-8 at byte " + std::to_string(bad));
  }
  std::vector<Hypothesis> rows;
  std::set<std::string> ids;
  std::size_t row = 0;
  for (const auto line : corpus::split_lines(bytes)) {
    ++row;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.emplace_back(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    const auto where = path.string() + ": row " + std::to_string(row);
    if (fields.size() != 3) {
      throw DataError(where + ": expected 3 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw DataError(where + ": empty id");
    if (text::trim(fields[2]).empty()) throw DataError(where + ": empty hypothesis");
    if (!ids.insert(fields[0]).second) throw DataError(where + ": duplicate id " + fields[0]);
    rows.push_back({fields[0], fields[1], fields[2]});
  }
  return rows;
}

void write_hypotheses(const fs::path& path, const std::vector<Hypothesis>& rows) {
  std::string out;
  for (const auto& r : rows) {
    for (const auto* f : {&r.id, &r.source, &r.hypothesis}) {
      if (f->find_first_of("\t\r\n") != std::string::npos) {
        throw DataError("hypothesis row " + r.id + ": field contains a tab or line break");
      }
    }
    out += r.id + '\t' + r.source + '\t' + r.hypothesis + '\n';
  }
  write_text_file(path, out);
}

// ---- scoring ----

EvalRow evaluate_system(const corpus::Corpus& c, const std::map<std::string, std::string>& hyps,
                        const MetricToggles& metrics, EmbeddingProvider* embedder) {
  if (c.empty()) throw DataError("cannot evaluate an empty corpus");
  EvalRow row;
  row.language = c.language().code;
  row.n_pairs = c.size();
  std::vector<const std::string*> outputs;
  outputs.reserve(c.size());
  for (const auto& p : c.pairs()) {
    const auto it = hyps.find(p.id);
    if (it == hyps.end()) throw DataError("no hypothesis for id " + p.id);
    outputs.push_back(&it->second);
    if (corpus::is_identity(p)) ++row.n_identity;
  }

  std::vector<metrics::GleuItem> items;
  items.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& p = c.pairs()[i];
    items.push_back({tokenize::word_tokenize(p.source, c.language()),
                     tokenize::word_tokenize(*outputs[i], c.language()),
                     tokenize::word_tokenize(p.reference, c.language())});
  }

  if (metrics.gleu) row.gleu = 100.0 * metrics::gleu_corpus(items).score;

  if (metrics.f05) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& item : items) {
      const auto r = metrics::f_beta(metrics::extract_edits(item.source, item.hypothesis),
                                     metrics::extract_edits(item.source, item.reference),
                                     metrics.beta);
      tp += r.tp;
      fp += r.fp;
      fn += r.fn;
    }
    const auto r = metrics::f_beta_from_counts(tp, fp, fn, metrics.beta);
    row.f05 = FScoreSummary{100.0 * r.f_beta, 100.0 * r.precision, 100.0 * r.recall, tp, fp, fn};
  }

  if (metrics.bertscore) {
    if (embedder == nullptr) throw ConfigError("BERTScore is enabled but no embedding provider is set");
    double sum = 0.0;
    for (const auto& item : items) {
      sum += metrics::bertscore(embedder->embed(item.hypothesis.tokens),
                                embedder->embed(item.reference.tokens))
                 .f1;
    }
    row.bertscore_f1 = 100.0 * sum / static_cast<double>(items.size());
  }

  if (metrics.compliance) {
    const auto r = metrics::identity_compliance(corpus::identity_subset(c), hyps);
    row.compliance = ComplianceSummary{r.rate, r.n_pairs, r.n_unchanged, r.vacuous};
  }
  return row;
}

SystemInfo describe_system(const RunConfig& config, const SystemConfig& s) {
  SystemInfo info;
  info.name = s.name;
  info.provider = s.provider;
  info.model_id = s.model_id;
  info.template_name = s.template_name;
  info.template_digest = prompting::template_digest(config.templates.at(s.template_name));
  if (s.exemplars) {
    if (s.exemplars->mode == prompting::SelectionMode::RandomSeeded) {
      info.exemplars = fmt::format("random k={} seed={}", s.exemplars->k,
                                   s.exemplars->seed.value_or(config.seed));
    } else {
      info.exemplars = fmt::format("curated k={} file={}", s.exemplars->k,
                                   fs::path(s.exemplars->path_pattern).filename().string());
    }
  }
  info.temperature = s.temperature;
  info.max_output_tokens = s.max_output_tokens;
  return info;
}

// ---- serialization ----

std::string to_json(const Evaluation& e) {
  json langs = json::array();
  for (const auto& l : e.languages) {
    langs.push_back({{"code", l.code},
                     {"display_name", l.display_name},
                     {"script", std::string(corpus::to_string(l.script))}});
  }
  json systems = json::array();
  for (const auto& s : e.systems) {
    systems.push_back({{"name", s.name},
                       {"provider", s.provider},
                       {"model_id", s.model_id},
                       {"template", s.template_name},
                       {"template_digest", s.template_digest},
                       {"exemplars", s.exemplars},
                       {"temperature", s.temperature},
                       {"max_output_tokens", s.max_output_tokens ? json(*s.max_output_tokens)
                                                                 : json("4x input codepoints")}});
  }
  json rows = json::array();
  for (const auto& r : e.rows) {
    json f = nullptr;
    if (r.f05) {
      f = {{"score", r.f05->score}, {"precision", r.f05->precision}, {"recall", r.f05->recall},
           {"tp", r.f05->tp},       {"fp", r.f05->fp},               {"fn", r.f05->fn}};
    }
    json comp = nullptr;
    if (r.compliance) {
      comp = {{"rate", r.compliance->rate},
              {"n_pairs", r.compliance->n_pairs},
              {"n_unchanged", r.compliance->n_unchanged},
              {"vacuous", r.compliance->vacuous}};
    }
    rows.push_back({{"language", r.language},
                    {"system", r.system},
                    {"n_pairs", r.n_pairs},
                    {"n_identity", r.n_identity},
                    {"gleu", opt(r.gleu)},
                    {"f05", f},
                    {"bertscore_f1", opt(r.bertscore_f1)},
                    {"compliance", comp},
                    {"hypotheses_sha256", r.hypotheses_sha256},
                    {"cache_keys", r.cache_keys}});
  }
  const json doc = {{"schema_version", e.schema_version},
                    {"kind", "evaluation"},
                    {"gleu_variant", e.gleu_variant},
                    {"f_beta", {{"beta", e.beta}, {"matching", "exact (span, replacement), micro-averaged"}}},
                    {"word_definition", e.word_definition},
                    {"embedding_provider", e.embedding_provider},
                    {"bertscore_rescaled", false},
                    {"scale", "scores x100; compliance rate in [0, 1]"},
                    {"eval_split", e.eval_split},
                    {"seed", e.seed},
                    {"languages", langs},
                    {"systems", systems},
                    {"results", rows},
                    {"run_metadata", e.run_metadata}};
  return doc.dump(2) + "\n";
}

Evaluation evaluation_from_json(std::string_view text, const std::string& origin) {
  try {
    const auto j = json::parse(text);
    if (j.value("kind", "") != "evaluation") throw DataError(origin + ": not an evaluation document");
    Evaluation e;
    e.schema_version = j.at("schema_version").get<int>();
    if (e.schema_version != kSchemaVersion) {
      throw DataError(origin + ": unsupported schema_version " + std::to_string(e.schema_version));
    }
    e.gleu_variant = j.at("gleu_variant").get<std::string>();
    e.beta = j.at("f_beta").at("beta").get<double>();
    e.word_definition = j.at("word_definition").get<std::string>();
    e.embedding_provider = j.at("embedding_provider").get<std::string>();
    e.eval_split = j.at("eval_split").get<std::string>();
    e.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& l : j.at("languages")) {
      e.languages.push_back(corpus::make_language(l.at("code").get<std::string>(),
                                                  l.at("display_name").get<std::string>(),
                                                  corpus::parse_script(l.at("script").get<std::string>())));
    }
    for (const auto& s : j.at("systems")) {
      SystemInfo info;
      info.name = s.at("name").get<std::string>();
      info.provider = s.at("provider").get<std::string>();
      info.model_id = s.at("model_id").get<std::string>();
      info.template_name = s.at("template").get<std::string>();
      info.template_digest = s.at("template_digest").get<std::string>();
      info.exemplars = s.at("exemplars").get<std::string>();
      info.temperature = s.at("temperature").get<double>();
      if (s.at("max_output_tokens").is_number()) {
        info.max_output_tokens = s.at("max_output_tokens").get<std::size_t>();
      }
      e.systems.push_back(std::move(info));
    }
    for (const auto& r : j.at("results")) {
      EvalRow row;
      row.language = r.at("language").get<std::string>();
      row.system = r.at("system").get<std::string>();
      row.n_pairs = r.at("n_pairs").get<std::size_t>();
      row.n_identity = r.at("n_identity").get<std::size_t>();
      if (!r.at("gleu").is_null()) row.gleu = r.at("gleu").get<double>();
      if (!r.at("f05").is_null()) {
        const auto& f = r.at("f05");
        row.f05 = FScoreSummary{f.at("score").get<double>(), f.at("precision").get<double>(),
                                f.at("recall").get<double>(), f.at("tp").get<std::size_t>(),
                                f.at("fp").get<std::size_t>(), f.at("fn").get<std::size_t>()};
      }
      if (!r.at("bertscore_f1").is_null()) row.bertscore_f1 = r.at("bertscore_f1").get<double>();
      if (!r.at("compliance").is_null()) {
        const auto& c = r.at("compliance");
        row.compliance = ComplianceSummary{c.at("rate").get<double>(), c.at("n_pairs").get<std::size_t>(),
                                           c.at("n_unchanged").get<std::size_t>(),
                                           c.at("vacuous").get<bool>()};
      }
      row.hypotheses_sha256 = r.at("hypotheses_sha256").get<std::string>();
      row.cache_keys = r.at("cache_keys").get<std::vector<std::string>>();
      e.rows.push_back(std::move(row));
    }
    if (j.contains("run_metadata")) {
      e.run_metadata = j.at("run_metadata").get<std::map<std::string, std::string>>();
    }
    return e;
  } catch (const json::exception& ex) {
    throw DataError(origin + ": malformed evaluation document: " + ex.what());
  } catch (const ConfigError& ex) {
    throw DataError(origin + ": " + ex.what());
  }
}

std::string to_csv(const Evaluation& e) {
  std::string out =
      "language,system,n_pairs,n_identity,gleu,f05,precision,recall,tp,fp,fn,bertscore_f1,"
      "compliance,n_identity_unchanged\r\n";
  for (const auto& r : e.rows) {
    std::vector<std::string> cells = {
        corpus::csv_escape(r.language),
        corpus::csv_escape(r.system),
        std::to_string(r.n_pairs),
        std::to_string(r.n_identity),
        r.gleu ? fixed2(*r.gleu) : "",
        r.f05 ? fixed2(r.f05->score) : "",
        r.f05 ? fixed2(r.f05->precision) : "",
        r.f05 ? fixed2(r.f05->recall) : "",
        r.f05 ? std::to_string(r.f05->tp) : "",
        r.f05 ? std::to_string(r.f05->fp) : "",
        r.f05 ? std::to_string(r.f05->fn) : "",
        r.bertscore_f1 ? fixed2(*r.bertscore_f1) : "",
        r.compliance ? fixed2(100.0 * r.compliance->rate) : "",
        r.compliance ? std::to_string(r.compliance->n_unchanged) : "",
    };
    out += fmt::format("{}\r\n", fmt::join(cells, ","));
  }
  return out;
}

std::string to_markdown(const Evaluation& e) {
  std::string out = "# Evaluation\n\n";
  out += "- GLEU variant: `" + e.gleu_variant + "`\n";
  out += "- F-score: beta " + fmt::format("{}", e.beta) + ", exact edit matching, micro-averaged\n";
  out += "- BERTScore embedding: " +
         (e.embedding_provider.empty() ? std::string("disabled") : "`" + e.embedding_provider + "`") +
         " (no baseline rescaling)\n";
  out += "- Split: " + e.eval_split + "; scores x100, two decimals\n\n";
  out += "| Language | System | Pairs | GLEU | F0.5 | BERTScore | Compliance |\n";
  out += "|---|---|---:|---:|---:|---:|---:|\n";
  for (const auto& r : e.rows) {
    std::string comp = "n/a";
    if (r.compliance) {
      comp = fixed2(100.0 * r.compliance->rate) +
             fmt::format(" ({}/{})", r.compliance->n_unchanged, r.compliance->n_pairs);
    }
    out += fmt::format("| {} | {} | {} | {} | {} | {} | {} |\n", md_cell(r.language),
                       md_cell(r.system), r.n_pairs, r.gleu ? fixed2(*r.gleu) : "n/a",
                       r.f05 ? fixed2(r.f05->score) : "n/a",
                       r.bertscore_f1 ? fixed2(*r.bertscore_f1) : "n/a", comp);
  }
  return out;
}

void write_evaluation(const Evaluation& e, const fs::path& dir) {
  write_text_file(dir / "evaluation.json", to_json(e));
  write_text_file(dir / "evaluation.csv", to_csv(e));
  write_text_file(dir / "evaluation.md", to_markdown(e));
}

}  // namespace indicgec::runner
