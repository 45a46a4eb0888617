#include "indicgec/runner/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "indicgec/error.hpp"

namespace indicgec::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool same_info(const SystemInfo& a, const SystemInfo& b) {
  return a.name == b.name && a.provider == b.provider && a.model_id == b.model_id &&
         a.template_name == b.template_name && a.template_digest == b.template_digest &&
         a.exemplars == b.exemplars && a.temperature == b.temperature &&
         a.max_output_tokens == b.max_output_tokens;
}

bool same_row(const EvalRow& a, const EvalRow& b) {
  const auto f = [](const std::optional<FScoreSummary>& x) {
    return x ? std::optional(std::tuple(x->score, x->tp, x->fp, x->fn)) : std::nullopt;
  };
  const auto c = [](const std::optional<ComplianceSummary>& x) {
    return x ? std::optional(std::tuple(x->rate, x->n_pairs, x->n_unchanged)) : std::nullopt;
  };
  return a.n_pairs == b.n_pairs && a.n_identity == b.n_identity && a.gleu == b.gleu &&
         f(a.f05) == f(b.f05) && a.bertscore_f1 == b.bertscore_f1 && c(a.compliance) == c(b.compliance) &&
         a.hypotheses_sha256 == b.hypotheses_sha256;
}

void require_same(const std::string& what, const std::string& a, const std::string& b,
                  const std::string& origin) {
  if (a != b) {
    throw DataError(fmt::format("refusing to merge {}: {} \"{}\" differs from \"{}\"", origin, what, b, a));
  }
}

const EvalRow* find_row(const Evaluation& e, const std::string& lang, const std::string& system) {
  for (const auto& r : e.rows) {
    if (r.language == lang && r.system == system) return &r;
  }
  return nullptr;
}

std::string upper(std::string s) {
  for (auto& ch : s) {
    if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
  }
  return s;
}

bool is_best(const Report& r, const std::string& lang, const std::string& system) {
  const auto it = r.best_gleu.find(lang);
  return it != r.best_gleu.end() &&
         std::find(it->second.begin(), it->second.end(), system) != it->second.end();
}

}  // namespace

std::map<std::string, std::vector<std::string>> best_gleu(const Evaluation& e) {
  std::map<std::string, std::vector<std::string>> best;
  std::map<std::string, double> top;
  for (const auto& r : e.rows) {
    if (!r.gleu) continue;
    const double v = std::round(*r.gleu * 100.0);
    const auto it = top.find(r.language);
    if (it == top.end() || v > it->second) {
      top[r.language] = v;
      best[r.language] = {r.system};
    } else if (v == it->second) {
      best[r.language].push_back(r.system);
    }
  }
  return best;
}

Report merge_evaluations(const std::vector<Evaluation>& inputs, const std::vector<std::string>& sources) {
  if (inputs.empty()) throw DataError("report needs at least one evaluation output");
  Report r;
  r.sources = sources;
  const auto& first = inputs.front();
  r.merged.schema_version = first.schema_version;
  r.merged.gleu_variant = first.gleu_variant;
  r.merged.beta = first.beta;
  r.merged.word_definition = first.word_definition;
  r.merged.embedding_provider = first.embedding_provider;
  r.merged.eval_split = first.eval_split;
  r.merged.seed = first.seed;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& e = inputs[i];
    const auto origin = i < sources.size() ? sources[i] : "input " + std::to_string(i + 1);
    require_same("GLEU variant", r.merged.gleu_variant, e.gleu_variant, origin);
    require_same("word definition", r.merged.word_definition, e.word_definition, origin);
    require_same("evaluation split", r.merged.eval_split, e.eval_split, origin);
    require_same("embedding provider", r.merged.embedding_provider, e.embedding_provider, origin);
    if (e.schema_version != r.merged.schema_version) {
      throw DataError("refusing to merge " + origin + ": schema_version differs");
    }
    if (e.beta != r.merged.beta) throw DataError("refusing to merge " + origin + ": beta differs");
    if (e.seed != r.merged.seed) throw DataError("refusing to merge " + origin + ": seed differs");

    for (const auto& l : e.languages) {
      const auto it = std::find_if(r.merged.languages.begin(), r.merged.languages.end(),
                                   [&](const corpus::Language& x) { return x.code == l.code; });
      if (it == r.merged.languages.end()) {
        r.merged.languages.push_back(l);
      } else if (!(*it == l)) {
        throw DataError("refusing to merge " + origin + ": language " + l.code + " is described differently");
      }
    }
    for (const auto& s : e.systems) {
      const auto it = std::find_if(r.merged.systems.begin(), r.merged.systems.end(),
                                   [&](const SystemInfo& x) { return x.name == s.name; });
      if (it == r.merged.systems.end()) {
        r.merged.systems.push_back(s);
      } else if (!same_info(*it, s)) {
        throw DataError("refusing to merge " + origin + ": system " + s.name + " has different settings");
      }
    }
    for (const auto& row : e.rows) {
      if (const auto* prev = find_row(r.merged, row.language, row.system)) {
        if (!same_row(*prev, row)) {
          throw DataError("refusing to merge " + origin + ": conflicting results for (" + row.language +
                          ", " + row.system + ")");
        }
        continue;
      }
      r.merged.rows.push_back(row);
    }
  }
  r.best_gleu = best_gleu(r.merged);
  return r;
}

std::string to_json(const Report& r) {
  auto doc = json::parse(to_json(r.merged));
  doc["kind"] = "report";
  doc["best_gleu"] = r.best_gleu;
  doc["sources"] = r.sources;
  doc["fertility"] = r.fertility ? json::parse(to_json(*r.fertility)) : json(nullptr);
  return doc.dump(2) + "\n";
}

std::string to_csv(const Report& r) {
  std::string out = "section,language,system,metric,value\r\n";
  const auto put = [&](std::string_view section, const std::string& lang, const std::string& sys,
                       std::string_view metric, const std::string& value) {
    out += fmt::format("{},{},{},{},{}\r\n", section, corpus::csv_escape(lang), corpus::csv_escape(sys),
                       metric, value);
  };
  for (const auto& s : r.merged.systems) {
    for (const auto& l : r.merged.languages) {
      const auto* row = find_row(r.merged, l.code, s.name);
      if (row == nullptr) continue;
      if (row->gleu) put("scores", l.code, s.name, "gleu", fixed2(*row->gleu));
      if (row->f05) put("scores", l.code, s.name, "f05", fixed2(row->f05->score));
      if (row->bertscore_f1) put("scores", l.code, s.name, "bertscore_f1", fixed2(*row->bertscore_f1));
      if (row->gleu) put("scores", l.code, s.name, "best_gleu", is_best(r, l.code, s.name) ? "1" : "0");
      if (row->compliance) {
        put("compliance", l.code, s.name, "rate", fixed2(100.0 * row->compliance->rate));
        put("compliance", l.code, s.name, "n_unchanged", std::to_string(row->compliance->n_unchanged));
        put("compliance", l.code, s.name, "n_pairs", std::to_string(row->compliance->n_pairs));
      }
    }
  }
  if (r.fertility) {
    for (const auto& f : r.fertility->rows) {
      put("fertility", f.language, f.tokenizer, "fertility", fixed2(f.fertility));
    }
  }
  return out;
}

std::string to_markdown(const Report& r) {
  const auto& e = r.merged;
  const bool bert = std::any_of(e.rows.begin(), e.rows.end(), [](const EvalRow& x) { return x.bertscore_f1.has_value(); });
  std::string out = "# Results\n\n";
  out += fmt::format("Scores on the {} split, x100 with two decimals. Bold marks the best GLEU per language.\n\n",
                     e.eval_split);
  out += "- GLEU variant: `" + e.gleu_variant + "`\n";
  out += fmt::format("- F{}: exact edit matching, micro-averaged\n", e.beta);
  out += "- BERTScore: " + (bert ? "`" + e.embedding_provider + "`, mean sentence F1, no rescaling" : std::string("not computed")) + "\n";
  out += fmt::format("- Seed: {}\n\n", e.seed);

  out += "| System |";
  std::string rule = "|---|";
  for (const auto& l : e.languages) {
    const auto code = upper(l.code);
    out += fmt::format(" {0} GLEU | {0} F{1} | {0} BERTScore |", code, e.beta);
    rule += "---:|---:|---:|";
  }
  out += "\n" + rule + "\n";
  for (const auto& s : e.systems) {
    out += "| " + s.name + " |";
    for (const auto& l : e.languages) {
      const auto* row = find_row(e, l.code, s.name);
      if (row == nullptr) {
        out += " n/a | n/a | n/a |";
        continue;
      }
      std::string g = row->gleu ? fixed2(*row->gleu) : "n/a";
      if (row->gleu && is_best(r, l.code, s.name)) g = "**" + g + "**";
      out += fmt::format(" {} | {} | {} |", g, row->f05 ? fixed2(row->f05->score) : "n/a",
                         row->bertscore_f1 ? fixed2(*row->bertscore_f1) : "n/a");
    }
    out += "\n";
  }

  out += "\n## Systems\n\n| System | Provider | Model | Template | Template digest | Exemplars | Temperature |\n";
  out += "|---|---|---|---|---|---|---:|\n";
  for (const auto& s : e.systems) {
    out += fmt::format("| {} | {} | {} | {} | `{}` | {} | {} |\n", s.name, s.provider, s.model_id,
                       s.template_name, s.template_digest.substr(0, 12),
                       s.exemplars.empty() ? "none" : s.exemplars, s.temperature);
  }

  out += "\n## Identity compliance\n\nShare of pairs whose reference equals the source that the system returned unchanged.\n\n";
  out += "| System | Language | Unchanged | Identity pairs | Rate |\n|---|---|---:|---:|---:|\n";
  for (const auto& s : e.systems) {
    for (const auto& l : e.languages) {
      const auto* row = find_row(e, l.code, s.name);
      if (row == nullptr || !row->compliance) continue;
      const auto& c = *row->compliance;
      out += fmt::format("| {} | {} | {} | {} | {}{} |\n", s.name, upper(l.code), c.n_unchanged, c.n_pairs,
                         fixed2(100.0 * c.rate), c.vacuous ? " (no identity pairs)" : "");
    }
  }

  if (r.fertility) {
    const auto md = to_markdown(*r.fertility);
    out += "\n## Tokenizer fertility\n" + md.substr(md.find('\n') + 1);
  }
  return out;
}

void write_report(const Report& r, const fs::path& dir) {
  write_text_file(dir / "report.json", to_json(r));
  write_text_file(dir / "report.csv", to_csv(r));
  write_text_file(dir / "report.md", to_markdown(r));
}

}  // namespace indicgec::runner
