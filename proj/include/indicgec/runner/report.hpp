#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "indicgec/runner/evaluate.hpp"
#include "indicgec/runner/fertility.hpp"

namespace indicgec::runner {

struct Report {
  // Shared settings of every merged evaluation.
  Evaluation merged;
  // Language code -> systems with the highest GLEU (all of them on a tie).
  std::map<std::string, std::vector<std::string>> best_gleu;
  std::optional<FertilityTable> fertility;
  std::vector<std::string> sources;
};

// Merges evaluation outputs. Throws DataError when they disagree on the
// GLEU variant, beta, word definition, embedding provider or split, when a
// system name maps to different settings, or when the same (language,
// system) pair carries different numbers. Identical duplicates collapse.
Report merge_evaluations(const std::vector<Evaluation>& inputs,
                         const std::vector<std::string>& sources = {});

// Rounds to the two printed decimals before comparing, so displayed ties
// are flagged together.
std::map<std::string, std::vector<std::string>> best_gleu(const Evaluation& e);

std::string to_json(const Report& r);
std::string to_csv(const Report& r);
std::string to_markdown(const Report& r);

// Writes <dir>/report.{json,csv,md}.
void write_report(const Report& r, const std::filesystem::path& dir);

}  // namespace indicgec::runner
