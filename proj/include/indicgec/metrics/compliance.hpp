#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "indicgec/corpus/corpus.hpp"

namespace indicgec::metrics {

struct ComplianceResult {
  double rate = 1.0;
  std::size_t n_pairs = 0;
  std::size_t n_unchanged = 0;
  // Set when the subset was empty and the rate is 1 by convention.
  bool vacuous = false;
};

// Share of identity pairs the system left unchanged (trimmed equality with
// the source). Throws if an id lacks an output or a pair is not an identity
// pair.
ComplianceResult identity_compliance(const corpus::Corpus& identity_pairs,
                                     const std::map<std::string, std::string>& outputs);

}  // namespace indicgec::metrics
