#include "indicgec/metrics/compliance.hpp"

#include "indicgec/error.hpp"
#include "indicgec/text.hpp"

namespace indicgec::metrics {

ComplianceResult identity_compliance(const corpus::Corpus& identity_pairs,
                                     const std::map<std::string, std::string>& outputs) {
  ComplianceResult result;
  result.n_pairs = identity_pairs.size();
  if (identity_pairs.empty()) {
    result.vacuous = true;
    return result;
  }
  for (const auto& pair : identity_pairs.pairs()) {
    if (!corpus::is_identity(pair)) {
      throw Error("identity compliance: pair " + pair.id + " needs a correction");
    }
    const auto it = outputs.find(pair.id);
    if (it == outputs.end()) throw Error("identity compliance: no output for id " + pair.id);
    if (text::trim(it->second) == text::trim(pair.source)) ++result.n_unchanged;
  }
  result.rate = static_cast<double>(result.n_unchanged) / static_cast<double>(result.n_pairs);
  return result;
}

}  // namespace indicgec::metrics
