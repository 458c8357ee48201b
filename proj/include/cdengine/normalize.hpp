#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdengine/corpus.hpp"
#include "cdengine/disruption.hpp"

namespace cdengine {

// What gets subtracted from N_k before recomputing the index.
struct NormalizationContext {
  NormalizationMode mode = NormalizationMode::paper;
  FieldLevel field_level = FieldLevel::area;
  // (field, year) -> mean out-citations of documents published there.
  std::map<std::pair<std::string, int>, double> nb_mean;

  static NormalizationContext paper();
  static NormalizationContext field_year(const FieldYearTable& table);
  static NormalizationContext field_year(const Corpus& corpus, FieldLevel level = FieldLevel::area);

  double mean_refs(const std::string& field, int year) const;
};

// Value with N_k replaced by max(0, N_k - subtrahend); the numerator is untouched.
std::optional<double> attenuated_value(const CiterCounts& counts, double subtrahend);

// Paper mode only; field_year mode needs the document's field and year.
DisruptionScore normalized_cd(const DisruptionScore& score, const NormalizationContext& ctx);
DisruptionScore normalized_cd(const DisruptionScore& score, const NormalizationContext& ctx,
                              const std::string& field, int year);

std::vector<DisruptionScore> normalize_scores(const std::vector<DisruptionScore>& scores,
                                              const Corpus& corpus, const NormalizationContext& ctx);

}  // namespace cdengine
