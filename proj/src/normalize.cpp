#include "cdengine/normalize.hpp"

#include <algorithm>

#include "cdengine/error.hpp"

namespace cdengine {

NormalizationContext NormalizationContext::paper() {
  NormalizationContext ctx;
  ctx.mode = NormalizationMode::paper;
  return ctx;
}

NormalizationContext NormalizationContext::field_year(const FieldYearTable& table) {
  NormalizationContext ctx;
  ctx.mode = NormalizationMode::field_year;
  ctx.field_level = table.level;
  for (const auto& r : table.rows) ctx.nb_mean[{r.field, r.year}] = r.mean_refs_out;
  return ctx;
}

NormalizationContext NormalizationContext::field_year(const Corpus& corpus, FieldLevel level) {
  return field_year(field_year_aggregates(corpus, level));
}

double NormalizationContext::mean_refs(const std::string& field, int year) const {
  auto it = nb_mean.find({field, year});
  if (it == nb_mean.end()) {
    throw ConfigError("no mean-reference row for (" + field + ", " + std::to_string(year) + ")");
  }
  return it->second;
}

std::optional<double> attenuated_value(const CiterCounts& c, double subtrahend) {
  const double nk = std::max(0.0, static_cast<double>(c.n_k) - subtrahend);
  const double denom = static_cast<double>(c.n_i + c.n_j) + nk;
  if (denom == 0.0) return std::nullopt;
  return (static_cast<double>(c.n_i) - static_cast<double>(c.n_j)) / denom;
}

DisruptionScore normalized_cd(const DisruptionScore& score, const NormalizationContext& ctx) {
  if (ctx.mode != NormalizationMode::paper) {
    throw ConfigError("field_year normalization needs the document's field and year");
  }
  DisruptionScore out = score;
  out.value = attenuated_value(score.counts, static_cast<double>(score.counts.n_b));
  return out;
}

DisruptionScore normalized_cd(const DisruptionScore& score, const NormalizationContext& ctx,
                              const std::string& field, int year) {
  DisruptionScore out = score;
  switch (ctx.mode) {
    case NormalizationMode::paper:
      out.value = attenuated_value(score.counts, static_cast<double>(score.counts.n_b));
      break;
    case NormalizationMode::field_year:
      out.value = attenuated_value(score.counts, ctx.mean_refs(field, year));
      break;
    case NormalizationMode::none:
      out.value = disruption_value(score.counts, true);
      break;
  }
  return out;
}

std::vector<DisruptionScore> normalize_scores(const std::vector<DisruptionScore>& scores,
                                              const Corpus& corpus, const NormalizationContext& ctx) {
  std::vector<DisruptionScore> out;
  out.reserve(scores.size());
  for (const auto& s : scores) {
    const auto& d = corpus.doc(s.node);
    out.push_back(normalized_cd(s, ctx, field_of(d, ctx.field_level), d.year));
  }
  return out;
}

}  // namespace cdengine
