#include "cdengine/disruption.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "cdengine/error.hpp"
#include "cdengine/parallel.hpp"
#include "cdengine/tsv.hpp"

namespace cdengine {

std::optional<JRule> JRule::parse(std::string_view s) {
  if (s == "all" || s == "all_references") return all_references();
  for (std::string_view prefix : {"at_least:", "at_least=", "l="}) {
    if (s.substr(0, prefix.size()) == prefix) {
      auto l = parse_int(s.substr(prefix.size()));
      if (!l || *l < 1) return std::nullopt;
      return at_least(static_cast<int>(*l));
    }
  }
  if (auto l = parse_int(s); l && *l >= 1) return at_least(static_cast<int>(*l));
  return std::nullopt;
}

std::string JRule::to_string() const {
  return kind == Kind::all_references ? "all" : "at_least:" + std::to_string(min_hits);
}

void DisruptionConfig::validate() const {
  if (j_rule.kind == JRule::Kind::at_least && j_rule.min_hits < 1) {
    throw ConfigError("j_rule at_least(l) requires l >= 1");
  }
  if (window && *window < 0) throw ConfigError("window must be >= 0");
}

std::optional<double> disruption_value(const CiterCounts& c, bool include_k) {
  const std::size_t denom = c.n_i + c.n_j + (include_k ? c.n_k : 0);
  if (denom == 0) return std::nullopt;
  return (static_cast<double>(c.n_i) - static_cast<double>(c.n_j)) / static_cast<double>(denom);
}

DisruptionScorer::DisruptionScorer(const CitationGraph& graph, DisruptionConfig config)
    : graph_(&graph), config_(config), slots_(graph.node_count()) {
  config_.validate();
  horizon_ = config_.horizon_year ? *config_.horizon_year : std::numeric_limits<int>::max();
}

DisruptionScorer::Slot& DisruptionScorer::touch(NodeId w) {
  Slot& s = slots_[w];
  if (s.stamp != epoch_) {
    s.stamp = epoch_;
    s.hits = 0;
    s.cites_focal = false;
    touched_.push_back(w);
  }
  return s;
}

CiterCounts DisruptionScorer::classify(NodeId focal) {
  if (++epoch_ == 0) {
    std::fill(slots_.begin(), slots_.end(), Slot{});
    epoch_ = 1;
  }
  touched_.clear();

  const int y = graph_->year(focal);
  const int lo = config_.include_same_year ? y : y + 1;
  const int hi = config_.window ? y + *config_.window : horizon_;
  auto refs = graph_->references(focal);

  for (NodeId w : graph_->citers(focal)) {
    if (in_window(w, lo, hi)) touch(w).cites_focal = true;
  }
  for (NodeId r : refs) {
    for (NodeId w : graph_->citers(r)) {
      if (w == focal || !in_window(w, lo, hi)) continue;
      ++touch(w).hits;
    }
  }

  CiterCounts c;
  c.n_b = refs.size();
  const bool all_rule = config_.j_rule.kind == JRule::Kind::all_references;
  const std::size_t need = all_rule ? refs.size() : static_cast<std::size_t>(config_.j_rule.min_hits);
  for (NodeId w : touched_) {
    const Slot& s = slots_[w];
    const bool b = all_rule ? (!refs.empty() && s.hits == refs.size()) : s.hits >= need;
    if (s.cites_focal) {
      ++(b ? c.n_j : c.n_i);
    } else if (b) {
      ++c.n_k;
    }
  }
  return c;
}

DisruptionScore DisruptionScorer::score(NodeId focal) {
  DisruptionScore s;
  s.node = focal;
  s.counts = classify(focal);
  s.value = disruption_value(s.counts, config_.include_k_in_denominator);
  return s;
}

CiterCounts classify_citers(const CitationGraph& graph, NodeId focal, const DisruptionConfig& config) {
  return DisruptionScorer(graph, config).classify(focal);
}

DisruptionScore cd_index(const CitationGraph& graph, NodeId focal, const DisruptionConfig& config) {
  return DisruptionScorer(graph, config).score(focal);
}

std::optional<double> cd_index_summation_oracle(const CitationGraph& graph, NodeId focal,
                                                const DisruptionConfig& config) {
  const int y = graph.year(focal);
  const long long lo = config.include_same_year ? y : y + 1;
  const long long hi = config.window ? static_cast<long long>(y) + *config.window
                                     : (config.horizon_year ? *config.horizon_year
                                                            : std::numeric_limits<long long>::max());
  auto refs_span = graph.references(focal);
  const std::vector<NodeId> refs(refs_span.begin(), refs_span.end());

  long long sum = 0;
  long long n_t = 0;
  for (std::size_t w = 0; w < graph.node_count(); ++w) {
    if (w == focal) continue;
    const long long yw = graph.year(static_cast<NodeId>(w));
    if (yw < lo || yw > hi) continue;
    const auto cited = graph.references(static_cast<NodeId>(w));
    int f = 0;
    std::size_t hits = 0;
    for (NodeId v : cited) {
      if (v == focal) f = 1;
      if (std::find(refs.begin(), refs.end(), v) != refs.end()) ++hits;
    }
    int b = 0;
    if (config.j_rule.kind == JRule::Kind::all_references) {
      b = (!refs.empty() && hits == refs.size()) ? 1 : 0;
    } else {
      b = hits >= static_cast<std::size_t>(config.j_rule.min_hits) ? 1 : 0;
    }
    const bool member = config.include_k_in_denominator ? (f == 1 || b == 1) : f == 1;
    if (!member) continue;
    ++n_t;
    sum += -2 * f * b + f;
  }
  if (n_t == 0) return std::nullopt;
  return static_cast<double>(sum) / static_cast<double>(n_t);
}

std::vector<DisruptionScore> batch_cd(const CitationGraph& graph, const DisruptionConfig& config,
                                      unsigned threads) {
  config.validate();
  std::vector<DisruptionScore> out(graph.node_count());
  parallel_chunks(graph.node_count(), threads, [&](unsigned, std::size_t begin, std::size_t end) {
    DisruptionScorer scorer(graph, config);
    for (std::size_t i = begin; i < end; ++i) out[i] = scorer.score(static_cast<NodeId>(i));
  });
  return out;
}

DisruptionVariants di_variants(const Corpus& corpus, const DisruptionConfig& base, unsigned threads) {
  DisruptionVariants v;
  auto cfg = base;
  cfg.j_rule = JRule::at_least(1);
  cfg.include_k_in_denominator = true;
  v.cd = batch_cd(corpus, cfg, threads);
  cfg.include_k_in_denominator = false;
  v.di1_no_k = batch_cd(corpus, cfg, threads);
  cfg.j_rule = JRule::all_references();
  cfg.include_k_in_denominator = true;
  v.di_star = batch_cd(corpus, cfg, threads);
  return v;
}

std::optional<std::size_t> bucket_of(double value) {
  if (!(value > 0.0)) return std::nullopt;
  if (value <= 0.25) return 0;
  if (value <= 0.5) return 1;
  if (value <= 0.75) return 2;
  if (value <= 1.0) return 3;
  return std::nullopt;
}

BucketSummary bucket_conservation(const std::vector<DisruptionScore>& scores, const Corpus& corpus) {
  BucketSummary out;
  if (corpus.empty()) return out;
  const int y0 = corpus.min_year();
  const int y1 = corpus.max_year();
  out.rows.resize(static_cast<std::size_t>(y1 - y0 + 1));
  for (int y = y0; y <= y1; ++y) out.rows[static_cast<std::size_t>(y - y0)].year = y;

  std::map<std::pair<int, std::string>, std::size_t> strong;
  std::map<int, std::size_t> strong_total;
  for (const auto& s : scores) {
    if (!s.value) continue;
    const auto& d = corpus.doc(s.node);
    if (auto b = bucket_of(*s.value)) ++out.rows[static_cast<std::size_t>(d.year - y0)].counts[*b];
    if (*s.value > 0.25) {
      ++strong[{d.year, d.field_area}];
      ++strong_total[d.year];
    }
  }
  for (const auto& [key, n] : strong) {
    out.composition.push_back(
        {key.first, key.second, n, static_cast<double>(n) / static_cast<double>(strong_total[key.first])});
  }
  return out;
}

}  // namespace cdengine
