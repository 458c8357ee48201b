#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdengine/corpus.hpp"
#include "cdengine/graph.hpp"

namespace cdengine {

// Rule deciding whether a citer "also cites the focal work's references" (b = 1).
struct JRule {
  enum class Kind { at_least, all_references };
  Kind kind = Kind::at_least;
  int min_hits = 1;  // used by at_least

  static JRule at_least(int l) { return {Kind::at_least, l}; }
  static JRule all_references() { return {Kind::all_references, 0}; }

  // "at_least:2", "all"
  static std::optional<JRule> parse(std::string_view s);
  std::string to_string() const;

  bool operator==(const JRule&) const = default;
};

enum class NormalizationMode { none, paper, field_year };

struct DisruptionConfig {
  std::optional<int> window = 5;  // nullopt: every later year up to the horizon
  bool include_same_year = true;
  JRule j_rule = JRule::at_least(1);
  bool include_k_in_denominator = true;
  // Upper year bound when window is unset; defaults to the graph's max year.
  std::optional<int> horizon_year;
  NormalizationMode normalization = NormalizationMode::none;

  // Throws ConfigError on l < 1 or a negative window.
  void validate() const;

  static DisruptionConfig cd(int window) {
    DisruptionConfig c;
    c.window = window;
    return c;
  }
};

struct CiterCounts {
  std::size_t n_i = 0;  // cite the focal work only
  std::size_t n_j = 0;  // cite the focal work and its references
  std::size_t n_k = 0;  // cite its references only
  std::size_t n_b = 0;  // references of the focal work

  bool operator==(const CiterCounts&) const = default;
};

struct DisruptionScore {
  NodeId node = 0;
  CiterCounts counts;
  std::optional<double> value;  // nullopt when the denominator is zero
};

// Scores focal nodes against one graph and config. Holds per-node scratch, so
// use one instance per thread.
class DisruptionScorer {
 public:
  DisruptionScorer(const CitationGraph& graph, DisruptionConfig config);

  CiterCounts classify(NodeId focal);
  DisruptionScore score(NodeId focal);

  const DisruptionConfig& config() const noexcept { return config_; }

 private:
  struct Slot {
    std::uint32_t stamp = 0;
    std::uint32_t hits = 0;
    bool cites_focal = false;
  };

  bool in_window(NodeId w, int lo, int hi) const {
    int y = graph_->year(w);
    return y >= lo && y <= hi;
  }
  Slot& touch(NodeId w);

  const CitationGraph* graph_;
  DisruptionConfig config_;
  int horizon_;
  std::vector<Slot> slots_;
  std::vector<NodeId> touched_;
  std::uint32_t epoch_ = 0;
};

CiterCounts classify_citers(const CitationGraph& graph, NodeId focal, const DisruptionConfig& config);
DisruptionScore cd_index(const CitationGraph& graph, NodeId focal, const DisruptionConfig& config);

// (N_i - N_j) / D with D = N_i + N_j (+ N_k); nullopt when D = 0.
std::optional<double> disruption_value(const CiterCounts& c, bool include_k);

// Independent cross-check of cd_index: scans every node's reference list (no
// inverse adjacency) and averages -2 f_w b_w + f_w over the citer set.
std::optional<double> cd_index_summation_oracle(const CitationGraph& graph, NodeId focal,
                                                const DisruptionConfig& config);

// One score per node, in dense-index order; identical for any thread count.
std::vector<DisruptionScore> batch_cd(const CitationGraph& graph, const DisruptionConfig& config,
                                      unsigned threads = 1);
inline std::vector<DisruptionScore> batch_cd(const Corpus& corpus, const DisruptionConfig& config,
                                             unsigned threads = 1) {
  return batch_cd(corpus.graph(), config, threads);
}

struct DisruptionVariants {
  std::vector<DisruptionScore> cd;         // at_least(1), N_k in denominator
  std::vector<DisruptionScore> di1_no_k;   // at_least(1), N_k dropped
  std::vector<DisruptionScore> di_star;    // all_references, N_k in denominator
};

// Window settings come from `base`; rule and denominator are fixed per variant.
DisruptionVariants di_variants(const Corpus& corpus, const DisruptionConfig& base = {},
                               unsigned threads = 1);

struct BucketRow {
  int year = 0;
  std::array<std::size_t, 4> counts{};  // (0,.25], (.25,.5], (.5,.75], (.75,1]
};

struct BucketShare {
  int year = 0;
  std::string field_area;
  std::size_t count = 0;
  double share = 0.0;  // among the year's scores > 0.25
};

struct BucketSummary {
  std::vector<BucketRow> rows;  // every year from corpus min to max
  std::vector<BucketShare> composition;
};

// Interval index 0..3 for a score, or nullopt for values <= 0.
std::optional<std::size_t> bucket_of(double value);

BucketSummary bucket_conservation(const std::vector<DisruptionScore>& scores, const Corpus& corpus);

}  // namespace cdengine
