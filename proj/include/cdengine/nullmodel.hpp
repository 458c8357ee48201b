#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdengine/corpus.hpp"
#include "cdengine/disruption.hpp"
#include "cdengine/graph.hpp"

namespace cdengine {

struct RewireConfig {
  int replicas = 10;
  int swap_multiplier = 100;  // attempts = swap_multiplier * edge count
  std::uint64_t seed = 42;
  double subsample_fraction = 1.0;
  // Seed for the focal-node subsample; derived from `seed` when unset.
  std::optional<std::uint64_t> subsample_seed;

  void validate() const;
};

// Deterministic 64-bit stream used by rewiring and subsampling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform integer in [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound);
  // Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

std::uint64_t replica_seed(std::uint64_t seed, std::size_t replica_index);

struct RewireResult {
  CitationGraph graph;
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;

  double acceptance_rate() const {
    return attempts ? static_cast<double>(accepted) / static_cast<double>(attempts) : 0.0;
  }
};

// Double-edge swaps A->B, C->D => A->D, C->B kept only when year(B) == year(D)
// and the result has no self-loop or duplicate. Throws RewireError when m < 2.
RewireResult rewire(const CitationGraph& graph, const RewireConfig& config, std::size_t replica_index);

struct ZScore {
  std::optional<double> null_mean;
  std::optional<double> null_sd;  // sample (n - 1) standard deviation
  std::optional<double> z;
};

// z is undefined when any value is undefined, fewer than two null values
// exist, or the null standard deviation is zero.
ZScore zscore(std::optional<double> observed, std::span<const std::optional<double>> null_values);

struct ZRow {
  NodeId node = 0;
  std::optional<double> observed;
  ZScore stats;
};

struct YearlyZ {
  int year = 0;
  std::optional<double> mean_z;
  std::size_t n = 0;
};

struct ZScoreTable {
  std::vector<ZRow> rows;  // sampled focal nodes, ascending
  std::vector<YearlyZ> yearly;
  std::vector<double> acceptance_rates;  // per replica
};

// Focal nodes kept by the configured subsample, ascending.
std::vector<NodeId> subsample_nodes(std::size_t n, const RewireConfig& config);

ZScoreTable cd_zscores(const CitationGraph& graph, const DisruptionConfig& disruption,
                       const RewireConfig& rewiring, unsigned threads = 1);
inline ZScoreTable cd_zscores(const Corpus& corpus, const DisruptionConfig& disruption,
                              const RewireConfig& rewiring, unsigned threads = 1) {
  return cd_zscores(corpus.graph(), disruption, rewiring, threads);
}

enum class PairKey { venue, class_code };

struct AtypicalConfig {
  PairKey key = PairKey::venue;
  bool self_pairs = true;
  double conventionality_quantile = 0.5;
  double novelty_quantile = 0.1;
  std::size_t cdf_points = 101;
};

// Unordered pairs over reference positions i < j, each stored (min, max).
// Equal keys form a self-pair unless self_pairs is false.
std::vector<std::pair<std::uint32_t, std::uint32_t>> reference_pairs(std::span<const std::uint32_t> keys,
                                                                     bool self_pairs = true);

// Linear interpolation between order statistics; `sorted` must be ascending and nonempty.
double quantile(std::span<const double> sorted, double q);

struct AtypicalDoc {
  NodeId node = 0;
  std::size_t n_pairs = 0;
  std::size_t n_scored = 0;  // pairs with a defined z
  std::optional<double> conventionality;
  std::optional<double> novelty;
};

struct CdfPoint {
  int decade = 0;
  double grid_value = 0.0;
  double cdf = 0.0;
};

struct AtypicalResult {
  std::vector<AtypicalDoc> docs;  // citing documents with >= 2 keyed references
  std::vector<CdfPoint> cdf;
  std::size_t skipped_documents = 0;  // fewer than two keyed references
  std::size_t references_without_key = 0;
  std::size_t distinct_pairs = 0;
  std::size_t undefined_pairs = 0;  // null sd == 0
};

AtypicalResult atypical_combinations(const Corpus& corpus, const RewireConfig& rewiring,
                                     const AtypicalConfig& config = {}, unsigned threads = 1);

}  // namespace cdengine
