#include "cdengine/nullmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "cdengine/error.hpp"
#include "cdengine/parallel.hpp"

namespace cdengine {

void RewireConfig::validate() const {
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  if (swap_multiplier < 0) throw ConfigError("swap_multiplier must be >= 0");
  if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0)) {
    throw ConfigError("subsample_fraction must lie in (0, 1]");
  }
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t replica_seed(std::uint64_t seed, std::size_t replica_index) {
  SplitMix64 a(seed);
  SplitMix64 b(a.next() ^ (0xD1B54A32D192ED03ULL * (replica_index + 1)));
  return b.next();
}

RewireResult rewire(const CitationGraph& graph, const RewireConfig& config, std::size_t replica_index) {
  auto edges = graph.edge_list();
  const std::size_t m = edges.size();
  if (m < 2) throw RewireError("rewiring needs at least 2 edges, graph has " + std::to_string(m));

  auto key = [](NodeId u, NodeId v) { return (static_cast<std::uint64_t>(u) << 32) | v; };
  std::unordered_set<std::uint64_t> present;
  present.reserve(2 * m);
  for (const auto& [u, v] : edges) present.insert(key(u, v));

  SplitMix64 rng(replica_seed(config.seed, replica_index));
  RewireResult out;
  out.attempts = static_cast<std::uint64_t>(config.swap_multiplier) * m;
  for (std::uint64_t t = 0; t < out.attempts; ++t) {
    const auto i = static_cast<std::size_t>(rng.below(m));
    auto j = static_cast<std::size_t>(rng.below(m - 1));
    if (j >= i) ++j;
    const auto [a, b] = edges[i];
    const auto [c, d] = edges[j];
    if (graph.year(b) != graph.year(d)) continue;
    if (a == d || c == b) continue;
    const auto ad = key(a, d);
    const auto cb = key(c, b);
    if (present.count(ad) || present.count(cb)) continue;
    present.erase(key(a, b));
    present.erase(key(c, d));
    present.insert(ad);
    present.insert(cb);
    edges[i] = {a, d};
    edges[j] = {c, b};
    ++out.accepted;
  }
  out.graph = CitationGraph::from_edges(graph.years(), std::move(edges), graph.shared_ids());
  return out;
}

ZScore zscore(std::optional<double> observed, std::span<const std::optional<double>> null_values) {
  ZScore z;
  const std::size_t n = null_values.size();
  if (n == 0) return z;
  for (const auto& v : null_values) {
    if (!v) return z;
  }
  double mean = 0;
  for (const auto& v : null_values) mean += *v;
  mean /= static_cast<double>(n);
  z.null_mean = mean;
  if (n < 2) return z;
  double ss = 0;
  for (const auto& v : null_values) ss += (*v - mean) * (*v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  z.null_sd = sd;
  if (!observed || sd == 0.0) return z;
  z.z = (*observed - mean) / sd;
  return z;
}

std::vector<NodeId> subsample_nodes(std::size_t n, const RewireConfig& config) {
  std::vector<NodeId> out;
  if (config.subsample_fraction >= 1.0) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<NodeId>(i);
    return out;
  }
  SplitMix64 rng(config.subsample_seed ? *config.subsample_seed : replica_seed(config.seed, ~std::size_t{0}));
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.unit() < config.subsample_fraction) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

ZScoreTable cd_zscores(const CitationGraph& graph, const DisruptionConfig& disruption,
                       const RewireConfig& rewiring, unsigned threads) {
  rewiring.validate();
  if (rewiring.replicas < 2) throw ConfigError("z-scores need at least 2 replicas");
  disruption.validate();

  const auto focal = subsample_nodes(graph.node_count(), rewiring);
  const auto replicas = static_cast<std::size_t>(rewiring.replicas);

  ZScoreTable out;
  std::vector<std::optional<double>> observed(focal.size());
  {
    DisruptionScorer scorer(graph, disruption);
    for (std::size_t k = 0; k < focal.size(); ++k) observed[k] = scorer.score(focal[k]).value;
  }

  // null[r][k]: score of focal[k] on replica r.
  std::vector<std::vector<std::optional<double>>> null(replicas);
  out.acceptance_rates.resize(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    auto replica = rewire(graph, rewiring, r);
    out.acceptance_rates[r] = replica.acceptance_rate();
    DisruptionScorer scorer(replica.graph, disruption);
    auto& vals = null[r];
    vals.resize(focal.size());
    for (std::size_t k = 0; k < focal.size(); ++k) vals[k] = scorer.score(focal[k]).value;
  });

  std::map<int, std::pair<double, std::size_t>> by_year;
  out.rows.resize(focal.size());
  std::vector<std::optional<double>> column(replicas);
  for (std::size_t k = 0; k < focal.size(); ++k) {
    for (std::size_t r = 0; r < replicas; ++r) column[r] = null[r][k];
    auto& row = out.rows[k];
    row.node = focal[k];
    row.observed = observed[k];
    row.stats = zscore(observed[k], column);
    auto& acc = by_year[graph.year(focal[k])];
    if (row.stats.z) {
      acc.first += *row.stats.z;
      ++acc.second;
    }
  }
  for (const auto& [year, acc] : by_year) {
    YearlyZ y;
    y.year = year;
    y.n = acc.second;
    if (acc.second) y.mean_z = acc.first / static_cast<double>(acc.second);
    out.yearly.push_back(y);
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> reference_pairs(std::span<const std::uint32_t> keys,
                                                                     bool self_pairs) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      if (!self_pairs && keys[i] == keys[j]) continue;
      out.emplace_back(std::min(keys[i], keys[j]), std::max(keys[i], keys[j]));
    }
  }
  return out;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

constexpr std::uint32_t kNoKey = 0xFFFFFFFFu;

struct PairYear {
  int year;
  std::uint32_t a;
  std::uint32_t b;
  bool operator==(const PairYear&) const = default;
};

struct PairYearHash {
  std::size_t operator()(const PairYear& p) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(p.a) << 32) | p.b;
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.year)) * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
  }
};

// Sequence of pair instances for every citing node with >= 2 keyed references.
struct PairInstances {
  std::vector<NodeId> citing;
  std::vector<std::size_t> offsets{0};
  std::vector<PairYear> pairs;
};

PairInstances collect_pairs(const CitationGraph& graph, const std::vector<std::uint32_t>& key_of,
                            bool self_pairs, std::size_t* skipped, std::size_t* missing) {
  PairInstances out;
  std::vector<std::uint32_t> keys;
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    keys.clear();
    for (NodeId v : graph.references(static_cast<NodeId>(u))) {
      if (key_of[v] == kNoKey) {
        if (missing) ++*missing;
        continue;
      }
      keys.push_back(key_of[v]);
    }
    if (keys.size() < 2) {
      if (skipped && graph.out_degree(static_cast<NodeId>(u)) > 0) ++*skipped;
      continue;
    }
    const int year = graph.year(static_cast<NodeId>(u));
    for (const auto& [a, b] : reference_pairs(keys, self_pairs)) out.pairs.push_back({year, a, b});
    out.citing.push_back(static_cast<NodeId>(u));
    out.offsets.push_back(out.pairs.size());
  }
  return out;
}

}  // namespace

AtypicalResult atypical_combinations(const Corpus& corpus, const RewireConfig& rewiring,
                                     const AtypicalConfig& config, unsigned threads) {
  rewiring.validate();
  if (rewiring.replicas < 2) throw ConfigError("atypical combinations need at least 2 replicas");
  const auto& graph = corpus.graph();

  // Venue column doubles as the primary classification code for patents.
  std::map<std::string, std::uint32_t, std::less<>> key_ids;
  std::vector<std::uint32_t> key_of(corpus.size(), kNoKey);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus.doc(static_cast<NodeId>(i));
    if (!d.venue) continue;
    auto it = key_ids.emplace(*d.venue, static_cast<std::uint32_t>(key_ids.size())).first;
    key_of[i] = it->second;
  }

  AtypicalResult out;
  auto observed = collect_pairs(graph, key_of, config.self_pairs, &out.skipped_documents,
                                &out.references_without_key);

  std::unordered_map<PairYear, std::size_t, PairYearHash> index;
  std::vector<double> obs_count;
  std::vector<std::size_t> pair_index(observed.pairs.size());
  for (std::size_t p = 0; p < observed.pairs.size(); ++p) {
    auto [it, inserted] = index.emplace(observed.pairs[p], obs_count.size());
    if (inserted) obs_count.push_back(0);
    obs_count[it->second] += 1;
    pair_index[p] = it->second;
  }
  out.distinct_pairs = obs_count.size();

  const auto replicas = static_cast<std::size_t>(rewiring.replicas);
  std::vector<std::vector<double>> null_counts(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    auto replica = rewire(graph, rewiring, r);
    auto pairs = collect_pairs(replica.graph, key_of, config.self_pairs, nullptr, nullptr);
    auto& counts = null_counts[r];
    counts.assign(obs_count.size(), 0.0);
    for (const auto& p : pairs.pairs) {
      auto it = index.find(p);
      if (it != index.end()) counts[it->second] += 1;
    }
  });

  std::vector<std::optional<double>> pair_z(obs_count.size());
  std::vector<std::optional<double>> column(replicas);
  for (std::size_t k = 0; k < obs_count.size(); ++k) {
    for (std::size_t r = 0; r < replicas; ++r) column[r] = null_counts[r][k];
    pair_z[k] = zscore(obs_count[k], column).z;
    if (!pair_z[k]) ++out.undefined_pairs;
  }

  std::map<int, std::vector<double>> novelty_by_decade;
  std::vector<double> zs;
  for (std::size_t c = 0; c < observed.citing.size(); ++c) {
    AtypicalDoc doc;
    doc.node = observed.citing[c];
    zs.clear();
    for (auto p = observed.offsets[c]; p < observed.offsets[c + 1]; ++p) {
      ++doc.n_pairs;
      if (auto z = pair_z[pair_index[p]]) zs.push_back(*z);
    }
    doc.n_scored = zs.size();
    if (!zs.empty()) {
      std::sort(zs.begin(), zs.end());
      doc.conventionality = quantile(zs, config.conventionality_quantile);
      doc.novelty = quantile(zs, config.novelty_quantile);
      const int year = graph.year(doc.node);
      const int decade = (year >= 0 ? year / 10 : (year - 9) / 10) * 10;
      novelty_by_decade[decade].push_back(*doc.novelty);
    }
    out.docs.push_back(doc);
  }

  if (!novelty_by_decade.empty() && config.cdf_points >= 2) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto& [decade, v] : novelty_by_decade) {
      std::sort(v.begin(), v.end());
      lo = std::min(lo, v.front());
      hi = std::max(hi, v.back());
    }
    for (const auto& [decade, v] : novelty_by_decade) {
      for (std::size_t g = 0; g < config.cdf_points; ++g) {
        double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(config.cdf_points - 1);
        if (g + 1 == config.cdf_points) x = hi;
        const auto below = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
        out.cdf.push_back({decade, x, static_cast<double>(below) / static_cast<double>(v.size())});
      }
    }
  }
  return out;
}

}  // namespace cdengine
