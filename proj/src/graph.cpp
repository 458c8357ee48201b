#include "cdengine/graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cdengine {

IdMap::IdMap(std::vector<std::string> names) {
  names_.reserve(names.size());
  index_.reserve(names.size());
  for (auto& n : names) {
    if (!add(std::move(n))) throw std::invalid_argument("duplicate id in IdMap");
  }
}

bool IdMap::add(std::string name) {
  auto [it, inserted] = index_.emplace(name, static_cast<NodeId>(names_.size()));
  if (!inserted) return false;
  names_.push_back(std::move(name));
  return true;
}

std::optional<NodeId> IdMap::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<const IdMap> make_sequential_ids(std::size_t n, std::string_view prefix) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return std::make_shared<IdMap>(std::move(names));
}

CitationGraph CitationGraph::from_edges(std::vector<int> years, std::vector<Edge> edges,
                                        std::shared_ptr<const IdMap> ids,
                                        EdgeBuildStats* stats) {
  const std::size_t n = years.size();
  if (n >= std::numeric_limits<NodeId>::max()) throw std::length_error("too many nodes");
  if (ids && ids->size() != n) throw std::invalid_argument("id map size does not match node count");

  CitationGraph g;
  g.years_ = std::move(years);
  g.ids_ = ids ? std::move(ids) : make_sequential_ids(n);

  EdgeBuildStats local;
  local.input_edges = edges.size();

  // Counting sort by citing node, then sort + dedup each segment in place.
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
    if (u == v) {
      ++local.self_loops;
      continue;
    }
    ++offsets[u + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  std::vector<NodeId> targets(offsets[n]);
  {
    std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& [u, v] : edges) {
      if (u == v) continue;
      targets[cursor[u]++] = v;
    }
  }
  edges.clear();
  edges.shrink_to_fit();

  g.forward_offsets_.assign(n + 1, 0);
  std::uint64_t write = 0;
  for (std::size_t u = 0; u < n; ++u) {
    auto first = targets.begin() + static_cast<std::ptrdiff_t>(offsets[u]);
    auto last = targets.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]);
    std::sort(first, last);
    auto uniq = std::unique(first, last);
    local.duplicates += static_cast<std::size_t>(last - uniq);
    for (auto it = first; it != uniq; ++it) targets[write++] = *it;
    g.forward_offsets_[u + 1] = write;
  }
  targets.resize(write);
  targets.shrink_to_fit();
  g.forward_ = std::move(targets);

  // Transpose; scanning citing nodes in ascending order keeps each backward list sorted.
  g.backward_offsets_.assign(n + 1, 0);
  for (NodeId v : g.forward_) ++g.backward_offsets_[v + 1];
  for (std::size_t i = 0; i < n; ++i) g.backward_offsets_[i + 1] += g.backward_offsets_[i];
  g.backward_.resize(g.forward_.size());
  std::vector<std::uint64_t> cursor(g.backward_offsets_.begin(), g.backward_offsets_.end() - 1);
  for (std::size_t u = 0; u < n; ++u) {
    for (auto k = g.forward_offsets_[u]; k < g.forward_offsets_[u + 1]; ++k) {
      g.backward_[cursor[g.forward_[k]]++] = static_cast<NodeId>(u);
    }
  }

  if (stats) *stats = local;
  return g;
}

int CitationGraph::max_year() const {
  if (years_.empty()) return 0;
  return *std::max_element(years_.begin(), years_.end());
}

int CitationGraph::min_year() const {
  if (years_.empty()) return 0;
  return *std::min_element(years_.begin(), years_.end());
}

bool CitationGraph::has_edge(NodeId citing, NodeId cited) const {
  auto refs = references(citing);
  return std::binary_search(refs.begin(), refs.end(), cited);
}

std::vector<Edge> CitationGraph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(forward_.size());
  for (std::size_t u = 0; u < node_count(); ++u) {
    for (NodeId v : references(static_cast<NodeId>(u))) out.emplace_back(static_cast<NodeId>(u), v);
  }
  return out;
}

}  // namespace cdengine
