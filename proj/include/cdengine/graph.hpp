#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cdengine {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;  // (citing, cited)

// Bijection between external doc_id strings and dense node indices.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::string> names);

  // Returns false if the name is already present.
  bool add(std::string name);

  std::optional<NodeId> find(std::string_view name) const;
  const std::string& name(NodeId id) const { return names_[id]; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
};

std::shared_ptr<const IdMap> make_sequential_ids(std::size_t n, std::string_view prefix = "n");

struct EdgeBuildStats {
  std::size_t input_edges = 0;
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
};

// Immutable citation graph in compressed sparse row form, stored both ways
// (citing -> cited and cited -> citing). Neighbor lists are sorted ascending.
class CitationGraph {
 public:
  CitationGraph() = default;

  // Self-loops are dropped and duplicate pairs collapsed; counts land in stats.
  static CitationGraph from_edges(std::vector<int> years, std::vector<Edge> edges,
                                  std::shared_ptr<const IdMap> ids,
                                  EdgeBuildStats* stats = nullptr);

  std::size_t node_count() const noexcept { return years_.size(); }
  std::size_t edge_count() const noexcept { return forward_.size(); }

  std::span<const NodeId> references(NodeId u) const {
    return {forward_.data() + forward_offsets_[u], forward_.data() + forward_offsets_[u + 1]};
  }
  std::span<const NodeId> citers(NodeId v) const {
    return {backward_.data() + backward_offsets_[v], backward_.data() + backward_offsets_[v + 1]};
  }
  std::size_t out_degree(NodeId u) const { return forward_offsets_[u + 1] - forward_offsets_[u]; }
  std::size_t in_degree(NodeId v) const { return backward_offsets_[v + 1] - backward_offsets_[v]; }

  int year(NodeId u) const { return years_[u]; }
  const std::vector<int>& years() const noexcept { return years_; }
  int max_year() const;
  int min_year() const;

  bool has_edge(NodeId citing, NodeId cited) const;

  const IdMap& ids() const { return *ids_; }
  const std::shared_ptr<const IdMap>& shared_ids() const noexcept { return ids_; }

  // Edges in (citing ascending, cited ascending) order.
  std::vector<Edge> edge_list() const;

  const std::vector<std::uint64_t>& forward_offsets() const noexcept { return forward_offsets_; }
  const std::vector<NodeId>& forward_targets() const noexcept { return forward_; }
  const std::vector<std::uint64_t>& backward_offsets() const noexcept { return backward_offsets_; }
  const std::vector<NodeId>& backward_sources() const noexcept { return backward_; }

 private:
  std::vector<std::uint64_t> forward_offsets_{0};
  std::vector<NodeId> forward_;
  std::vector<std::uint64_t> backward_offsets_{0};
  std::vector<NodeId> backward_;
  std::vector<int> years_;
  std::shared_ptr<const IdMap> ids_ = std::make_shared<IdMap>();
};

}  // namespace cdengine
