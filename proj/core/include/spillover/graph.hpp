#pragma once

// Undirected weighted interaction graphs.
//
// External node ids are arbitrary 64-bit integers; internally nodes are dense
// indices 0..n-1 assigned in ascending id order. Adjacency is stored CSR-style
// with both directions of every edge.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spillover {

using NodeId = std::uint64_t;
using NodeIndex = std::uint32_t;

struct Neighbor {
  NodeIndex node;
  double weight;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Immutable after construction; safe to share between threads.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  std::size_t node_count() const noexcept { return ids_.size(); }
  /// Number of undirected edges.
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }
  /// m = sum of edge weights (each undirected edge counted once).
  double total_weight() const noexcept { return total_weight_; }
  /// Average weighted degree 2m/n; 0 for an empty graph.
  double mean_degree() const noexcept;

  double degree(NodeIndex i) const { return degrees_[i]; }
  std::span<const double> degrees() const noexcept { return degrees_; }
  std::span<const Neighbor> neighbors(NodeIndex i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }

  NodeId id_of(NodeIndex i) const { return ids_[i]; }
  std::span<const NodeId> node_ids() const noexcept { return ids_; }
  std::optional<NodeIndex> index_of(NodeId id) const;

  /// Weight of edge (i, j), 0 when absent.
  double weight(NodeIndex i, NodeIndex j) const;

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.ids_ == b.ids_ && a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_;
  }

 private:
  friend class GraphBuilder;

  std::vector<NodeId> ids_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;  // sorted by neighbor index within a row
  std::vector<double> degrees_;
  double total_weight_ = 0.0;
  std::unordered_map<NodeId, NodeIndex> index_;
};

/// Accumulates edges keyed by unordered node pair; duplicates are summed.
class GraphBuilder {
 public:
  void add_node(NodeId id);
  /// Adds weight to the undirected pair {u, v}. Throws InvalidArgument on a
  /// self-loop or a negative/non-finite weight.
  void add_edge(NodeId u, NodeId v, double weight);

  /// Zero-weight pairs are dropped; their endpoints stay as nodes.
  WeightedGraph build() const;

 private:
  struct PendingEdge {
    NodeId lo;
    NodeId hi;
    double weight;
  };
  std::vector<NodeId> nodes_;
  std::vector<PendingEdge> edges_;
};

/// Per-behavior importance weights for multi-behavior aggregation.
class BehaviorWeights {
 public:
  using BehaviorId = std::uint32_t;

  /// Throws InvalidArgument on duplicate ids, negative weights, or when every
  /// weight is zero.
  explicit BehaviorWeights(std::vector<std::pair<BehaviorId, double>> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  std::optional<double> weight_of(BehaviorId d) const;
  std::span<const std::pair<BehaviorId, double>> entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<BehaviorId, double>> entries_;
};

/// Reads `src dst [weight]` lines; `#` starts a comment line. Duplicate pairs
/// are summed. With `directed_input`, lines are treated as directed strengths
/// and both orientations of a pair fold into one undirected weight; since
/// undirected duplicates are also summed the resulting weights coincide.
WeightedGraph load_edge_list(const std::filesystem::path& path, bool directed_input);

/// Reads `src dst behavior_id strength` lines and aggregates
/// W_ij = sum_d weight_d * s_ij^(d).
WeightedGraph build_multi_behavior(const std::filesystem::path& path, const BehaviorWeights& weights);

/// Canonical form: `min max weight`, each edge once, sorted by (min, max).
void write_edge_list(const WeightedGraph& g, const std::filesystem::path& path);

/// Watts-Strogatz small world graph on ids 0..n-1 with unit weights.
/// Each lattice edge (i, i+j) is rewired with probability p to a uniform
/// target; self-loops and duplicates are rejected, and after 100 rejected
/// draws the original edge is kept.
WeightedGraph watts_strogatz(std::size_t n, std::size_t k, double p, std::uint64_t seed);

}  // namespace spillover
