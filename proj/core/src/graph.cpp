#include "spillover/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spillover/error.hpp"

namespace spillover {

double WeightedGraph::mean_degree() const noexcept {
  if (ids_.empty()) return 0.0;
  return 2.0 * total_weight_ / static_cast<double>(ids_.size());
}

std::optional<NodeIndex> WeightedGraph::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double WeightedGraph::weight(NodeIndex i, NodeIndex j) const {
  auto row = neighbors(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Neighbor& nb, NodeIndex target) { return nb.node < target; });
  if (it != row.end() && it->node == j) return it->weight;
  return 0.0;
}

void GraphBuilder::add_node(NodeId id) { nodes_.push_back(id); }

void GraphBuilder::add_edge(NodeId u, NodeId v, double weight) {
  if (u == v) throw InvalidArgument("self-loop on node " + std::to_string(u));
  if (!std::isfinite(weight) || weight < 0.0) {
    throw InvalidArgument("edge weight must be finite and non-negative");
  }
  nodes_.push_back(u);
  nodes_.push_back(v);
  edges_.push_back({std::min(u, v), std::max(u, v), weight});
}

WeightedGraph GraphBuilder::build() const {
  WeightedGraph g;

  g.ids_ = nodes_;
  std::sort(g.ids_.begin(), g.ids_.end());
  g.ids_.erase(std::unique(g.ids_.begin(), g.ids_.end()), g.ids_.end());
  if (g.ids_.size() > static_cast<std::size_t>(UINT32_MAX)) {
    throw InvalidArgument("graph exceeds 2^32 - 1 nodes");
  }
  g.index_.reserve(g.ids_.size());
  for (std::size_t i = 0; i < g.ids_.size(); ++i) {
    g.index_.emplace(g.ids_[i], static_cast<NodeIndex>(i));
  }

  std::vector<PendingEdge> merged = edges_;
  std::sort(merged.begin(), merged.end(), [](const PendingEdge& a, const PendingEdge& b) {
    return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
  });
  std::size_t out = 0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (out > 0 && merged[out - 1].lo == merged[i].lo && merged[out - 1].hi == merged[i].hi) {
      merged[out - 1].weight += merged[i].weight;
    } else {
      merged[out++] = merged[i];
    }
  }
  merged.resize(out);
  std::erase_if(merged, [](const PendingEdge& e) { return e.weight <= 0.0; });

  const std::size_t n = g.ids_.size();
  std::vector<std::size_t> counts(n + 1, 0);
  for (const auto& e : merged) {
    ++counts[g.index_.at(e.lo) + 1];
    ++counts[g.index_.at(e.hi) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) counts[i + 1] += counts[i];
  g.offsets_ = counts;
  g.adjacency_.resize(counts[n]);
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  // Edges are sorted by (lo, hi) so each row fills in ascending neighbor
  // order except for the mirrored entries, hence the per-row sort below.
  for (const auto& e : merged) {
    NodeIndex a = g.index_.at(e.lo);
    NodeIndex b = g.index_.at(e.hi);
    g.adjacency_[cursor[a]++] = {b, e.weight};
    g.adjacency_[cursor[b]++] = {a, e.weight};
  }
  g.degrees_.assign(n, 0.0);
  double twice_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]);
    auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]);
    std::sort(first, last, [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
    double k = 0.0;
    for (auto it = first; it != last; ++it) k += it->weight;
    g.degrees_[i] = k;
    twice_m += k;
  }
  g.total_weight_ = twice_m / 2.0;
  return g;
}

BehaviorWeights::BehaviorWeights(std::vector<std::pair<BehaviorId, double>> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
  bool any_positive = false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && entries_[i].first == entries_[i - 1].first) {
      throw InvalidArgument("duplicate behavior id " + std::to_string(entries_[i].first));
    }
    if (!std::isfinite(entries_[i].second) || entries_[i].second < 0.0) {
      throw InvalidArgument("behavior weight must be finite and non-negative");
    }
    any_positive = any_positive || entries_[i].second > 0.0;
  }
  if (!any_positive) throw InvalidArgument("all behavior weights zero");
}

std::optional<double> BehaviorWeights::weight_of(BehaviorId d) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), d,
                             [](const auto& e, BehaviorId id) { return e.first < id; });
  if (it == entries_.end() || it->first != d) return std::nullopt;
  return it->second;
}

}  // namespace spillover
