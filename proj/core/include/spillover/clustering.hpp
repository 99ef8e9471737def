#pragma once

// Graph clustering for randomization units: size-balanced Louvain, plain
// Louvain, size-constrained label propagation, and partition quality metrics.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spillover/graph.hpp"

namespace spillover {

using ClusterId = std::uint64_t;

struct ClusterStats {
  /// Number of original graph nodes.
  std::size_t size = 0;
  /// Sum of weighted degrees of the members.
  double degree_total = 0.0;
};

/// Node -> cluster mapping over a fixed graph, with per-cluster aggregates.
class Partition {
 public:
  Partition() = default;

  /// `labels[i]` is the cluster of node index i.
  static Partition from_labels(const WeightedGraph& g, std::vector<ClusterId> labels);

  std::size_t node_count() const noexcept { return labels_.size(); }
  ClusterId cluster_of(NodeIndex i) const { return labels_[i]; }
  std::span<const ClusterId> labels() const noexcept { return labels_; }

  const std::map<ClusterId, ClusterStats>& clusters() const noexcept { return clusters_; }
  std::size_t cluster_count() const noexcept { return clusters_.size(); }
  std::size_t max_cluster_size() const noexcept;

  friend bool operator==(const Partition& a, const Partition& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<ClusterId> labels_;
  std::map<ClusterId, ClusterStats> clusters_;
};

/// Relabels clusters 0..k-1 by descending size; ties go to the cluster whose
/// smallest member index is smaller.
Partition renumber_by_size(const WeightedGraph& g, const Partition& p);

struct LouvainConfig {
  /// Size balance factor; 0 disables the soft penalty.
  double alpha = 0.0;
  /// Maximum cluster size. Positive enables the post-convergence hard split;
  /// negative disables it. |n_max| / 2 is the penalty threshold either way.
  std::int64_t n_max = -1;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  int max_passes = 50;
  double min_gain = 1e-9;

  /// Throws InvalidArgument when alpha < 0, gamma <= 0, n_max == 0,
  /// max_passes < 1 or min_gain < 0.
  void validate() const;
  /// floor(|n_max| / 2), at least 1.
  std::size_t penalty_threshold() const;
};

/// One entry per aggregation level, recorded after local moving finishes.
struct LouvainLevelTrace {
  std::size_t level = 0;
  std::size_t sweeps = 0;
  std::size_t moves = 0;
  /// Sum of accepted score improvements over the level.
  double score_gain = 0.0;
  /// Modularity (resolution gamma) maintained incrementally during moves.
  double modularity = 0.0;
  /// Labels of the original nodes at this point (not renumbered).
  std::vector<ClusterId> labels;
};

using LouvainObserver = std::function<void(const LouvainLevelTrace&)>;

/// Balanced Louvain: local moving on S = dQ - alpha * P(|C|), contraction
/// between levels, then the connectivity-based hard split when n_max > 0.
/// Output clusters are renumbered by descending size. Deterministic in
/// cfg.seed.
Partition balanced_louvain(const WeightedGraph& g, const LouvainConfig& cfg,
                           const LouvainObserver& observer = {});

/// Standard Louvain: the balanced path with alpha = 0 and no hard split.
Partition louvain(const WeightedGraph& g, double gamma, std::uint64_t seed);

/// dQ for inserting a detached node with weight `k_in` into C:
///   k_in - gamma * k_i * sigma_tot / (2m).
/// Not normalized by 1/(2m); scores are compared, not summed into Q.
constexpr double modularity_gain(double k_in, double k_i, double sigma_tot, double m, double gamma) {
  return k_in - gamma * k_i * sigma_tot / (2.0 * m);
}

/// 0 for size <= tau, else k_bar * (size - tau) / tau.
constexpr double size_penalty(std::size_t cluster_size, std::size_t tau, double k_bar) {
  if (cluster_size <= tau) return 0.0;
  return k_bar * static_cast<double>(cluster_size - tau) / static_cast<double>(tau);
}

/// Q = (1/2m) sum_ij [w_ij - gamma k_i k_j / 2m] delta(c_i, c_j). Throws
/// DataError when m = 0.
double modularity(const WeightedGraph& g, const Partition& p, double gamma = 1.0);

/// Splits every cluster larger than n_max: members sorted by ascending
/// within-cluster connectivity (ties by node index) move to a fresh cluster
/// until the original fits; repeated until no cluster exceeds n_max.
Partition hard_split(const WeightedGraph& g, const Partition& p, std::size_t n_max);

/// Label propagation that refuses to grow labels above `theta` members, with
/// a second propagation round for nodes left holding an oversized label.
Partition lpa_constrained(const WeightedGraph& g, std::size_t theta, std::uint64_t seed,
                          std::size_t max_iters = 100);

struct QualityReport {
  double modularity = 0.0;
  /// Intra-cluster edge weight over total edge weight.
  double intra_edge_ratio = 0.0;
  /// Population variance of cluster sizes.
  double size_variance = 0.0;
  std::size_t max_cluster = 0;
  std::size_t cluster_count = 0;
  std::size_t threshold = 0;
  bool ctrl = false;
  std::optional<double> composite_score;
};

QualityReport quality(const WeightedGraph& g, const Partition& p, double gamma, std::size_t threshold);

/// 0.2 Q + 0.3 rho + 0.3 (1 - variance / sigma_max) + 0.2 [ctrl], with the
/// balance term clamped at 0. sigma_max is the largest size variance among the
/// methods compared. Throws InvalidArgument when sigma_max <= 0.
double composite_score(double q, double rho, double variance, double sigma_max, bool ctrl);

/// Header metadata written ahead of a partition file.
struct PartitionHeader {
  std::string algorithm;
  double alpha = 0.0;
  std::int64_t n_max = -1;
  double gamma = 1.0;
  std::uint64_t seed = 0;
};

/// Lines `node_id<TAB>cluster_id` sorted by node id, preceded by `#` comments.
void write_partition(const WeightedGraph& g, const Partition& p, const PartitionHeader& header,
                     const std::filesystem::path& path);

/// Reads a partition file against `g`; every graph node must be listed once.
Partition read_partition(const WeightedGraph& g, const std::filesystem::path& path);

}  // namespace spillover
