#pragma once

// Turning a partition into an experiment: cluster-id perturbation, hashing
// units into buckets, arm assignment, and the within-group share ratio.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spillover/clustering.hpp"
#include "spillover/graph.hpp"

namespace spillover {

enum class Arm : std::uint8_t { treatment, control, holdout };

std::string_view to_string(Arm arm);
Arm arm_from_string(std::string_view s);

/// Perturbed nodes get cluster id = node id + 2^48 so they cannot collide
/// with clustering output.
inline constexpr ClusterId kSingletonNamespace = ClusterId{1} << 48;

/// Resets floor(r * n) uniformly sampled nodes to singleton clusters.
Partition perturb_cids(const WeightedGraph& g, const Partition& p, double r, std::uint64_t seed);

struct AssignmentSpec {
  std::uint32_t buckets = 10;
  std::vector<std::uint32_t> treatment_buckets{0};
  std::vector<std::uint32_t> control_buckets{1};
  std::uint64_t salt = 0;

  /// Bucket lists must be disjoint, duplicate-free, and inside [0, buckets).
  void validate() const;
};

class Assignment {
 public:
  const AssignmentSpec& spec() const noexcept { return spec_; }

  /// Randomization unit (cluster id) of a node.
  ClusterId unit_of(NodeIndex i) const { return unit_[i]; }
  std::uint32_t bucket_of_node(NodeIndex i) const { return bucket_[i]; }
  Arm arm_of_node(NodeIndex i) const { return arm_of_bucket_[bucket_[i]]; }
  Arm arm_of_bucket(std::uint32_t b) const { return arm_of_bucket_[b]; }
  std::size_t node_count() const noexcept { return unit_.size(); }
  std::size_t arm_size(Arm arm) const;

 private:
  friend Assignment assign(const Partition&, const AssignmentSpec&);
  AssignmentSpec spec_;
  std::vector<ClusterId> unit_;
  std::vector<std::uint32_t> bucket_;
  std::vector<Arm> arm_of_bucket_;
};

/// bucket(unit) = unit_hash(unit, salt) mod B; nodes inherit their unit's bucket.
std::uint32_t bucket_of_unit(ClusterId unit, std::uint64_t salt, std::uint32_t buckets);

Assignment assign(const Partition& p, const AssignmentSpec& spec);

struct ShareEvent {
  NodeIndex src;
  NodeIndex dst;
  std::uint64_t count = 1;
};

class ShareEventLog {
 public:
  enum class Source { graph, file };

  ShareEventLog(Source source, std::vector<ShareEvent> events);

  Source source() const noexcept { return source_; }
  std::span<const ShareEvent> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }

 private:
  Source source_;
  std::vector<ShareEvent> events_;
};

/// Both directions of every undirected edge, one event each.
ShareEventLog graph_events(const WeightedGraph& g);

/// Reads `src dst [count]` lines; endpoints must be graph nodes and differ.
ShareEventLog load_events(const std::filesystem::path& path, const WeightedGraph& g);

/// #{u->v : u in g, v in g} / #{u->v : u in g, v in g or g'}; nullopt when the
/// denominator is zero.
std::optional<double> wgsr(const ShareEventLog& events, const Assignment& a, Arm group, Arm counterpart);

}  // namespace spillover
