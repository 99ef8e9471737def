#include <algorithm>
#include <fstream>
#include <limits>
#include <string>
#include <unordered_map>

#include "spillover/clustering.hpp"
#include "spillover/error.hpp"
#include "spillover/text_io.hpp"

namespace spillover {

Partition Partition::from_labels(const WeightedGraph& g, std::vector<ClusterId> labels) {
  if (labels.size() != g.node_count()) {
    throw InvalidArgument("partition covers " + std::to_string(labels.size()) + " nodes, graph has " +
                          std::to_string(g.node_count()));
  }
  Partition p;
  p.labels_ = std::move(labels);
  for (std::size_t i = 0; i < p.labels_.size(); ++i) {
    ClusterStats& s = p.clusters_[p.labels_[i]];
    ++s.size;
    s.degree_total += g.degree(static_cast<NodeIndex>(i));
  }
  return p;
}

std::size_t Partition::max_cluster_size() const noexcept {
  std::size_t best = 0;
  for (const auto& [id, stats] : clusters_) best = std::max(best, stats.size);
  return best;
}

Partition renumber_by_size(const WeightedGraph& g, const Partition& p) {
  struct Entry {
    ClusterId id;
    std::size_t size;
    std::size_t first_member;
  };
  std::unordered_map<ClusterId, std::size_t> slot;
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < p.node_count(); ++i) {
    ClusterId c = p.cluster_of(static_cast<NodeIndex>(i));
    auto [it, inserted] = slot.emplace(c, entries.size());
    if (inserted) entries.push_back({c, 0, i});
    ++entries[it->second].size;
  }
  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (entries[a].size != entries[b].size) return entries[a].size > entries[b].size;
    return entries[a].first_member < entries[b].first_member;
  });
  std::vector<ClusterId> dense(entries.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) dense[order[rank]] = rank;

  std::vector<ClusterId> labels(p.node_count());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = dense[slot.at(p.cluster_of(static_cast<NodeIndex>(i)))];
  }
  return Partition::from_labels(g, std::move(labels));
}

void write_partition(const WeightedGraph& g, const Partition& p, const PartitionHeader& header,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "# algorithm=" << header.algorithm << " alpha=" << text::format_roundtrip(header.alpha)
      << " n_max=" << header.n_max << " gamma=" << text::format_roundtrip(header.gamma)
      << " seed=" << header.seed << '\n';
  out << "# nodes=" << p.node_count() << " clusters=" << p.cluster_count() << '\n';
  for (NodeIndex i = 0; i < p.node_count(); ++i) {
    out << g.id_of(i) << '\t' << p.cluster_of(i) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Partition read_partition(const WeightedGraph& g, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  constexpr ClusterId kUnset = std::numeric_limits<ClusterId>::max();
  std::vector<ClusterId> labels(g.node_count(), kUnset);
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    text::split_fields(line, fields);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 2) throw ParseError(path.string(), number, "expected 'node_id<TAB>cluster_id'");
    auto node = text::parse_u64(fields[0]);
    auto cluster = text::parse_u64(fields[1]);
    if (!node || !cluster) throw ParseError(path.string(), number, "invalid integer field");
    auto index = g.index_of(*node);
    if (!index) throw ParseError(path.string(), number, "node " + std::to_string(*node) + " not in graph");
    if (labels[*index] != kUnset) {
      throw ParseError(path.string(), number, "node " + std::to_string(*node) + " listed twice");
    }
    labels[*index] = *cluster;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kUnset) {
      throw DataError(path.string() + ": node " + std::to_string(g.id_of(static_cast<NodeIndex>(i))) +
                      " has no cluster");
    }
  }
  return Partition::from_labels(g, std::move(labels));
}

}  // namespace spillover
