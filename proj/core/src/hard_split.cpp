#include <algorithm>
#include <map>
#include <vector>

#include "spillover/clustering.hpp"
#include "spillover/error.hpp"

namespace spillover {

Partition hard_split(const WeightedGraph& g, const Partition& p, std::size_t n_max) {
  if (n_max == 0) throw InvalidArgument("hard_split: n_max must be >= 1");
  std::vector<ClusterId> labels(p.labels().begin(), p.labels().end());
  ClusterId next_id = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

  while (true) {
    std::map<ClusterId, std::vector<NodeIndex>> members;
    for (NodeIndex i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

    bool split_any = false;
    for (auto& [cluster, nodes] : members) {
      if (nodes.size() <= n_max) continue;
      split_any = true;
      // Connectivity is measured once per round, before any node leaves.
      std::vector<std::pair<double, NodeIndex>> conn;
      conn.reserve(nodes.size());
      for (NodeIndex i : nodes) {
        double c = 0.0;
        for (const Neighbor& nb : g.neighbors(i)) {
          if (labels[nb.node] == cluster) c += nb.weight;
        }
        conn.emplace_back(c, i);
      }
      std::sort(conn.begin(), conn.end());
      const std::size_t excess = nodes.size() - n_max;
      const ClusterId fresh = next_id++;
      for (std::size_t r = 0; r < excess; ++r) labels[conn[r].second] = fresh;
    }
    if (!split_any) break;
  }
  return Partition::from_labels(g, std::move(labels));
}

}  // namespace spillover
