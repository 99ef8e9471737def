#include <algorithm>

#include "spillover/clustering.hpp"
#include "spillover/error.hpp"

namespace spillover {

namespace {

// Sum over ordered node pairs (i, j) in the same cluster of w_ij.
double internal_weight(const WeightedGraph& g, const Partition& p) {
  double internal = 0.0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const ClusterId ci = p.cluster_of(i);
    for (const Neighbor& nb : g.neighbors(i)) {
      if (p.cluster_of(nb.node) == ci) internal += nb.weight;
    }
  }
  return internal;
}

}  // namespace

double modularity(const WeightedGraph& g, const Partition& p, double gamma) {
  const double m = g.total_weight();
  if (m <= 0.0) throw DataError("modularity undefined: graph has no edge weight");
  if (p.node_count() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
  const double two_m = 2.0 * m;
  double null_term = 0.0;
  for (const auto& [id, stats] : p.clusters()) null_term += stats.degree_total * stats.degree_total;
  return internal_weight(g, p) / two_m - gamma * null_term / (two_m * two_m);
}

QualityReport quality(const WeightedGraph& g, const Partition& p, double gamma, std::size_t threshold) {
  QualityReport r;
  r.modularity = modularity(g, p, gamma);
  r.intra_edge_ratio = internal_weight(g, p) / 2.0 / g.total_weight();
  r.cluster_count = p.cluster_count();
  double mean = static_cast<double>(p.node_count()) / static_cast<double>(p.cluster_count());
  double ss = 0.0;
  for (const auto& [id, stats] : p.clusters()) {
    double d = static_cast<double>(stats.size) - mean;
    ss += d * d;
    r.max_cluster = std::max(r.max_cluster, stats.size);
  }
  r.size_variance = ss / static_cast<double>(p.cluster_count());
  r.threshold = threshold;
  r.ctrl = r.max_cluster <= threshold;
  return r;
}

double composite_score(double q, double rho, double variance, double sigma_max, bool ctrl) {
  if (!(sigma_max > 0.0)) throw InvalidArgument("composite_score: sigma_max must be positive");
  double balance = 1.0 - variance / sigma_max;
  if (balance < 0.0) balance = 0.0;
  return 0.2 * q + 0.3 * rho + 0.3 * balance + 0.2 * (ctrl ? 1.0 : 0.0);
}

}  // namespace spillover
