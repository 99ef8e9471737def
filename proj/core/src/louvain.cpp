#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "spillover/clustering.hpp"
#include "spillover/error.hpp"
#include "spillover/random.hpp"

namespace spillover {

void LouvainConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be >= 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be > 0");
  if (n_max == 0) throw InvalidArgument("n_max must be non-zero (negative disables the hard split)");
  if (max_passes < 1) throw InvalidArgument("max_passes must be >= 1");
  if (!(min_gain >= 0.0)) throw InvalidArgument("min_gain must be >= 0");
}

std::size_t LouvainConfig::penalty_threshold() const {
  std::uint64_t magnitude = n_max < 0 ? static_cast<std::uint64_t>(-(n_max + 1)) + 1 : static_cast<std::uint64_t>(n_max);
  return std::max<std::size_t>(1, magnitude / 2);
}

namespace {

using Community = std::uint32_t;

// Graph at one aggregation level. Self-loop weight of a super-node is the sum
// over ordered member pairs (twice the internal edge weight), and is not
// stored in the adjacency rows.
struct Level {
  std::vector<std::size_t> offsets{0};
  std::vector<Neighbor> adjacency;
  std::vector<double> self_loop;
  std::vector<double> degree;
  std::vector<std::size_t> size;

  std::size_t node_count() const { return degree.size(); }
  std::span<const Neighbor> neighbors(std::size_t i) const {
    return {adjacency.data() + offsets[i], adjacency.data() + offsets[i + 1]};
  }
};

Level base_level(const WeightedGraph& g) {
  Level lv;
  const std::size_t n = g.node_count();
  lv.offsets.resize(n + 1);
  lv.offsets[0] = 0;
  for (NodeIndex i = 0; i < n; ++i) {
    auto row = g.neighbors(i);
    lv.adjacency.insert(lv.adjacency.end(), row.begin(), row.end());
    lv.offsets[i + 1] = lv.adjacency.size();
  }
  lv.self_loop.assign(n, 0.0);
  lv.degree.assign(g.degrees().begin(), g.degrees().end());
  lv.size.assign(n, 1);
  return lv;
}

// Collapses each community into one node. `community` must be dense 0..k-1.
Level contract(const Level& lv, const std::vector<Community>& community, std::size_t k) {
  Level next;
  next.self_loop.assign(k, 0.0);
  next.degree.assign(k, 0.0);
  next.size.assign(k, 0);

  struct Arc {
    Community from;
    Community to;
    double weight;
  };
  std::vector<Arc> arcs;
  arcs.reserve(lv.adjacency.size());
  for (std::size_t u = 0; u < lv.node_count(); ++u) {
    const Community cu = community[u];
    next.self_loop[cu] += lv.self_loop[u];
    next.degree[cu] += lv.degree[u];
    next.size[cu] += lv.size[u];
    for (const Neighbor& nb : lv.neighbors(u)) {
      const Community cv = community[nb.node];
      if (cu == cv) {
        next.self_loop[cu] += nb.weight;
      } else {
        arcs.push_back({cu, cv, nb.weight});
      }
    }
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  next.offsets.assign(k + 1, 0);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (!next.adjacency.empty() && i > 0 && arcs[i - 1].from == arcs[i].from && arcs[i - 1].to == arcs[i].to) {
      next.adjacency.back().weight += arcs[i].weight;
    } else {
      next.adjacency.push_back({arcs[i].to, arcs[i].weight});
      ++next.offsets[arcs[i].from + 1];
    }
  }
  for (std::size_t c = 0; c < k; ++c) next.offsets[c + 1] += next.offsets[c];
  return next;
}

struct LevelOutcome {
  std::size_t sweeps = 0;
  std::size_t moves = 0;
  double score_gain = 0.0;
};

class LocalMover {
 public:
  LocalMover(const Level& lv, const LouvainConfig& cfg, double total_weight, std::size_t tau, double k_bar)
      : lv_(lv),
        cfg_(cfg),
        two_m_(2.0 * total_weight),
        tau_(tau),
        k_bar_(k_bar),
        community_(lv.node_count()),
        tot_(lv.degree),
        in_(lv.self_loop),
        csize_(lv.size),
        neighbor_weight_(lv.node_count(), -1.0) {
    std::iota(community_.begin(), community_.end(), Community{0});
  }

  LevelOutcome run(Rng& rng) {
    LevelOutcome outcome;
    std::vector<std::size_t> order(lv_.node_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    while (outcome.sweeps < static_cast<std::size_t>(cfg_.max_passes)) {
      ++outcome.sweeps;
      shuffle(std::span<std::size_t>(order), rng);
      std::size_t sweep_moves = 0;
      double sweep_gain = 0.0;
      for (std::size_t node : order) {
        double gain = visit(node);
        if (gain > 0.0) {
          ++sweep_moves;
          sweep_gain += gain;
        }
      }
      outcome.moves += sweep_moves;
      outcome.score_gain += sweep_gain;
      if (sweep_moves == 0 || sweep_gain < cfg_.min_gain) break;
    }
    return outcome;
  }

  // Q over the current level's communities, from maintained aggregates.
  double modularity() const {
    double q = 0.0;
    for (std::size_t c = 0; c < tot_.size(); ++c) {
      if (csize_[c] == 0) continue;
      q += in_[c] / two_m_ - cfg_.gamma * (tot_[c] / two_m_) * (tot_[c] / two_m_);
    }
    return q;
  }

  // Dense renumbering in order of first appearance; returns community count.
  std::size_t compact(std::vector<Community>& dense) const {
    std::vector<Community> remap(community_.size(), std::numeric_limits<Community>::max());
    dense.resize(community_.size());
    Community next = 0;
    for (std::size_t i = 0; i < community_.size(); ++i) {
      Community& slot = remap[community_[i]];
      if (slot == std::numeric_limits<Community>::max()) slot = next++;
      dense[i] = slot;
    }
    return next;
  }

 private:
  double score(Community c, double k_in, double k_i) const {
    double s = modularity_gain(k_in, k_i, tot_[c], two_m_ / 2.0, cfg_.gamma);
    if (cfg_.alpha > 0.0) s -= cfg_.alpha * size_penalty(csize_[c], tau_, k_bar_);
    return s;
  }

  // Returns the accepted score improvement, or 0 when the node stays.
  double visit(std::size_t node) {
    const Community own = community_[node];
    const double k_i = lv_.degree[node];
    const std::size_t s_i = lv_.size[node];

    touched_.clear();
    neighbor_weight_[own] = 0.0;
    touched_.push_back(own);
    for (const Neighbor& nb : lv_.neighbors(node)) {
      Community c = community_[nb.node];
      if (neighbor_weight_[c] < 0.0) {
        neighbor_weight_[c] = 0.0;
        touched_.push_back(c);
      }
      neighbor_weight_[c] += nb.weight;
    }

    // Detach.
    tot_[own] -= k_i;
    csize_[own] -= s_i;
    in_[own] -= 2.0 * neighbor_weight_[own] + lv_.self_loop[node];

    const double own_score = score(own, neighbor_weight_[own], k_i);
    Community best = own;
    double best_score = own_score;
    for (Community c : touched_) {
      double sc = score(c, neighbor_weight_[c], k_i);
      if (sc > best_score || (sc == best_score && std::tie(csize_[c], c) < std::tie(csize_[best], best))) {
        best = c;
        best_score = sc;
      }
    }

    Community target = own;
    double gain = 0.0;
    if (best != own && best_score > cfg_.min_gain && best_score - own_score > cfg_.min_gain) {
      target = best;
      gain = best_score - own_score;
    }

    tot_[target] += k_i;
    csize_[target] += s_i;
    in_[target] += 2.0 * neighbor_weight_[target] + lv_.self_loop[node];
    community_[node] = target;

    for (Community c : touched_) neighbor_weight_[c] = -1.0;
    return gain;
  }

  const Level& lv_;
  const LouvainConfig& cfg_;
  double two_m_;
  std::size_t tau_;
  double k_bar_;
  std::vector<Community> community_;
  std::vector<double> tot_;
  std::vector<double> in_;
  std::vector<std::size_t> csize_;
  std::vector<double> neighbor_weight_;
  std::vector<Community> touched_;
};

}  // namespace

Partition balanced_louvain(const WeightedGraph& g, const LouvainConfig& cfg, const LouvainObserver& observer) {
  cfg.validate();
  const std::size_t n = g.node_count();
  if (n == 0) return Partition::from_labels(g, {});

  std::vector<ClusterId> labels(n);
  std::iota(labels.begin(), labels.end(), ClusterId{0});

  // Edgeless graph: every node stays a singleton.
  if (g.total_weight() > 0.0) {
    const std::size_t tau = cfg.penalty_threshold();
    const double k_bar = g.mean_degree();
    Rng rng(cfg.seed);
    Level level = base_level(g);
    std::vector<Community> origin_to_level(n);
    std::iota(origin_to_level.begin(), origin_to_level.end(), Community{0});

    for (int pass = 0; pass < cfg.max_passes; ++pass) {
      LocalMover mover(level, cfg, g.total_weight(), tau, k_bar);
      LevelOutcome outcome = mover.run(rng);

      std::vector<Community> dense;
      const std::size_t k = mover.compact(dense);
      for (std::size_t v = 0; v < n; ++v) {
        origin_to_level[v] = dense[origin_to_level[v]];
        labels[v] = origin_to_level[v];
      }
      if (observer) {
        observer(LouvainLevelTrace{static_cast<std::size_t>(pass), outcome.sweeps, outcome.moves,
                                   outcome.score_gain, mover.modularity(), labels});
      }
      if (outcome.moves == 0 || k == level.node_count()) break;
      level = contract(level, dense, k);
    }
  }

  Partition result = Partition::from_labels(g, std::move(labels));
  if (cfg.n_max > 0) result = hard_split(g, result, static_cast<std::size_t>(cfg.n_max));
  return renumber_by_size(g, result);
}

Partition louvain(const WeightedGraph& g, double gamma, std::uint64_t seed) {
  LouvainConfig cfg;
  cfg.alpha = 0.0;
  cfg.n_max = -1;
  cfg.gamma = gamma;
  cfg.seed = seed;
  return balanced_louvain(g, cfg);
}

}  // namespace spillover
