#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "spillover/clustering.hpp"
#include "spillover/error.hpp"
#include "spillover/random.hpp"

namespace spillover {

namespace {

class LabelPropagation {
 public:
  LabelPropagation(const WeightedGraph& g, std::size_t theta)
      : g_(g), theta_(theta), label_(g.node_count()), size_(2 * g.node_count(), 0),
        large_(2 * g.node_count(), false), weight_(2 * g.node_count(), -1.0) {
    std::iota(label_.begin(), label_.end(), std::size_t{0});
    for (std::size_t i = 0; i < label_.size(); ++i) size_[i] = 1;
  }

  // Sweeps over `nodes` until no label changes. Neighbors outside `allowed`
  // (when given) are ignored.
  void propagate(std::vector<std::size_t> nodes, const std::vector<bool>* allowed, Rng& rng,
                 std::size_t max_iters) {
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
      shuffle(std::span<std::size_t>(nodes), rng);
      std::size_t changed = 0;
      for (std::size_t i : nodes) {
        if (large_[label_[i]]) continue;
        auto best = best_label(i, allowed);
        if (best && *best != label_[i]) {
          --size_[label_[i]];
          ++size_[*best];
          label_[i] = *best;
          ++changed;
        }
      }
      refresh_large();
      if (changed == 0) break;
    }
  }

  void refresh_large() {
    for (std::size_t l = 0; l < size_.size(); ++l) large_[l] = large_[l] || size_[l] > theta_;
  }

  // Gives every node holding a large label a fresh label of its own.
  std::vector<std::size_t> reset_large() {
    std::vector<std::size_t> reset;
    for (std::size_t i = 0; i < label_.size(); ++i) {
      if (!large_[label_[i]]) continue;
      --size_[label_[i]];
      label_[i] = label_.size() + i;
      ++size_[label_[i]];
      reset.push_back(i);
    }
    return reset;
  }

  std::vector<ClusterId> labels() const { return {label_.begin(), label_.end()}; }

 private:
  std::optional<std::size_t> best_label(std::size_t i, const std::vector<bool>* allowed) {
    touched_.clear();
    for (const Neighbor& nb : g_.neighbors(static_cast<NodeIndex>(i))) {
      if (allowed && !(*allowed)[nb.node]) continue;
      std::size_t l = label_[nb.node];
      if (large_[l]) continue;
      if (weight_[l] < 0.0) {
        weight_[l] = 0.0;
        touched_.push_back(l);
      }
      weight_[l] += nb.weight;
    }
    std::optional<std::size_t> best;
    double best_weight = -1.0;
    for (std::size_t l : touched_) {
      if (weight_[l] > best_weight || (weight_[l] == best_weight && l < *best)) {
        best = l;
        best_weight = weight_[l];
      }
    }
    for (std::size_t l : touched_) weight_[l] = -1.0;
    return best;
  }

  const WeightedGraph& g_;
  std::size_t theta_;
  std::vector<std::size_t> label_;
  std::vector<std::size_t> size_;
  std::vector<bool> large_;
  std::vector<double> weight_;
  std::vector<std::size_t> touched_;
};

}  // namespace

Partition lpa_constrained(const WeightedGraph& g, std::size_t theta, std::uint64_t seed, std::size_t max_iters) {
  if (theta == 0) throw InvalidArgument("lpa_constrained: theta must be >= 1");
  LabelPropagation lpa(g, theta);
  Rng rng(seed);

  std::vector<std::size_t> all(g.node_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  lpa.propagate(all, nullptr, rng, max_iters);

  std::vector<std::size_t> reset = lpa.reset_large();
  if (!reset.empty()) {
    std::vector<bool> in_reset(g.node_count(), false);
    for (std::size_t i : reset) in_reset[i] = true;
    lpa.propagate(std::move(reset), &in_reset, rng, max_iters);
  }
  return renumber_by_size(g, Partition::from_labels(g, lpa.labels()));
}

}  // namespace spillover
