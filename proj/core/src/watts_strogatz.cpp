#include <cstdint>
#include <string>
#include <unordered_set>

#include <boost/random/bernoulli_distribution.hpp>

#include "spillover/error.hpp"
#include "spillover/graph.hpp"
#include "spillover/random.hpp"

namespace spillover {

namespace {

constexpr int kMaxRewireAttempts = 100;

std::uint64_t pair_key(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  return a < b ? a * n + b : b * n + a;
}

}  // namespace

WeightedGraph watts_strogatz(std::size_t n, std::size_t k, double p, std::uint64_t seed) {
  if (k % 2 != 0) throw InvalidArgument("watts_strogatz: k must be even, got " + std::to_string(k));
  if (k == 0 || k >= n) throw InvalidArgument("watts_strogatz: require 0 < k < n");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("watts_strogatz: p must lie in [0, 1]");

  const std::size_t half = k / 2;
  // targets[i * half + (j - 1)] is the current partner of lattice edge (i, i+j).
  std::vector<std::uint64_t> targets(n * half);
  std::unordered_set<std::uint64_t> present;
  present.reserve(n * half * 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j <= half; ++j) {
      std::uint64_t t = (i + j) % n;
      targets[i * half + (j - 1)] = t;
      present.insert(pair_key(i, t, n));
    }
  }

  Rng rng(seed);
  boost::random::bernoulli_distribution<double> rewire(p);
  // Rewire ring distance by ring distance, as in the original construction.
  for (std::size_t j = 1; j <= half; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!rewire(rng)) continue;
      std::uint64_t& target = targets[i * half + (j - 1)];
      for (int attempt = 0; attempt < kMaxRewireAttempts; ++attempt) {
        std::uint64_t w = uniform_index(rng, n);
        if (w == i || present.contains(pair_key(i, w, n))) continue;
        present.erase(pair_key(i, target, n));
        present.insert(pair_key(i, w, n));
        target = w;
        break;
      }
    }
  }

  GraphBuilder builder;
  for (std::size_t i = 0; i < n; ++i) builder.add_node(i);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < half; ++j) builder.add_edge(i, targets[i * half + j], 1.0);
  }
  return builder.build();
}

}  // namespace spillover
