#pragma once

// Spillover simulation on Watts-Strogatz networks: perturb cluster ids to
// sweep the within-group share ratio, generate outcomes under a linear
// interference model, and fit observed ATE against WGSR.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "spillover/experiment.hpp"
#include "spillover/graph.hpp"

namespace spillover {

struct OutcomeModelConfig {
  /// Direct effect of being treated.
  double tau = 1.0;
  /// Spillover per treated, susceptible neighbor.
  double delta = 0.2;
  /// P(S_j = 1).
  double s_prob = 0.3;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Y_i = tau 1[i in T] + delta sum_{j ~ i} 1[j in T] S_j + eps_i.
/// S_j ~ Bernoulli(s_prob) is drawn for every node; neighbors are counted,
/// edge weights ignored.
std::vector<double> outcomes(const WeightedGraph& g, const Assignment& a, const OutcomeModelConfig& cfg);

/// mean(Y | treatment) - mean(Y | control); nullopt if either arm is empty.
std::optional<double> observed_ate(std::span<const double> y, const Assignment& a);

/// tau + delta * k_bar * s_prob with k_bar = 2|E| / n.
double true_ate(const WeightedGraph& g, const OutcomeModelConfig& cfg);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Everyone-treated minus everyone-control mean outcome, averaged over
/// `reps` independent draws.
MonteCarloEstimate true_ate_monte_carlo(const WeightedGraph& g, const OutcomeModelConfig& cfg, std::size_t reps);

struct NetworkSpec {
  std::size_t n = 10000;
  std::size_t k = 10;
  double p = 0.1;

  std::string label() const;
};

struct SweepConfig {
  std::vector<NetworkSpec> networks;
  std::vector<double> r_grid;
  std::size_t reps = 30;
  OutcomeModelConfig outcome;
  std::uint64_t seed = 0;
  /// Louvain resolution for the clustering step.
  double gamma = 1.0;
  std::uint32_t buckets = 10;
  std::vector<std::uint32_t> treatment_buckets{0};
  std::vector<std::uint32_t> control_buckets{1};
  /// 0 means one per hardware thread.
  unsigned threads = 1;

  /// n = 10000, k in {4, 10, 20}, p = 0.1, 10 r-levels, 30 reps.
  static SweepConfig paper_preset();
  /// `levels` evenly spaced points from 0 to 1 inclusive.
  static std::vector<double> default_r_grid(std::size_t levels = 10);

  void validate() const;
};

struct SweepCell {
  std::size_t network = 0;
  std::size_t level = 0;
  double r = 0.0;
  std::size_t rep = 0;
  /// Empty when an arm had no nodes or no events reached either arm.
  std::optional<double> wgsr;
  std::optional<double> ate_obs;
  std::optional<double> bias;

  bool valid() const { return wgsr && ate_obs; }
};

/// Replication means for one (network, r) pair over valid cells.
struct LevelSummary {
  std::size_t network = 0;
  std::size_t level = 0;
  double r = 0.0;
  std::size_t valid_reps = 0;
  double mean_wgsr = 0.0;
  double median_wgsr = 0.0;
  double mean_ate = 0.0;
  double mean_bias = 0.0;
  /// t-interval on the ATE mean with valid_reps - 1 df; NaN below 2 reps.
  double ate_ci_lo = 0.0;
  double ate_ci_hi = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x. Needs 2+ points with
/// distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct NetworkFit {
  std::string label;
  double mean_degree = 0.0;
  std::size_t cluster_count = 0;
  LineFit fit;
  /// intercept + slope.
  double extrapolated_ate = 0.0;
  double true_ate = 0.0;
  double bias_reduction = 0.0;
  std::size_t invalid_cells = 0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepCell> cells;
  std::vector<LevelSummary> levels;
  std::vector<NetworkFit> fits;
};

/// Runs every network x r x replication cell. Output does not depend on the
/// thread count.
SweepResult run_sweep(const SweepConfig& cfg);

/// 1 - |bias at the highest-WGSR level| / |bias at the lowest-WGSR level|,
/// using replication means; 0 when the two biases are equal.
double bias_reduction(std::span<const LevelSummary> levels_of_one_network);

/// Header `network,mean_degree,r,rep,wgsr,ate_obs,bias`; invalid cells leave
/// the last three fields empty.
void write_sweep_csv(const SweepResult& result, std::ostream& out);

}  // namespace spillover
