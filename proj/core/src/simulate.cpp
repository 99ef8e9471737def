#include "spillover/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "spillover/clustering.hpp"
#include "spillover/error.hpp"
#include "spillover/random.hpp"
#include "spillover/text_io.hpp"

namespace spillover {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Seed-derivation tags, one per random stream of the sweep.
constexpr std::uint64_t kTagGraph = 0x100;
constexpr std::uint64_t kTagCluster = 0x200;
constexpr std::uint64_t kTagPerturb = 0x300;
constexpr std::uint64_t kTagOutcome = 0x400;

std::vector<std::uint8_t> draw_susceptible(std::size_t n, double s_prob, Rng& rng) {
  boost::random::bernoulli_distribution<double> coin(s_prob);
  std::vector<std::uint8_t> s(n);
  for (auto& v : s) v = coin(rng) ? 1 : 0;
  return s;
}

void add_noise(std::vector<double>& y, double sd, Rng& rng) {
  if (sd <= 0.0) return;
  boost::random::normal_distribution<double> normal(0.0, sd);
  for (double& v : y) v += normal(rng);
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double neighbor_mean_degree(const WeightedGraph& g) {
  if (g.node_count() == 0) return 0.0;
  return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
}

struct PreparedNetwork {
  WeightedGraph graph;
  Partition partition;
  ShareEventLog events;
  double mean_degree;
  double true_ate;
};

PreparedNetwork prepare(const SweepConfig& cfg, std::size_t index) {
  const NetworkSpec& spec = cfg.networks[index];
  WeightedGraph g = watts_strogatz(spec.n, spec.k, spec.p, derive_seed(cfg.seed, kTagGraph + index));
  Partition p = louvain(g, cfg.gamma, derive_seed(cfg.seed, kTagCluster + index));
  ShareEventLog events = graph_events(g);
  const double k_bar = neighbor_mean_degree(g);
  const double ate = true_ate(g, cfg.outcome);
  return PreparedNetwork{std::move(g), std::move(p), std::move(events), k_bar, ate};
}

SweepCell run_cell(const SweepConfig& cfg, const PreparedNetwork& net, std::size_t network, std::size_t level,
                   std::size_t rep, std::uint64_t cell_key) {
  SweepCell cell;
  cell.network = network;
  cell.level = level;
  cell.r = cfg.r_grid[level];
  cell.rep = rep;

  Partition perturbed =
      perturb_cids(net.graph, net.partition, cell.r, derive_seed(derive_seed(cfg.seed, kTagPerturb), cell_key));
  AssignmentSpec spec;
  spec.buckets = cfg.buckets;
  spec.treatment_buckets = cfg.treatment_buckets;
  spec.control_buckets = cfg.control_buckets;
  spec.salt = cfg.seed ^ static_cast<std::uint64_t>(rep);
  Assignment a = assign(perturbed, spec);

  OutcomeModelConfig outcome = cfg.outcome;
  outcome.seed = derive_seed(cfg.outcome.seed, derive_seed(derive_seed(cfg.seed, kTagOutcome), cell_key));
  std::vector<double> y = outcomes(net.graph, a, outcome);

  cell.wgsr = wgsr(net.events, a, Arm::treatment, Arm::control);
  cell.ate_obs = observed_ate(y, a);
  if (cell.valid()) {
    cell.bias = *cell.ate_obs - net.true_ate;
  } else {
    cell.wgsr.reset();
    cell.ate_obs.reset();
  }
  return cell;
}

LevelSummary summarize(const SweepConfig& cfg, std::span<const SweepCell> cells, std::size_t network,
                       std::size_t level) {
  LevelSummary s;
  s.network = network;
  s.level = level;
  s.r = cfg.r_grid[level];
  std::vector<double> w;
  std::vector<double> ate;
  std::vector<double> bias;
  for (const SweepCell& c : cells) {
    if (c.network != network || c.level != level || !c.valid()) continue;
    w.push_back(*c.wgsr);
    ate.push_back(*c.ate_obs);
    bias.push_back(*c.bias);
  }
  s.valid_reps = ate.size();
  if (ate.empty()) {
    s.mean_wgsr = s.median_wgsr = s.mean_ate = s.mean_bias = s.ate_ci_lo = s.ate_ci_hi = kNaN;
    return s;
  }
  s.mean_wgsr = mean_of(w);
  s.median_wgsr = median_of(w);
  s.mean_ate = mean_of(ate);
  s.mean_bias = mean_of(bias);
  if (ate.size() < 2) {
    s.ate_ci_lo = s.ate_ci_hi = kNaN;
    return s;
  }
  double ss = 0.0;
  for (double v : ate) ss += (v - s.mean_ate) * (v - s.mean_ate);
  const double n = static_cast<double>(ate.size());
  const double se = std::sqrt(ss / (n - 1.0) / n);
  boost::math::students_t dist(n - 1.0);
  const double crit = boost::math::quantile(boost::math::complement(dist, 0.025));
  s.ate_ci_lo = s.mean_ate - crit * se;
  s.ate_ci_hi = s.mean_ate + crit * se;
  return s;
}

}  // namespace

void OutcomeModelConfig::validate() const {
  if (!std::isfinite(tau) || !std::isfinite(delta)) throw InvalidArgument("tau and delta must be finite");
  if (!(s_prob >= 0.0 && s_prob <= 1.0)) throw InvalidArgument("s_prob must lie in [0, 1]");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw InvalidArgument("noise_sd must be >= 0");
}

std::vector<double> outcomes(const WeightedGraph& g, const Assignment& a, const OutcomeModelConfig& cfg) {
  cfg.validate();
  if (a.node_count() != g.node_count()) throw InvalidArgument("assignment does not cover the graph");
  const std::size_t n = g.node_count();
  Rng rng(cfg.seed);
  std::vector<std::uint8_t> s = draw_susceptible(n, cfg.s_prob, rng);
  std::vector<std::uint8_t> exposed(n);
  for (NodeIndex j = 0; j < n; ++j) exposed[j] = (a.arm_of_node(j) == Arm::treatment && s[j]) ? 1 : 0;

  std::vector<double> y(n);
  for (NodeIndex i = 0; i < n; ++i) {
    std::size_t active = 0;
    for (const Neighbor& nb : g.neighbors(i)) active += exposed[nb.node];
    y[i] = (a.arm_of_node(i) == Arm::treatment ? cfg.tau : 0.0) + cfg.delta * static_cast<double>(active);
  }
  add_noise(y, cfg.noise_sd, rng);
  return y;
}

std::optional<double> observed_ate(std::span<const double> y, const Assignment& a) {
  double sum_t = 0.0, sum_c = 0.0;
  std::size_t n_t = 0, n_c = 0;
  for (NodeIndex i = 0; i < y.size(); ++i) {
    switch (a.arm_of_node(i)) {
      case Arm::treatment: sum_t += y[i]; ++n_t; break;
      case Arm::control: sum_c += y[i]; ++n_c; break;
      case Arm::holdout: break;
    }
  }
  if (n_t == 0 || n_c == 0) return std::nullopt;
  return sum_t / static_cast<double>(n_t) - sum_c / static_cast<double>(n_c);
}

double true_ate(const WeightedGraph& g, const OutcomeModelConfig& cfg) {
  cfg.validate();
  return cfg.tau + cfg.delta * neighbor_mean_degree(g) * cfg.s_prob;
}

MonteCarloEstimate true_ate_monte_carlo(const WeightedGraph& g, const OutcomeModelConfig& cfg, std::size_t reps) {
  cfg.validate();
  if (reps == 0) throw InvalidArgument("at least one replication required");
  if (g.node_count() == 0) throw InvalidArgument("empty graph");
  const std::size_t n = g.node_count();
  std::vector<double> diffs;
  diffs.reserve(reps);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    Rng rng(derive_seed(cfg.seed, rep));
    std::vector<std::uint8_t> s = draw_susceptible(n, cfg.s_prob, rng);
    std::vector<double> all_treated(n);
    for (NodeIndex i = 0; i < n; ++i) {
      std::size_t active = 0;
      for (const Neighbor& nb : g.neighbors(i)) active += s[nb.node];
      all_treated[i] = cfg.tau + cfg.delta * static_cast<double>(active);
    }
    std::vector<double> all_control(n, 0.0);
    add_noise(all_treated, cfg.noise_sd, rng);
    add_noise(all_control, cfg.noise_sd, rng);
    diffs.push_back(mean_of(all_treated) - mean_of(all_control));
  }
  MonteCarloEstimate est;
  est.mean = mean_of(diffs);
  if (reps > 1) {
    double ss = 0.0;
    for (double d : diffs) ss += (d - est.mean) * (d - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  }
  return est;
}

std::string NetworkSpec::label() const {
  return "ws_n" + std::to_string(n) + "_k" + std::to_string(k) + "_p" + text::format_roundtrip(p);
}

std::vector<double> SweepConfig::default_r_grid(std::size_t levels) {
  if (levels < 2) throw InvalidArgument("r grid needs at least 2 levels");
  std::vector<double> grid(levels);
  for (std::size_t i = 0; i < levels; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(levels - 1);
  return grid;
}

SweepConfig SweepConfig::paper_preset() {
  SweepConfig cfg;
  cfg.networks = {{10000, 4, 0.1}, {10000, 10, 0.1}, {10000, 20, 0.1}};
  cfg.r_grid = default_r_grid(10);
  cfg.reps = 30;
  return cfg;
}

void SweepConfig::validate() const {
  if (reps < 2) throw InvalidArgument("at least 2 replications required for CI");
  if (networks.empty()) throw InvalidArgument("no networks to simulate");
  if (r_grid.empty()) throw InvalidArgument("empty r grid");
  for (double r : r_grid) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("r values must lie in [0, 1]");
  }
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
  outcome.validate();
  AssignmentSpec spec{buckets, treatment_buckets, control_buckets, 0};
  spec.validate();
  if (treatment_buckets.empty() || control_buckets.empty()) {
    throw InvalidArgument("both arms need at least one bucket");
  }
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_line: x and y differ in length");
  if (x.size() < 2) throw InvalidArgument("fit_line: need at least 2 points");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw InvalidArgument("fit_line: x has no spread");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.points = x.size();
  return f;
}

double bias_reduction(std::span<const LevelSummary> levels) {
  const LevelSummary* lo = nullptr;
  const LevelSummary* hi = nullptr;
  for (const LevelSummary& s : levels) {
    if (s.valid_reps == 0) continue;
    if (!lo || s.mean_wgsr < lo->mean_wgsr) lo = &s;
    if (!hi || s.mean_wgsr > hi->mean_wgsr) hi = &s;
  }
  if (!lo) throw DataError("no valid levels for bias reduction");
  const double at_hi = std::abs(hi->mean_bias);
  const double at_lo = std::abs(lo->mean_bias);
  if (at_hi == at_lo) return 0.0;
  return 1.0 - at_hi / at_lo;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.config = cfg;

  std::vector<PreparedNetwork> nets;
  nets.reserve(cfg.networks.size());
  for (std::size_t i = 0; i < cfg.networks.size(); ++i) nets.push_back(prepare(cfg, i));

  const std::size_t levels = cfg.r_grid.size();
  const std::size_t total = cfg.networks.size() * levels * cfg.reps;
  result.cells.resize(total);

  // Cell key = position in (network, level, rep) order, so each worker writes
  // its own slot and the merge is trivially deterministic.
  auto work = [&](std::size_t key) {
    const std::size_t rep = key % cfg.reps;
    const std::size_t level = (key / cfg.reps) % levels;
    const std::size_t network = key / (cfg.reps * levels);
    result.cells[key] = run_cell(cfg, nets[network], network, level, rep, key);
  };

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  if (threads <= 1) {
    for (std::size_t key = 0; key < total; ++key) work(key);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t key = next++; key < total && !failed; key = next++) {
          try {
            work(key);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (std::size_t ni = 0; ni < cfg.networks.size(); ++ni) {
    const std::size_t first = result.levels.size();
    for (std::size_t li = 0; li < levels; ++li) result.levels.push_back(summarize(cfg, result.cells, ni, li));
    std::span<const LevelSummary> mine(result.levels.data() + first, levels);

    NetworkFit fit;
    fit.label = cfg.networks[ni].label();
    fit.mean_degree = nets[ni].mean_degree;
    fit.cluster_count = nets[ni].partition.cluster_count();
    fit.true_ate = nets[ni].true_ate;
    for (const SweepCell& c : result.cells) {
      if (c.network == ni && !c.valid()) ++fit.invalid_cells;
    }
    std::vector<double> xs, ys;
    for (const LevelSummary& s : mine) {
      if (s.valid_reps == 0) continue;
      xs.push_back(s.mean_wgsr);
      ys.push_back(s.mean_ate);
    }
    if (xs.size() >= 2) {
      fit.fit = fit_line(xs, ys);
      fit.extrapolated_ate = fit.fit.intercept + fit.fit.slope;
      fit.bias_reduction = bias_reduction(mine);
    } else {
      fit.fit.slope = fit.fit.intercept = fit.fit.r2 = kNaN;
      fit.extrapolated_ate = fit.bias_reduction = kNaN;
    }
    result.fits.push_back(fit);
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "network,mean_degree,r,rep,wgsr,ate_obs,bias\n";
  for (const SweepCell& c : result.cells) {
    const NetworkFit& fit = result.fits[c.network];
    out << fit.label << ',' << text::format_fixed9(fit.mean_degree) << ',' << text::format_fixed9(c.r) << ','
        << c.rep << ',';
    if (c.valid()) {
      out << text::format_fixed9(*c.wgsr) << ',' << text::format_fixed9(*c.ate_obs) << ','
          << text::format_fixed9(*c.bias);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

}  // namespace spillover
