#pragma once

// Bucket-level treatment-effect inference for ratio metrics: delta-method
// pseudo-outcomes, Welch t-tests, CUPED and cross-fitted CUPAC.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spillover/experiment.hpp"

namespace spillover {

struct BucketRow {
  std::uint64_t bucket_id = 0;
  /// treatment or control.
  Arm arm = Arm::control;
  /// Metric numerator.
  double y = 0.0;
  /// Denominator, > 0.
  double n = 1.0;
  std::vector<double> x;
};

class BucketTable {
 public:
  BucketTable() = default;
  /// Validates unique ids, N > 0, finite values, arms in {treatment, control}
  /// and a uniform covariate arity.
  explicit BucketTable(std::vector<BucketRow> rows);

  std::span<const BucketRow> rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t covariate_count() const noexcept { return arity_; }
  std::size_t count(Arm arm) const;

 private:
  std::vector<BucketRow> rows_;
  std::size_t arity_ = 0;
};

/// CSV with header `bucket_id,arm,y,n[,x1,...,xp]`.
BucketTable parse_bucket_table(std::istream& in, const std::string& source);
BucketTable load_bucket_table(const std::filesystem::path& path);

struct RatioSummary {
  double treatment_ratio = 0.0;
  double control_ratio = 0.0;
  double ate = 0.0;
};

/// R = sum Y / sum N per arm.
RatioSummary aggregate_ratios(const BucketTable& t);

struct PseudoOutcomes {
  std::vector<double> z;
  double mu_y = 0.0;
  double mu_n = 0.0;
};

/// Z_b = mu_Y / mu_N + Y_b / mu_N - mu_Y N_b / mu_N^2 with mu_Y, mu_N the
/// means over all buckets of both arms.
PseudoOutcomes delta_pseudo(const BucketTable& t);

enum class Estimator { dim, cuped, cupac };
std::string_view to_string(Estimator e);

struct AnalysisReport {
  Estimator estimator = Estimator::dim;
  double ate = 0.0;
  double variance = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_treatment = 0;
  std::size_t n_control = 0;
  /// ate / R_ctrl * 100.
  std::optional<double> relative_diff_pct;
  std::optional<double> var_red;
  std::optional<double> theta;
  std::optional<std::size_t> folds;
  std::vector<std::size_t> covariates;
  /// Both arms had zero variance.
  bool degenerate_variance = false;
  /// CUPAC predictions carried no signal; the numbers are DIM's.
  bool no_signal = false;
  bool cross_fit = false;
};

/// Welch t-test on per-bucket values; `treated[i]` selects the arm. Exposed
/// so adjusted outcomes share one inference path. Needs 2+ values per arm.
AnalysisReport welch_test(std::span<const double> values, std::span<const std::uint8_t> treated);

AnalysisReport dim_inference(const BucketTable& t);

/// theta = Cov(Z, X_j) / Var(X_j) pooled over both arms, then DIM on
/// Z - theta (X_j - mean X_j).
AnalysisReport cuped(const BucketTable& t, std::size_t covariate_index);

/// Least squares with intercept; covariates are centered, and a 1e-8 ridge
/// on the Gram diagonal keeps collinear inputs solvable.
class LinearPredictor {
 public:
  static LinearPredictor fit(std::span<const std::vector<double>> x, std::span<const double> z);

  double predict(std::span<const double> x) const;
  std::span<const double> coefficients() const noexcept { return beta_; }
  double intercept() const noexcept { return intercept_; }

 private:
  std::vector<double> beta_;
  double intercept_ = 0.0;
};

struct CupacOptions {
  enum class Model { linear, constant };

  std::size_t folds = 5;
  std::uint64_t seed = 0;
  Model model = Model::linear;
  /// false: one model on all control buckets, predicted in-sample.
  bool cross_fit = true;
  /// Covariate indices to use; empty means all.
  std::vector<std::size_t> covariates;
};

/// fold(b) = unit_hash(bucket_id, seed) mod K.
std::size_t cupac_fold(std::uint64_t bucket_id, std::uint64_t seed, std::size_t folds);

/// Predicted Z for each row: out-of-fold for control, fold-averaged for
/// treatment (or in-sample for both without cross-fitting).
std::vector<double> cupac_predictions(const BucketTable& t, std::span<const double> z, const CupacOptions& opt);

AnalysisReport cupac(const BucketTable& t, const CupacOptions& opt);

/// 1 - Var(method) / Var(DIM).
double var_red(const AnalysisReport& report, const AnalysisReport& dim);

/// Covariates with |Pearson(Z, X_j)| >= threshold on `history`, ascending
/// index. Zero-variance covariates are never selected.
std::vector<std::size_t> select_covariates(const BucketTable& history, double threshold);

}  // namespace spillover
