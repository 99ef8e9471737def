#include "spillover/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "spillover/error.hpp"
#include "spillover/random.hpp"

namespace spillover {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Pooled population covariance; the 1/n factors cancel in theta.
double covariance(std::span<const double> a, std::span<const double> b) {
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size());
}

std::vector<std::uint8_t> treated_mask(const BucketTable& t) {
  std::vector<std::uint8_t> mask(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) mask[i] = t.rows()[i].arm == Arm::treatment ? 1 : 0;
  return mask;
}

void require_two_per_arm(const BucketTable& t) {
  if (t.count(Arm::treatment) < 2 || t.count(Arm::control) < 2) {
    throw DataError("inference needs at least 2 buckets per arm (treatment " +
                    std::to_string(t.count(Arm::treatment)) + ", control " + std::to_string(t.count(Arm::control)) +
                    ")");
  }
}

void attach_relative(AnalysisReport& r, const BucketTable& t) {
  const RatioSummary ratios = aggregate_ratios(t);
  if (ratios.control_ratio != 0.0) r.relative_diff_pct = r.ate / ratios.control_ratio * 100.0;
}

std::vector<double> adjust(std::span<const double> z, std::span<const double> control_variate, double theta) {
  const double m = mean_of(control_variate);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - theta * (control_variate[i] - m);
  return out;
}

std::vector<double> features(const BucketRow& row, std::span<const std::size_t> cols) {
  std::vector<double> f;
  f.reserve(cols.size());
  for (std::size_t c : cols) f.push_back(row.x[c]);
  return f;
}

}  // namespace

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::dim: return "DIM";
    case Estimator::cuped: return "CUPED";
    case Estimator::cupac: return "CUPAC";
  }
  return "DIM";
}

RatioSummary aggregate_ratios(const BucketTable& t) {
  double yt = 0.0, nt = 0.0, yc = 0.0, nc = 0.0;
  for (const BucketRow& r : t.rows()) {
    if (r.arm == Arm::treatment) {
      yt += r.y;
      nt += r.n;
    } else {
      yc += r.y;
      nc += r.n;
    }
  }
  if (nt <= 0.0 || nc <= 0.0) throw DataError("an arm has zero total N");
  RatioSummary s;
  s.treatment_ratio = yt / nt;
  s.control_ratio = yc / nc;
  s.ate = s.treatment_ratio - s.control_ratio;
  return s;
}

PseudoOutcomes delta_pseudo(const BucketTable& t) {
  if (t.size() == 0) throw DataError("empty bucket table");
  PseudoOutcomes p;
  for (const BucketRow& r : t.rows()) {
    p.mu_y += r.y;
    p.mu_n += r.n;
  }
  p.mu_y /= static_cast<double>(t.size());
  p.mu_n /= static_cast<double>(t.size());
  if (p.mu_n == 0.0) throw DataError("mean N is zero");
  const double ratio = p.mu_y / p.mu_n;
  p.z.reserve(t.size());
  for (const BucketRow& r : t.rows()) p.z.push_back(ratio + r.y / p.mu_n - ratio / p.mu_n * r.n);
  return p;
}

AnalysisReport welch_test(std::span<const double> values, std::span<const std::uint8_t> treated) {
  if (values.size() != treated.size()) throw InvalidArgument("welch_test: size mismatch");
  double sum[2] = {0.0, 0.0};
  std::size_t n[2] = {0, 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum[treated[i] ? 1 : 0] += values[i];
    ++n[treated[i] ? 1 : 0];
  }
  if (n[0] < 2 || n[1] < 2) throw DataError("inference needs at least 2 buckets per arm");
  const double mean[2] = {sum[0] / static_cast<double>(n[0]), sum[1] / static_cast<double>(n[1])};
  double ss[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int g = treated[i] ? 1 : 0;
    ss[g] += (values[i] - mean[g]) * (values[i] - mean[g]);
  }
  const double vc = ss[0] / static_cast<double>(n[0] - 1) / static_cast<double>(n[0]);
  const double vt = ss[1] / static_cast<double>(n[1] - 1) / static_cast<double>(n[1]);

  AnalysisReport r;
  r.n_control = n[0];
  r.n_treatment = n[1];
  r.ate = mean[1] - mean[0];
  r.variance = vt + vc;
  if (r.variance == 0.0) {
    r.degenerate_variance = true;
    r.df = static_cast<double>(n[0] + n[1] - 2);
    if (r.ate == 0.0) {
      r.t = 0.0;
      r.p_value = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), r.ate);
      r.p_value = 0.0;
    }
    r.ci_lo = r.ci_hi = r.ate;
    return r;
  }
  r.t = r.ate / std::sqrt(r.variance);
  r.df = r.variance * r.variance /
         (vt * vt / static_cast<double>(n[1] - 1) + vc * vc / static_cast<double>(n[0] - 1));
  boost::math::students_t dist(r.df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  const double crit = boost::math::quantile(boost::math::complement(dist, 0.025));
  r.ci_lo = r.ate - crit * std::sqrt(r.variance);
  r.ci_hi = r.ate + crit * std::sqrt(r.variance);
  return r;
}

AnalysisReport dim_inference(const BucketTable& t) {
  require_two_per_arm(t);
  PseudoOutcomes p = delta_pseudo(t);
  AnalysisReport r = welch_test(p.z, treated_mask(t));
  r.estimator = Estimator::dim;
  attach_relative(r, t);
  return r;
}

AnalysisReport cuped(const BucketTable& t, std::size_t covariate_index) {
  require_two_per_arm(t);
  if (covariate_index >= t.covariate_count()) {
    throw InvalidArgument("covariate index " + std::to_string(covariate_index) + " out of range (table has " +
                          std::to_string(t.covariate_count()) + ")");
  }
  PseudoOutcomes p = delta_pseudo(t);
  std::vector<double> x;
  x.reserve(t.size());
  for (const BucketRow& row : t.rows()) x.push_back(row.x[covariate_index]);
  const double var_x = covariance(x, x);
  if (!(var_x > 0.0)) throw DataError("CUPED covariate has zero variance");
  const double theta = covariance(p.z, x) / var_x;

  const std::vector<std::uint8_t> mask = treated_mask(t);
  AnalysisReport dim = welch_test(p.z, mask);
  AnalysisReport r = welch_test(adjust(p.z, x, theta), mask);
  r.estimator = Estimator::cuped;
  r.theta = theta;
  r.covariates = {covariate_index};
  r.var_red = var_red(r, dim);
  attach_relative(r, t);
  return r;
}

std::size_t cupac_fold(std::uint64_t bucket_id, std::uint64_t seed, std::size_t folds) {
  return static_cast<std::size_t>(unit_hash(bucket_id, seed) % folds);
}

namespace {

LinearPredictor fit_model(const BucketTable& t, std::span<const double> z, std::span<const std::size_t> rows,
                          std::span<const std::size_t> cols, CupacOptions::Model model) {
  std::vector<std::vector<double>> x;
  std::vector<double> target;
  x.reserve(rows.size());
  for (std::size_t i : rows) {
    x.push_back(model == CupacOptions::Model::linear ? features(t.rows()[i], cols) : std::vector<double>{});
    target.push_back(z[i]);
  }
  return LinearPredictor::fit(x, target);
}

std::vector<std::size_t> resolve_covariates(const BucketTable& t, const CupacOptions& opt) {
  std::vector<std::size_t> cols = opt.covariates;
  if (cols.empty()) {
    cols.resize(t.covariate_count());
    std::iota(cols.begin(), cols.end(), std::size_t{0});
  }
  for (std::size_t c : cols) {
    if (c >= t.covariate_count()) throw InvalidArgument("covariate index " + std::to_string(c) + " out of range");
  }
  return cols;
}

}  // namespace

std::vector<double> cupac_predictions(const BucketTable& t, std::span<const double> z, const CupacOptions& opt) {
  const std::vector<std::size_t> cols = resolve_covariates(t, opt);
  if (opt.model == CupacOptions::Model::linear && cols.empty()) throw InvalidArgument("CUPAC needs covariates");
  std::vector<std::size_t> control;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.rows()[i].arm == Arm::control) control.push_back(i);
  }
  auto predict = [&](const LinearPredictor& m, std::size_t i) {
    return opt.model == CupacOptions::Model::linear ? m.predict(features(t.rows()[i], cols)) : m.intercept();
  };

  std::vector<double> pred(t.size(), 0.0);
  if (!opt.cross_fit) {
    LinearPredictor m = fit_model(t, z, control, cols, opt.model);
    for (std::size_t i = 0; i < t.size(); ++i) pred[i] = predict(m, i);
    return pred;
  }

  if (opt.folds < 2) throw InvalidArgument("CUPAC needs K >= 2 folds");
  if (control.size() < opt.folds) {
    throw DataError("control arm has " + std::to_string(control.size()) + " buckets, fewer than K = " +
                    std::to_string(opt.folds));
  }
  std::vector<std::size_t> fold_of(t.size());
  for (std::size_t i : control) fold_of[i] = cupac_fold(t.rows()[i].bucket_id, opt.seed, opt.folds);

  for (std::size_t k = 0; k < opt.folds; ++k) {
    std::vector<std::size_t> train;
    for (std::size_t i : control) {
      if (fold_of[i] != k) train.push_back(i);
    }
    if (train.size() < 2) {
      throw DataError("fold " + std::to_string(k) + " leaves " + std::to_string(train.size()) +
                      " training rows; need at least 2");
    }
    LinearPredictor m = fit_model(t, z, train, cols, opt.model);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.rows()[i].arm == Arm::treatment) {
        pred[i] += predict(m, i) / static_cast<double>(opt.folds);
      } else if (fold_of[i] == k) {
        pred[i] = predict(m, i);
      }
    }
  }
  return pred;
}

AnalysisReport cupac(const BucketTable& t, const CupacOptions& opt) {
  require_two_per_arm(t);
  PseudoOutcomes p = delta_pseudo(t);
  const std::vector<std::uint8_t> mask = treated_mask(t);
  AnalysisReport dim = welch_test(p.z, mask);

  const std::vector<double> pred = cupac_predictions(t, p.z, opt);
  const double var_pred = covariance(pred, pred);
  const double var_z = covariance(p.z, p.z);

  AnalysisReport r;
  if (opt.model == CupacOptions::Model::constant || !(var_pred > 1e-14 * var_z) || var_pred == 0.0) {
    r = dim;
    r.no_signal = true;
    r.theta = 0.0;
  } else {
    const double theta = covariance(p.z, pred) / var_pred;
    r = welch_test(adjust(p.z, pred, theta), mask);
    r.theta = theta;
  }
  r.estimator = Estimator::cupac;
  r.var_red = var_red(r, dim);
  r.cross_fit = opt.cross_fit;
  if (opt.cross_fit) r.folds = opt.folds;
  if (opt.model == CupacOptions::Model::linear) r.covariates = resolve_covariates(t, opt);
  attach_relative(r, t);
  return r;
}

double var_red(const AnalysisReport& report, const AnalysisReport& dim) {
  if (report.variance == dim.variance) return 0.0;
  if (dim.variance == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 - report.variance / dim.variance;
}

std::vector<std::size_t> select_covariates(const BucketTable& history, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidArgument("correlation threshold must lie in [0, 1]");
  PseudoOutcomes p = delta_pseudo(history);
  const double var_z = covariance(p.z, p.z);
  std::vector<std::size_t> keep;
  std::vector<double> x(history.size());
  for (std::size_t j = 0; j < history.covariate_count(); ++j) {
    for (std::size_t i = 0; i < history.size(); ++i) x[i] = history.rows()[i].x[j];
    const double var_x = covariance(x, x);
    if (!(var_x > 0.0) || !(var_z > 0.0)) continue;
    const double corr = covariance(p.z, x) / std::sqrt(var_x * var_z);
    if (std::abs(corr) >= threshold) keep.push_back(j);
  }
  return keep;
}

}  // namespace spillover
