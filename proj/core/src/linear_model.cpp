#include <Eigen/Dense>

#include "spillover/error.hpp"
#include "spillover/inference.hpp"

namespace spillover {

namespace {
constexpr double kRidge = 1e-8;
}

LinearPredictor LinearPredictor::fit(std::span<const std::vector<double>> x, std::span<const double> z) {
  if (x.size() != z.size()) throw InvalidArgument("linear fit: row count mismatch");
  if (x.size() < 2) throw DataError("linear fit needs at least 2 training rows");
  const auto rows = static_cast<Eigen::Index>(x.size());
  const auto p = static_cast<Eigen::Index>(x.front().size());

  Eigen::MatrixXd design(rows, p);
  Eigen::VectorXd target(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(x[i].size()) != p) throw InvalidArgument("linear fit: ragged covariates");
    for (Eigen::Index j = 0; j < p; ++j) design(i, j) = x[i][j];
    target(i) = z[i];
  }
  const Eigen::RowVectorXd x_mean = design.colwise().mean();
  const double z_mean = target.mean();

  LinearPredictor model;
  model.beta_.assign(static_cast<std::size_t>(p), 0.0);
  if (p > 0) {
    design.rowwise() -= x_mean;
    target.array() -= z_mean;
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += kRidge;
    Eigen::VectorXd beta = gram.ldlt().solve(design.transpose() * target);
    for (Eigen::Index j = 0; j < p; ++j) model.beta_[static_cast<std::size_t>(j)] = beta(j);
    model.intercept_ = z_mean - x_mean.dot(beta);
  } else {
    model.intercept_ = z_mean;
  }
  return model;
}

double LinearPredictor::predict(std::span<const double> x) const {
  if (x.size() != beta_.size()) throw InvalidArgument("predict: covariate count mismatch");
  double v = intercept_;
  for (std::size_t j = 0; j < x.size(); ++j) v += beta_[j] * x[j];
  return v;
}

}  // namespace spillover
