#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "options.hpp"
#include "spillover/error.hpp"
#include "spillover/inference.hpp"

namespace spillover::cli {

namespace {

Json report_json(const AnalysisReport& r) {
  Json out = Json::object();
  out["estimator"] = std::string(to_string(r.estimator));
  out["ate"] = number(r.ate);
  out["variance"] = number(r.variance);
  out["std_error"] = number(std::sqrt(r.variance));
  out["t"] = number(r.t);
  out["df"] = number(r.df);
  out["p_value"] = number(r.p_value);
  out["ci95"] = {number(r.ci_lo), number(r.ci_hi)};
  out["n_treatment"] = r.n_treatment;
  out["n_control"] = r.n_control;
  out["relative_diff_pct"] = to_json(r.relative_diff_pct);
  out["var_red"] = to_json(r.var_red);
  out["theta"] = to_json(r.theta);
  out["folds"] = to_json(r.folds);
  out["covariates"] = r.covariates;
  out["cross_fit"] = r.cross_fit;
  out["degenerate_variance"] = r.degenerate_variance;
  out["no_signal"] = r.no_signal;
  return out;
}

// Control rows of `t` as their own table, for covariate screening.
BucketTable control_rows(const BucketTable& t) {
  std::vector<BucketRow> rows;
  for (const BucketRow& r : t.rows()) {
    if (r.arm == Arm::control) rows.push_back(r);
  }
  return BucketTable(std::move(rows));
}

class Analyze : public Command {
 public:
  explicit Analyze(CLI::App& root)
      : Command(root.add_subcommand("analyze", "DIM, CUPED and CUPAC reports for a bucket table")) {
    opts_.option("table", table_, "Bucket CSV `bucket_id,arm,y,n[,x1,...]`")->required();
    opts_.option("estimators", estimators_, "Comma-separated subset of dim,cuped,cupac")
        ->delimiter(',')
        ->check(CLI::IsMember({"dim", "cuped", "cupac"}));
    opts_.option("k", folds_, "CUPAC cross-fitting folds");
    opts_.option("seed", seed_, "CUPAC fold hash seed");
    opts_.option("model", model_, "CUPAC predictor")->check(CLI::IsMember({"linear", "constant"}));
    opts_.flag("no-cross-fit", no_cross_fit_, "CUPAC: train on all control buckets and predict in-sample");
    opts_.option("cuped-covariate", cuped_covariate_, "Covariate index (0-based) for CUPED");
    opts_.option("covariates", covariates_, "CUPAC covariate indices; all when empty")->delimiter(',');
    opts_.option("select-threshold", select_threshold_,
                 "Keep CUPAC covariates with |corr(Z, x)| at least this on the history table; negative disables");
    opts_.option("history", history_, "Bucket CSV used for covariate screening; control rows of --table when empty");
    opts_.option("json", json_, "Report JSON path (stdout when empty)");
  }

  void run() override {
    BucketTable t = load_bucket_table(table_);
    std::vector<std::size_t> covariates = covariates_;
    Json doc = document();
    if (select_threshold_ >= 0.0) {
      BucketTable history = history_.empty() ? control_rows(t) : load_bucket_table(history_);
      covariates = select_covariates(history, select_threshold_);
      if (covariates.empty()) std::cerr << "warning: no covariate passed --select-threshold\n";
      doc["selected_covariates"] = covariates;
    }

    RatioSummary ratios = aggregate_ratios(t);
    doc["buckets"] = {{"treatment", t.count(Arm::treatment)}, {"control", t.count(Arm::control)}};
    doc["ratios"] = {{"treatment", number(ratios.treatment_ratio)},
                     {"control", number(ratios.control_ratio)},
                     {"ate", number(ratios.ate)}};

    Json reports = Json::array();
    for (const std::string& e : estimators_) {
      if (e == "dim") {
        reports.push_back(report_json(dim_inference(t)));
      } else if (e == "cuped") {
        reports.push_back(report_json(cuped(t, cuped_covariate_)));
      } else {
        if (select_threshold_ >= 0.0 && covariates.empty()) {
          throw DataError("CUPAC has no covariates left after screening");
        }
        CupacOptions opt;
        opt.folds = folds_;
        opt.seed = seed_;
        opt.model = model_ == "constant" ? CupacOptions::Model::constant : CupacOptions::Model::linear;
        opt.cross_fit = !no_cross_fit_;
        opt.covariates = covariates;
        reports.push_back(report_json(cupac(t, opt)));
      }
    }
    doc["reports"] = reports;
    emit(doc, json_);
  }

 private:
  std::string table_;
  std::vector<std::string> estimators_{"dim", "cuped", "cupac"};
  std::size_t folds_ = 5;
  std::uint64_t seed_ = 0;
  std::string model_ = "linear";
  bool no_cross_fit_ = false;
  std::size_t cuped_covariate_ = 0;
  std::vector<std::size_t> covariates_;
  double select_threshold_ = -1.0;
  std::string history_;
  std::string json_;
};

}  // namespace

std::unique_ptr<Command> make_analyze(CLI::App& root) { return std::make_unique<Analyze>(root); }

}  // namespace spillover::cli
