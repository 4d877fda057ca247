#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "exbt/backtest/backtest.hpp"
#include "exbt/data/panel.hpp"
#include "exbt/granger/granger.hpp"
#include "exbt/harness/audit.hpp"
#include "exbt/harness/config.hpp"
#include "exbt/harness/cv.hpp"
#include "exbt/ml/model.hpp"

namespace exbt::harness {

/// Loads the configured panel, applies exclusions, forward-imputes, and
/// drops the columns the feature set leaves out.
data::Panel prepare_panel(const ExperimentSpec& spec);

using LearnerFactory = std::function<std::unique_ptr<ml::Learner>(const ml::ModelConfig&)>;

struct FoldReport {
  int fold = 0;  // 1-based
  bool failed = false;
  std::string reason;
  CvSplit split;
  backtest::BacktestMetrics metrics;
  double buy_and_hold_profit = 0.0;
  double perfect_profit = 0.0;
  std::optional<double> auc;
  std::optional<double> accuracy;
  std::optional<double> tau;
  ml::ModelConfig config;
  /// One per trained model (two for extrema: minima, then maxima).
  std::vector<granger::LagSelection> selections;
  std::vector<std::string> dropped_columns;
  backtest::TradeLog trades;
  std::vector<data::Date> test_dates;
};

/// Arithmetic means over the folds that did not fail. Sharpe, AUC and
/// accuracy average over the folds where they are defined.
struct Aggregate {
  int folds_ok = 0;
  int folds_failed = 0;
  double profit = 0.0;
  double excess_profit = 0.0;
  std::optional<double> sharpe;
  double trades = 0.0;
  std::optional<double> auc;
  std::optional<double> accuracy;
  double buy_and_hold_profit = 0.0;
  double perfect_profit = 0.0;
};

Aggregate aggregate(const std::vector<FoldReport>& folds);

struct CvReport {
  std::vector<FoldReport> folds;
  Aggregate aggregate;
};

/// Fits transforms, Granger selection, model(s) and threshold on the
/// training rows of `fold`, then trades the test block. Data and numerical
/// failures inside the fold mark it failed instead of throwing.
FoldReport run_fold(const data::Panel& panel, const ExperimentSpec& spec, const ml::ModelConfig& config,
                    const CvPlan& plan, int fold, LeakageAudit* audit = nullptr,
                    const LearnerFactory& factory = ml::make_learner);

/// All folds of the plan, evaluated on up to `jobs` threads. The result does
/// not depend on `jobs`.
CvReport run_cv(const data::Panel& panel, const ExperimentSpec& spec, const ml::ModelConfig& config,
                int jobs = 1, LeakageAudit* audit = nullptr, const LearnerFactory& factory = ml::make_learner);

/// One row per fold plus a `mean` row:
/// `fold,model,target,status,profit,excess_profit,sharpe,r_bar,sigma,n_days,trades,auc,accuracy,tau,
///  buy_and_hold_profit,perfect_profit,train_start,test_start,test_end,reason`
void write_metrics(const CvReport& report, const data::Panel& panel, const ExperimentSpec& spec,
                   const std::filesystem::path& path);
/// trades_<fold>.csv for every successful fold.
void write_fold_trades(const CvReport& report, const std::filesystem::path& dir);

/// Label for the metrics `target` column, e.g. `binary_updown` or `extrema_pair_w7`.
std::string target_label(const TargetSpec& t);

}  // namespace exbt::harness
