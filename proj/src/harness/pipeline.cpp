#include "exbt/harness/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "exbt/error.hpp"
#include "exbt/ml/design.hpp"
#include "exbt/ml/metrics.hpp"
#include "exbt/prep/transforms.hpp"
#include "exbt/targets/targets.hpp"

namespace exbt::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using targets::TargetKind;

std::vector<ml::FeatureRef> features_from(const granger::LagSelection& sel, const std::string& price_column) {
  std::vector<ml::FeatureRef> out;
  for (const auto& u : sel.selected()) {
    if (u.lag > 0) {
      out.push_back({u.column, u.lag});
    } else {
      for (int l = 1; l <= sel.max_lag; ++l) out.push_back({u.column, l});
    }
  }
  if (out.empty()) {
    for (int l = 1; l <= sel.max_lag; ++l) out.push_back({price_column, l});
  }
  return out;
}

struct TrainedModel {
  std::vector<ml::FeatureRef> features;
  std::unique_ptr<ml::FittedModel> model;
  Eigen::VectorXd train_scores;
  Eigen::VectorXd train_labels;
};

/// Predictions for rows [begin, end), NaN where a feature is unavailable.
Eigen::VectorXd predict_rows(const TrainedModel& m, const data::Panel& transformed, Eigen::Index begin,
                             Eigen::Index end, std::vector<Eigen::Index>* rows_read) {
  const ml::DesignMatrix d = ml::build_design(transformed, m.features, begin, end);
  Eigen::VectorXd out = Eigen::VectorXd::Constant(end - begin, kNaN);
  if (d.size() == 0) return out;
  const Eigen::VectorXd p = m.model->predict(d.rows).values;
  for (Eigen::Index r = 0; r < d.size(); ++r) out[d.row_index[std::size_t(r)] - begin] = p[r];
  if (rows_read) rows_read->insert(rows_read->end(), d.row_index.begin(), d.row_index.end());
  return out;
}

/// Direction labels and scores used for AUC/accuracy of a regression model.
double direction(double v) { return std::isnan(v) ? kNaN : (v > 0.0 ? 1.0 : 0.0); }

struct Scored {
  std::optional<double> auc;
  std::optional<double> accuracy;
};

Scored score(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels, double cut) {
  std::vector<double> s, l;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i]) || std::isnan(labels[i])) continue;
    s.push_back(scores[i]);
    l.push_back(labels[i]);
  }
  Scored out;
  if (s.empty()) return out;
  const Eigen::Map<const Eigen::VectorXd> sv(s.data(), Eigen::Index(s.size()));
  const Eigen::Map<const Eigen::VectorXd> lv(l.data(), Eigen::Index(l.size()));
  out.accuracy = ml::accuracy((sv.array() > cut).cast<double>().matrix(), lv);
  const double pos = lv.sum();
  if (pos > 0.0 && pos < double(lv.size())) out.auc = ml::auc_roc(sv, lv);
  return out;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& v) {
  double sum = 0.0;
  int n = 0;
  for (const auto& x : v) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::string opt(const std::optional<double>& v) { return v ? data::format_double(*v) : std::string(); }

}  // namespace

std::string target_label(const TargetSpec& t) {
  std::string s(targets::to_string(t.kind));
  if (t.kind == TargetKind::extrema_pair) s += "_w" + std::to_string(t.window);
  return s;
}

data::Panel prepare_panel(const ExperimentSpec& spec) {
  data::Panel p = data::load_panel(spec.data.panel, spec.data.price_column);
  if (spec.data.exclusions) p = data::apply_exclusions(p, data::load_exclusions(*spec.data.exclusions));
  p = data::impute_forward(p);
  std::vector<std::string> drop = spec.data.drop;
  if (spec.data.feature_set == FeatureSet::without_nlp) {
    for (const auto& c : p.columns()) {
      if (c.role == data::Role::nlp_score) drop.push_back(c.name);
    }
  }
  return drop.empty() ? p : p.without_columns(drop);
}

FoldReport run_fold(const data::Panel& panel, const ExperimentSpec& spec, const ml::ModelConfig& config,
                    const CvPlan& plan, int fold, LeakageAudit* audit, const LearnerFactory& factory) {
  if (fold < 1 || fold > int(plan.splits.size())) throw ConfigError("run_fold: fold out of range");
  FoldReport rep;
  rep.fold = fold;
  rep.config = config;
  rep.split = plan.splits[std::size_t(fold - 1)];
  const Eigen::Index train_end = rep.split.train.end;
  const Eigen::Index test_begin = rep.split.test.begin, test_end = rep.split.test.end;
  auto note = [&](const char* purpose, Eigen::Index b, Eigen::Index e, bool fit = true) {
    if (audit) audit->record(fold, purpose, b, e, test_begin, fit);
  };
  auto note_rows = [&](const char* purpose, const std::vector<Eigen::Index>& rows, bool fit = true) {
    if (audit) audit->record_rows(fold, purpose, rows, test_begin, fit);
  };

  try {
    const data::Panel train = panel.slice(0, std::size_t(train_end));
    for (const auto& name : train.feature_names()) {
      const auto& v = train.values(name);
      const Eigen::Index observed = v.size() - Eigen::Index(train.first_observed(name));
      if (observed < spec.preprocess.min_observations) rep.dropped_columns.push_back(name);
    }
    const data::Panel usable_train = train.without_columns(rep.dropped_columns);
    note("transform_fit", 0, Eigen::Index(usable_train.size()));
    const std::vector<prep::FeatureMeta> meta =
        prep::fit_transform_plan(usable_train, spec.preprocess.alpha, spec.preprocess.max_diff);

    const data::Panel visible = panel.slice(0, std::size_t(test_end)).without_columns(rep.dropped_columns);
    const data::Panel transformed = prep::apply_transforms(visible, meta);
    const data::Panel transformed_train = transformed.slice(0, std::size_t(train_end));

    const Eigen::VectorXd train_price = usable_train.price();
    note("label_fit", 0, train_price.size());
    const targets::TargetSeries train_target = targets::make_target(spec.target.kind, train_price, spec.target.window);

    std::vector<std::string> skip;
    for (const auto& m : meta) {
      if (m.constant) skip.push_back(m.column);
    }
    const bool classification = train_target.is_classification();
    const ml::Task task = classification ? ml::Task::classification : ml::Task::regression;

    std::vector<TrainedModel> models;
    for (int which = 0; which < train_target.label_count(); ++which) {
      const Eigen::VectorXd labels = train_target.labels(which);
      note("granger", 0, Eigen::Index(transformed_train.size()));
      rep.selections.push_back(granger::select_features(transformed_train, labels, spec.selection.mode,
                                                        spec.selection.alpha, spec.selection.max_lag,
                                                        spec.selection.own_lags, skip));
      TrainedModel tm;
      tm.features = features_from(rep.selections.back(), panel.price_column());
      ml::DesignMatrix d = ml::build_design(transformed_train, tm.features, 0, train_end);
      tm.train_labels = ml::restrict_to_labelled(d, labels);
      if (d.size() == 0) throw DataError("no complete training rows");
      note_rows("model_fit", d.row_index);
      const targets::ClassWeights weights = classification ? targets::class_weights(tm.train_labels)
                                                           : targets::ClassWeights{};
      tm.model = factory(config)->fit(d.rows, tm.train_labels, task, weights);
      tm.train_scores = tm.model->predict(d.rows).values;
      note_rows("threshold_fit", d.row_index);
      models.push_back(std::move(tm));
    }

    if (classification) {
      Eigen::Index total = 0;
      for (const auto& m : models) total += m.train_scores.size();
      Eigen::VectorXd s(total), l(total);
      Eigen::Index at = 0;
      for (const auto& m : models) {
        s.segment(at, m.train_scores.size()) = m.train_scores;
        l.segment(at, m.train_labels.size()) = m.train_labels;
        at += m.train_scores.size();
      }
      rep.tau = ml::threshold_search(s, l, ml::default_threshold_grid()).tau;
    }

    // Simulation on the test block.
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::VectorXd> preds;
    for (const auto& m : models) preds.push_back(predict_rows(m, transformed, test_begin, test_end, &rows));
    note_rows("predict", rows, false);

    const Eigen::VectorXd test_price = panel.price().segment(test_begin, test_end - test_begin);
    note("simulate", test_begin, test_end, false);
    switch (spec.target.kind) {
      case TargetKind::continuous_return:
        rep.trades = backtest::simulate_regression_strategy(preds[0], test_price, spec.cost);
        break;
      case TargetKind::binary_updown:
        rep.trades = backtest::simulate_binary_strategy(preds[0], *rep.tau, test_price, spec.cost);
        break;
      case TargetKind::extrema_pair:
        rep.trades = backtest::simulate_extrema_strategy(preds[0], preds[1], *rep.tau, test_price, spec.cost);
        break;
    }
    const backtest::TradeLog bench = backtest::buy_and_hold_log(test_price);
    rep.metrics = backtest::compute_metrics(rep.trades, bench);
    rep.buy_and_hold_profit = bench.profit();
    const targets::TargetSeries test_block_target =
        targets::make_target(spec.target.kind, test_price, spec.target.window);
    rep.perfect_profit = backtest::perfect_knowledge_log(test_block_target, test_price).profit();

    // Out-of-sample classification quality against labels that may look past
    // the block end only as far as the panel's visible span.
    note("evaluate", 0, test_end, false);
    const targets::TargetSeries eval_target =
        targets::make_target(spec.target.kind, panel.price().head(test_end), spec.target.window);
    std::vector<std::optional<double>> aucs, accs;
    for (std::size_t j = 0; j < preds.size(); ++j) {
      Eigen::VectorXd labels = eval_target.labels(int(j)).segment(test_begin, test_end - test_begin);
      Eigen::VectorXd s = preds[j];
      double cut = rep.tau.value_or(0.0);
      if (!classification) labels = labels.unaryExpr(&direction);
      const Scored sc = score(s, labels, cut);
      aucs.push_back(sc.auc);
      accs.push_back(sc.accuracy);
    }
    rep.auc = mean_of(aucs);
    rep.accuracy = mean_of(accs);
    rep.test_dates.assign(panel.dates().begin() + test_begin, panel.dates().begin() + test_end);
  } catch (const DataError& e) {
    rep.failed = true;
    rep.reason = e.what();
  } catch (const NumericalError& e) {
    rep.failed = true;
    rep.reason = e.what();
  }
  return rep;
}

Aggregate aggregate(const std::vector<FoldReport>& folds) {
  Aggregate a;
  std::vector<std::optional<double>> sharpe, auc, acc;
  for (const auto& f : folds) {
    if (f.failed) {
      ++a.folds_failed;
      continue;
    }
    ++a.folds_ok;
    a.profit += f.metrics.profit;
    a.excess_profit += f.metrics.excess_profit;
    a.trades += f.metrics.trades;
    a.buy_and_hold_profit += f.buy_and_hold_profit;
    a.perfect_profit += f.perfect_profit;
    sharpe.push_back(f.metrics.sharpe);
    auc.push_back(f.auc);
    acc.push_back(f.accuracy);
  }
  if (a.folds_ok > 0) {
    const double n = a.folds_ok;
    a.profit /= n;
    a.excess_profit /= n;
    a.trades /= n;
    a.buy_and_hold_profit /= n;
    a.perfect_profit /= n;
  }
  a.sharpe = mean_of(sharpe);
  a.auc = mean_of(auc);
  a.accuracy = mean_of(acc);
  return a;
}

CvReport run_cv(const data::Panel& panel, const ExperimentSpec& spec, const ml::ModelConfig& config, int jobs,
                LeakageAudit* audit, const LearnerFactory& factory) {
  const CvPlan plan = make_cv_splits(Eigen::Index(panel.size()), spec.folds);
  CvReport out;
  out.folds.resize(plan.splits.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < int(plan.splits.size()); i = next++) {
      out.folds[std::size_t(i)] = run_fold(panel, spec, config, plan, i + 1, audit, factory);
    }
  };
  const int n_threads = std::clamp(jobs, 1, int(plan.splits.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  out.aggregate = aggregate(out.folds);
  return out;
}

void write_metrics(const CvReport& report, const data::Panel& panel, const ExperimentSpec& spec,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const std::string model(ml::to_string(spec.model.family));
  const std::string target = target_label(spec.target);
  out << "fold,model,target,status,profit,excess_profit,sharpe,r_bar,sigma,n_days,trades,auc,accuracy,tau,"
         "buy_and_hold_profit,perfect_profit,train_start,test_start,test_end,reason\n";
  const auto& dates = panel.dates();
  for (const auto& f : report.folds) {
    out << f.fold << ',' << model << ',' << target << ',' << (f.failed ? "failed" : "ok") << ',';
    if (f.failed) {
      out << ",,,,,,,,,,,,";
    } else {
      const auto& m = f.metrics;
      out << data::format_double(m.profit) << ',' << data::format_double(m.excess_profit) << ',' << opt(m.sharpe)
          << ',' << data::format_double(m.r_bar) << ',' << data::format_double(m.sigma) << ',' << m.n_days << ','
          << m.trades << ',' << opt(f.auc) << ',' << opt(f.accuracy) << ',' << opt(f.tau) << ','
          << data::format_double(f.buy_and_hold_profit) << ',' << data::format_double(f.perfect_profit) << ',';
    }
    out << data::format_date(dates[std::size_t(f.split.train.begin)]) << ','
        << data::format_date(dates[std::size_t(f.split.test.begin)]) << ','
        << data::format_date(dates[std::size_t(f.split.test.end - 1)]) << ',' << data::csv_escape(f.reason)
        << '\n';
  }
  const Aggregate& a = report.aggregate;
  out << "mean," << model << ',' << target << ",folds_ok=" << a.folds_ok << ";folds_failed=" << a.folds_failed
      << ',' << data::format_double(a.profit) << ',' << data::format_double(a.excess_profit) << ','
      << opt(a.sharpe) << ",,,," << data::format_double(a.trades) << ',' << opt(a.auc) << ','
      << opt(a.accuracy) << ",," << data::format_double(a.buy_and_hold_profit) << ','
      << data::format_double(a.perfect_profit) << ",,,,\n";
}

void write_fold_trades(const CvReport& report, const std::filesystem::path& dir) {
  for (const auto& f : report.folds) {
    if (f.failed) continue;
    backtest::write_trade_log(f.trades, f.test_dates, dir / ("trades_" + std::to_string(f.fold) + ".csv"));
  }
}

}  // namespace exbt::harness
