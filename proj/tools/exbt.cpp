// Command-line front end: exbt <subcommand> --config experiment.toml --out dir

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "exbt/backtest/backtest.hpp"
#include "exbt/data/panel.hpp"
#include "exbt/error.hpp"
#include "exbt/granger/granger.hpp"
#include "exbt/harness/config.hpp"
#include "exbt/harness/cv.hpp"
#include "exbt/harness/pipeline.hpp"
#include "exbt/harness/report.hpp"
#include "exbt/harness/search.hpp"
#include "exbt/prep/transforms.hpp"
#include "exbt/targets/targets.hpp"

namespace fs = std::filesystem;
using namespace exbt;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<double> cost;
  std::optional<int> jobs;
};

harness::ExperimentSpec load(const Globals& g) {
  if (g.config.empty()) throw ConfigError("--config is required");
  harness::ExperimentSpec spec = harness::load_experiment(g.config);
  if (g.seed) {
    spec.seed = *g.seed;
    spec.model.seed = *g.seed;
    spec.model.mlp.seed = *g.seed;
  }
  if (g.cost) spec.cost = *g.cost;
  if (g.jobs) spec.jobs = *g.jobs;
  spec.validate();
  return spec;
}

fs::path out_dir(const Globals& g) {
  fs::create_directories(g.out);
  return g.out;
}

void print_panel_summary(const data::Panel& p) {
  std::cout << "rows " << p.size() << ", " << data::format_date(p.dates().front()) << " to "
            << data::format_date(p.dates().back()) << "\n";
  for (const auto& c : p.columns()) {
    const std::size_t first = p.first_observed(c.name);
    std::cout << "  " << c.name << " [" << data::to_string(c.role) << "] usable from row " << first << "\n";
  }
}

/// Labels the selection files: selection.csv, or selection_min/_max for extrema.
void write_selections(const std::vector<granger::LagSelection>& sel, const fs::path& dir, const std::string& suffix) {
  if (sel.size() == 1) {
    granger::write_selection(sel[0], dir / ("selection" + suffix + ".csv"));
  } else {
    granger::write_selection(sel[0], dir / ("selection_min" + suffix + ".csv"));
    granger::write_selection(sel[1], dir / ("selection_max" + suffix + ".csv"));
  }
}

int cmd_validate(const Globals& g, const std::string& panel_path, const std::string& price_column) {
  if (!panel_path.empty()) {
    print_panel_summary(data::load_panel(panel_path, price_column));
  } else {
    const harness::ExperimentSpec spec = load(g);
    const data::Panel p = harness::prepare_panel(spec);
    print_panel_summary(p);
    harness::make_cv_splits(Eigen::Index(p.size()), spec.folds);
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_preprocess(const Globals& g) {
  const harness::ExperimentSpec spec = load(g);
  const prep::TransformResult r =
      prep::fit_transforms(harness::prepare_panel(spec), spec.preprocess.alpha, spec.preprocess.max_diff);
  const fs::path dir = out_dir(g);
  prep::write_feature_meta(r.meta, dir / "feature_meta.csv");
  data::save_panel(r.panel, dir / "panel_transformed.csv");
  return 0;
}

int cmd_select(const Globals& g) {
  const harness::ExperimentSpec spec = load(g);
  const prep::TransformResult r =
      prep::fit_transforms(harness::prepare_panel(spec), spec.preprocess.alpha, spec.preprocess.max_diff);
  const targets::TargetSeries t = targets::make_target(spec.target.kind, r.raw_price, spec.target.window);
  std::vector<std::string> skip;
  for (const auto& m : r.meta) {
    if (m.constant) skip.push_back(m.column);
  }
  std::vector<granger::LagSelection> sel;
  for (int j = 0; j < t.label_count(); ++j) {
    sel.push_back(granger::select_features(r.panel, t.labels(j), spec.selection.mode, spec.selection.alpha,
                                           spec.selection.max_lag, spec.selection.own_lags, skip));
  }
  write_selections(sel, out_dir(g), "");
  return 0;
}

int cmd_label(const Globals& g) {
  const harness::ExperimentSpec spec = load(g);
  const data::Panel p = harness::prepare_panel(spec);
  const targets::TargetSeries t = targets::make_target(spec.target.kind, p.price(), spec.target.window);
  targets::write_targets(t, p.dates(), out_dir(g) / "targets.csv");
  return 0;
}

/// Trades externally produced predictions over the dates they cover.
harness::FoldReport external_backtest(const data::Panel& panel, const harness::ExperimentSpec& spec,
                                      const fs::path& path, double tau) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  data::CsvReader reader(in);
  std::vector<std::string> header, row;
  if (!reader.next(header)) throw DataError(path.string() + ": empty file");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  const bool extrema = spec.target.kind == targets::TargetKind::extrema_pair;
  const std::vector<std::string> needed = extrema ? std::vector<std::string>{"date", "p_min", "p_max"}
                                                  : std::vector<std::string>{"date", "prediction"};
  for (const auto& k : needed) {
    if (!col.count(k)) throw DataError(path.string() + ": missing column '" + k + "'");
  }
  std::vector<data::Date> dates;
  std::vector<double> a, b;
  while (reader.next(row)) {
    const auto where = path.string() + ":" + std::to_string(reader.line());
    if (row.size() != header.size()) throw DataError(where + ": ragged row");
    const auto d = data::parse_date(row[col["date"]]);
    if (!d) throw DataError(where + ": bad date");
    dates.push_back(*d);
    const auto x = data::parse_cell(row[col[extrema ? "p_min" : "prediction"]]);
    if (!x) throw DataError(where + ": bad value");
    a.push_back(*x);
    if (extrema) {
      const auto y = data::parse_cell(row[col["p_max"]]);
      if (!y) throw DataError(where + ": bad value");
      b.push_back(*y);
    }
  }
  if (dates.size() < 2) throw DataError(path.string() + ": need at least two days");
  const Eigen::Index begin = Eigen::Index(panel.index_of(dates.front()));
  const Eigen::Index n = Eigen::Index(dates.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (Eigen::Index(panel.index_of(dates[std::size_t(i)])) != begin + i) {
      throw DataError(path.string() + ": prediction dates must be consecutive days");
    }
  }
  const Eigen::VectorXd prices = panel.price().segment(begin, n);
  const Eigen::Map<const Eigen::VectorXd> pa(a.data(), n);
  harness::FoldReport r;
  r.fold = 0;
  r.split = {{0, begin}, {begin, begin + n}};
  switch (spec.target.kind) {
    case targets::TargetKind::continuous_return:
      r.trades = backtest::simulate_regression_strategy(pa, prices, spec.cost);
      break;
    case targets::TargetKind::binary_updown:
      r.tau = tau;
      r.trades = backtest::simulate_binary_strategy(pa, tau, prices, spec.cost);
      break;
    case targets::TargetKind::extrema_pair:
      r.tau = tau;
      r.trades = backtest::simulate_extrema_strategy(pa, Eigen::Map<const Eigen::VectorXd>(b.data(), n), tau,
                                                     prices, spec.cost);
      break;
  }
  const backtest::TradeLog bench = backtest::buy_and_hold_log(prices);
  r.metrics = backtest::compute_metrics(r.trades, bench);
  r.buy_and_hold_profit = bench.profit();
  r.perfect_profit = backtest::perfect_knowledge_log(
                         targets::make_target(spec.target.kind, prices, spec.target.window), prices)
                         .profit();
  r.test_dates = dates;
  return r;
}

int cmd_backtest(const Globals& g, const std::string& predictions, double tau) {
  const harness::ExperimentSpec spec = load(g);
  const data::Panel panel = harness::prepare_panel(spec);
  harness::CvReport rep;
  if (!predictions.empty()) {
    rep.folds.push_back(external_backtest(panel, spec, predictions, tau));
  } else {
    const harness::CvPlan plan = harness::make_cv_splits(Eigen::Index(panel.size()), spec.folds);
    rep.folds.push_back(harness::run_fold(panel, spec, spec.model, plan, spec.folds));
  }
  rep.aggregate = harness::aggregate(rep.folds);
  const fs::path dir = out_dir(g);
  harness::write_metrics(rep, panel, spec, dir / "metrics.csv");
  const auto& f = rep.folds.front();
  if (f.failed) {
    std::cerr << "fold failed: " << f.reason << "\n";
    return 2;
  }
  backtest::write_trade_log(f.trades, f.test_dates, dir / ("trades_" + std::to_string(f.fold) + ".csv"));
  std::cout << "profit " << f.metrics.profit << ", excess " << f.metrics.excess_profit << ", trades "
            << f.metrics.trades << "\n";
  return 0;
}

void write_cv_outputs(const harness::CvReport& rep, const data::Panel& panel, const harness::ExperimentSpec& spec,
                      const fs::path& dir) {
  harness::write_metrics(rep, panel, spec, dir / "metrics.csv");
  harness::write_fold_trades(rep, dir);
  for (const auto& f : rep.folds) {
    if (!f.failed) write_selections(f.selections, dir, "_" + std::to_string(f.fold));
  }
  const auto& a = rep.aggregate;
  std::cout << "folds ok " << a.folds_ok << ", failed " << a.folds_failed << "; mean profit " << a.profit
            << ", mean excess " << a.excess_profit << "\n";
  for (const auto& f : rep.folds) {
    if (f.failed) std::cerr << "fold " << f.fold << " failed: " << f.reason << "\n";
  }
}

int cmd_cv(const Globals& g, bool audit_flag) {
  harness::ExperimentSpec spec = load(g);
  spec.audit = spec.audit || audit_flag;
  const data::Panel panel = harness::prepare_panel(spec);
  harness::LeakageAudit audit;
  const harness::CvReport rep = harness::run_cv(panel, spec, spec.model, spec.jobs, spec.audit ? &audit : nullptr);
  const fs::path dir = out_dir(g);
  write_cv_outputs(rep, panel, spec, dir);
  if (spec.audit) {
    audit.write(dir / "audit.csv");
    const auto leaks = audit.violations();
    std::cout << "leakage audit: " << leaks.size() << " test-range reads before simulation\n";
    if (!leaks.empty()) return 2;
  }
  return 0;
}

int cmd_tune(const Globals& g) {
  const harness::ExperimentSpec spec = load(g);
  const data::Panel panel = harness::prepare_panel(spec);
  const harness::TuneResult t = harness::tune(panel, spec, spec.jobs);
  const fs::path dir = out_dir(g);
  harness::write_trace(t, dir / "trace.csv");
  {
    std::ofstream best(dir / "best_model.toml");
    best << "[model]\n" << t.best.to_text();
  }
  const harness::CvReport rep = harness::run_cv(panel, spec, t.best, spec.jobs);
  write_cv_outputs(rep, panel, spec, dir);
  return 0;
}

int cmd_report(const Globals& g, const std::vector<std::string>& files) {
  std::vector<harness::VariantResult> variants;
  for (const auto& f : files) {
    const fs::path p(f);
    std::string name = p.filename() == "metrics.csv" && p.has_parent_path() ? p.parent_path().filename().string()
                                                                            : p.stem().string();
    variants.push_back(harness::read_metrics_csv(p, name));
  }
  harness::profit_by_split_report(variants, out_dir(g));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forecasting and backtesting engine for daily price panels"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Experiment TOML file");
  app.add_option("--seed", g.seed, "Top-level seed (overrides the config)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--cost", g.cost, "Proportional transaction cost per trade")->check(CLI::Range(0.0, 0.999999));
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string panel_path, price_column = "price", predictions;
  double tau = 0.5;
  bool audit = false;
  std::vector<std::string> metric_files;

  auto* validate = app.add_subcommand("validate", "Check the config and panel");
  validate->add_option("--panel", panel_path, "Validate a panel CSV without a config");
  validate->add_option("--price-column", price_column, "Price column for --panel")->capture_default_str();
  app.add_subcommand("preprocess", "Fit and apply stationarity transforms");
  app.add_subcommand("select", "Granger feature selection on the full panel");
  app.add_subcommand("label", "Write the configured target series");
  auto* bt = app.add_subcommand("backtest", "Trade one configuration (last fold or external predictions)");
  bt->add_option("--predictions", predictions, "CSV with date,prediction or date,p_min,p_max");
  bt->add_option("--tau", tau, "Probability threshold for external predictions")->check(CLI::Range(0.0, 1.0));
  auto* cv = app.add_subcommand("cv", "Increasing-window cross-validation");
  cv->add_flag("--audit", audit, "Record and check every row read by fitting steps");
  app.add_subcommand("tune", "Random hyperparameter search, then cross-validate the winner");
  auto* report = app.add_subcommand("report", "Per-split profit report from metrics files");
  report->add_option("metrics", metric_files, "metrics.csv files, one per model variant")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*validate) return cmd_validate(g, panel_path, price_column);
    if (app.got_subcommand("preprocess")) return cmd_preprocess(g);
    if (app.got_subcommand("select")) return cmd_select(g);
    if (app.got_subcommand("label")) return cmd_label(g);
    if (*bt) return cmd_backtest(g, predictions, tau);
    if (*cv) return cmd_cv(g, audit);
    if (app.got_subcommand("tune")) return cmd_tune(g);
    if (*report) return cmd_report(g, metric_files);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
