#include "exbt/backtest/backtest.hpp"

#include <cmath>
#include <fstream>

#include "exbt/error.hpp"

namespace exbt::backtest {

namespace {

void check_prices(const Eigen::VectorXd& prices) {
  if (prices.size() < 2) throw DataError("backtest: need at least two prices");
  if (!(prices.array() > 0.0).all()) throw DataError("backtest: prices must be strictly positive");
}

void check_length(Eigen::Index a, Eigen::Index b) {
  if (a != b) throw DataError("backtest: signal length does not match prices");
}

}  // namespace

TradeLog simulate_positions(const std::vector<bool>& long_after_close, const Eigen::VectorXd& prices,
                            double cost) {
  check_prices(prices);
  const Eigen::Index n = prices.size();
  if (Eigen::Index(long_after_close.size()) < n - 1) throw DataError("backtest: position vector too short");
  if (!(cost >= 0.0 && cost < 1.0)) throw ConfigError("backtest: cost must be in [0, 1)");

  TradeLog log;
  log.portfolio_value.resize(n);
  double v = 1.0;
  bool held = false;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (t > 0 && held) v *= prices[t] / prices[t - 1];
    const bool want = t < n - 1 && long_after_close[std::size_t(t)];
    if (want != held) {
      log.events.push_back({t, want ? Action::buy : Action::sell, prices[t]});
      v *= 1.0 - cost;
      held = want;
    }
    log.portfolio_value[t] = v;
  }
  log.daily_returns = log.portfolio_value.tail(n - 1).cwiseQuotient(log.portfolio_value.head(n - 1)).array() - 1.0;
  return log;
}

TradeLog simulate_signals(const std::vector<Signal>& signals, const Eigen::VectorXd& prices, double cost) {
  check_prices(prices);
  check_length(Eigen::Index(signals.size()), prices.size());
  std::vector<bool> pos(signals.size(), false);
  bool held = true;  // forced entry at the first close
  pos[0] = true;
  for (std::size_t t = 1; t < signals.size(); ++t) {
    if (signals[t] == Signal::go_long) held = true;
    if (signals[t] == Signal::go_flat) held = false;
    pos[t] = held;
  }
  return simulate_positions(pos, prices, cost);
}

TradeLog simulate_regression_strategy(const Eigen::VectorXd& forecasts, const Eigen::VectorXd& prices,
                                      double cost) {
  check_length(forecasts.size(), prices.size());
  std::vector<Signal> s(std::size_t(forecasts.size()), Signal::hold);
  for (Eigen::Index t = 0; t < forecasts.size(); ++t) {
    if (forecasts[t] > 0.0) s[std::size_t(t)] = Signal::go_long;
    if (forecasts[t] < 0.0) s[std::size_t(t)] = Signal::go_flat;
  }
  return simulate_signals(s, prices, cost);
}

TradeLog simulate_binary_strategy(const Eigen::VectorXd& probs, double tau, const Eigen::VectorXd& prices,
                                  double cost) {
  check_length(probs.size(), prices.size());
  std::vector<Signal> s(std::size_t(probs.size()), Signal::hold);
  for (Eigen::Index t = 0; t < probs.size(); ++t) {
    if (std::isnan(probs[t])) continue;
    s[std::size_t(t)] = probs[t] > tau ? Signal::go_long : Signal::go_flat;
  }
  return simulate_signals(s, prices, cost);
}

TradeLog simulate_extrema_strategy(const Eigen::VectorXd& p_min, const Eigen::VectorXd& p_max, double tau,
                                   const Eigen::VectorXd& prices, double cost) {
  check_length(p_min.size(), prices.size());
  check_length(p_max.size(), prices.size());
  std::vector<Signal> s(std::size_t(prices.size()), Signal::hold);
  for (Eigen::Index t = 0; t < prices.size(); ++t) {
    const bool lo = p_min[t] > tau, hi = p_max[t] > tau;  // NaN compares false: hold
    if (lo && !hi) s[std::size_t(t)] = Signal::go_long;
    if (hi && !lo) s[std::size_t(t)] = Signal::go_flat;
  }
  return simulate_signals(s, prices, cost);
}

std::optional<double> annualised_sharpe(const Eigen::VectorXd& r, double* r_bar, double* sigma) {
  const Eigen::Index n = r.size();
  const double mean = n > 0 ? r.sum() / double(n) : 0.0;
  const double sd = n > 1 ? std::sqrt((r.array() - mean).square().sum() / double(n - 1)) : 0.0;
  if (r_bar) *r_bar = mean;
  if (sigma) *sigma = sd;
  if (!(sd > 0.0)) return std::nullopt;
  return 365.0 * mean / (std::sqrt(365.0) * sd);
}

BacktestMetrics compute_metrics(const TradeLog& log, const TradeLog& benchmark) {
  if (log.portfolio_value.size() != benchmark.portfolio_value.size()) {
    throw DataError("compute_metrics: strategy and benchmark span different days");
  }
  BacktestMetrics m;
  m.profit = log.profit();
  m.excess_profit = m.profit - benchmark.profit();
  m.sharpe = annualised_sharpe(log.daily_returns, &m.r_bar, &m.sigma);
  m.n_days = int(log.portfolio_value.size());
  m.trades = log.trade_count();
  return m;
}

TradeLog buy_and_hold_log(const Eigen::VectorXd& prices, double cost) {
  check_prices(prices);
  return simulate_positions(std::vector<bool>(std::size_t(prices.size()), true), prices, cost);
}

BacktestMetrics buy_and_hold(const Eigen::VectorXd& prices) {
  const TradeLog log = buy_and_hold_log(prices);
  return compute_metrics(log, log);
}

TradeLog perfect_knowledge_log(const targets::TargetSeries& target, const Eigen::VectorXd& prices) {
  check_prices(prices);
  check_length(target.size(), prices.size());
  if (target.kind == targets::TargetKind::extrema_pair) {
    return simulate_extrema_strategy(target.labels(0).unaryExpr([](double v) { return std::isnan(v) ? 0.0 : v; }),
                                     target.labels(1).unaryExpr([](double v) { return std::isnan(v) ? 0.0 : v; }),
                                     0.5, prices);
  }
  std::vector<bool> pos(std::size_t(prices.size()), false);
  const double cut = target.kind == targets::TargetKind::binary_updown ? 0.5 : 0.0;
  for (Eigen::Index t = 0; t + 1 < prices.size(); ++t) {
    pos[std::size_t(t)] = target.defined[t] && target.values[t] > cut;
  }
  return simulate_positions(pos, prices);
}

BacktestMetrics perfect_knowledge(const targets::TargetSeries& target, const Eigen::VectorXd& prices) {
  return compute_metrics(perfect_knowledge_log(target, prices), buy_and_hold_log(prices));
}

void write_trade_log(const TradeLog& log, const std::vector<data::Date>& dates,
                     const std::filesystem::path& path) {
  if (Eigen::Index(dates.size()) != log.portfolio_value.size()) {
    throw DataError("write_trade_log: date count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "date,action,price,portfolio_value\n";
  for (const auto& e : log.events) {
    out << data::format_date(dates[std::size_t(e.day)]) << ',' << (e.action == Action::buy ? "buy" : "sell")
        << ',' << data::format_double(e.price) << ',' << data::format_double(log.portfolio_value[e.day]) << '\n';
  }
}

}  // namespace exbt::backtest
