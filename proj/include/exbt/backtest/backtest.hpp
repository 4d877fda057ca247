#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <vector>

#include "exbt/data/csv.hpp"
#include "exbt/targets/targets.hpp"

namespace exbt::backtest {

enum class Action { buy, sell };

struct TradeEvent {
  Eigen::Index day = 0;
  Action action = Action::buy;
  double price = 0.0;
};

/// Long/flat trade record over a price path, starting from 1.0 currency unit.
/// portfolio_value[t] is the marked-to-market value at day t's close, after
/// any trade executed at that close. daily_returns[t-1] = v[t]/v[t-1] - 1.
struct TradeLog {
  std::vector<TradeEvent> events;
  Eigen::VectorXd portfolio_value;
  Eigen::VectorXd daily_returns;

  int trade_count() const { return int(events.size()); }
  double final_value() const { return portfolio_value.size() ? portfolio_value[portfolio_value.size() - 1] : 1.0; }
  double profit() const { return final_value() - 1.0; }
};

/// Simulates holding the asset over (t, t+1] whenever long[t] is true,
/// for t in [0, n-1). A trade executes at day t's close when the position
/// changes, and any open position is sold at the last close. Every event
/// costs a proportional fee `cost` of the portfolio value.
TradeLog simulate_positions(const std::vector<bool>& long_after_close, const Eigen::VectorXd& prices,
                            double cost = 0.0);

/// Per-day instruction once the forced first-day entry has happened.
enum class Signal { go_long, go_flat, hold };

/// Forced buy at the first close; from day 1 the signal at day t sets the
/// position carried into day t+1; forced liquidation at the last close.
TradeLog simulate_signals(const std::vector<Signal>& signals, const Eigen::VectorXd& prices,
                          double cost = 0.0);

/// Long while forecast > 0, flat while < 0, hold at exactly 0 or NaN.
TradeLog simulate_regression_strategy(const Eigen::VectorXd& forecasts, const Eigen::VectorXd& prices,
                                      double cost = 0.0);
/// Long while prob > tau, flat otherwise (NaN holds).
TradeLog simulate_binary_strategy(const Eigen::VectorXd& probs, double tau, const Eigen::VectorXd& prices,
                                  double cost = 0.0);
/// Buy when p_min > tau >= p_max, sell when p_max > tau >= p_min, else hold.
TradeLog simulate_extrema_strategy(const Eigen::VectorXd& p_min, const Eigen::VectorXd& p_max, double tau,
                                   const Eigen::VectorXd& prices, double cost = 0.0);

struct BacktestMetrics {
  double profit = 0.0;
  double excess_profit = 0.0;
  std::optional<double> sharpe;  // empty when sigma == 0
  double r_bar = 0.0;
  double sigma = 0.0;
  int n_days = 0;
  int trades = 0;
};

/// 365 r_bar / (sqrt(365) sigma), sigma with n-1 denominator; empty when
/// sigma is zero or fewer than two returns exist.
std::optional<double> annualised_sharpe(const Eigen::VectorXd& daily_returns, double* r_bar = nullptr,
                                        double* sigma = nullptr);

BacktestMetrics compute_metrics(const TradeLog& log, const TradeLog& benchmark);

TradeLog buy_and_hold_log(const Eigen::VectorXd& prices, double cost = 0.0);
BacktestMetrics buy_and_hold(const Eigen::VectorXd& prices);

/// Trading on the true labels. Binary and continuous targets: long exactly
/// after days whose next move is up (the best long/flat policy). Extrema:
/// the extrema strategy fed the true labels (undefined = 0) with tau 0.5.
TradeLog perfect_knowledge_log(const targets::TargetSeries& target, const Eigen::VectorXd& prices);
BacktestMetrics perfect_knowledge(const targets::TargetSeries& target, const Eigen::VectorXd& prices);

/// `date,action,price,portfolio_value`
void write_trade_log(const TradeLog& log, const std::vector<data::Date>& dates,
                     const std::filesystem::path& path);

}  // namespace exbt::backtest
