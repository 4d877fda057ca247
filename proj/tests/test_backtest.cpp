#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "exbt/backtest/backtest.hpp"
#include "exbt/error.hpp"
#include "support.hpp"

using namespace exbt;
using namespace exbt::backtest;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Recomputes the final value from the event list alone.
double event_walk(const TradeLog& log, double cost) {
  double v = 1.0, entry = 0.0;
  for (const auto& e : log.events) {
    v *= 1.0 - cost;
    if (e.action == Action::buy) {
      entry = e.price;
    } else {
      v *= e.price / entry;
    }
  }
  return v;
}

void expect_well_formed(const TradeLog& log, Eigen::Index n) {
  ASSERT_GE(log.events.size(), 2u);
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    EXPECT_EQ(log.events[i].action, i % 2 ? Action::sell : Action::buy);
    if (i) {
      EXPECT_GT(log.events[i].day, log.events[i - 1].day);
    }
  }
  EXPECT_EQ(log.events.size() % 2, 0u);
  EXPECT_LE(log.events.back().day, n - 1);
  EXPECT_EQ(log.portfolio_value.size(), n);
  EXPECT_EQ(log.daily_returns.size(), n - 1);
  EXPECT_GT(log.portfolio_value.minCoeff(), 0.0);
}

// Best profit over every long/flat sequence, brute force.
double brute_best(const Eigen::VectorXd& p) {
  const Eigen::Index steps = p.size() - 1;
  double best = -1.0;
  for (long mask = 0; mask < (1L << steps); ++mask) {
    double v = 1.0;
    for (Eigen::Index t = 0; t < steps; ++t) {
      if (mask >> t & 1) v *= p[t + 1] / p[t];
    }
    best = std::max(best, v - 1.0);
  }
  return best;
}

}  // namespace

TEST(RegressionStrategy, Examples) {
  TradeLog a = simulate_regression_strategy(vec({1, 1, 1}), vec({1, 2, 4}));
  EXPECT_NEAR(a.profit(), 3.0, 1e-12);
  EXPECT_EQ(a.trade_count(), 2);

  TradeLog b = simulate_regression_strategy(vec({0.5, -0.5, 0.0}), vec({1, 2, 1}));
  EXPECT_NEAR(b.profit(), 1.0, 1e-12);
  ASSERT_EQ(b.trade_count(), 2);
  EXPECT_EQ(b.events[0].price, 1.0);
  EXPECT_EQ(b.events[1].price, 2.0);
  EXPECT_EQ(b.events[1].day, 1);

  TradeLog c = simulate_regression_strategy(vec({-1, -1}), vec({2, 1}));
  EXPECT_NEAR(c.profit(), -0.5, 1e-12);
  EXPECT_EQ(c.trade_count(), 2);
}

TEST(RegressionStrategy, ZeroAndMissingForecastsHold) {
  const Eigen::VectorXd p = vec({1, 2, 3, 1.5, 3});
  // Long over the first move, out at 2 through the dip, back in at 1.5.
  const TradeLog a = simulate_regression_strategy(vec({1, -1, 0, 1, std::nan("")}), p);
  EXPECT_NEAR(a.profit(), 3.0, 1e-12);
  EXPECT_EQ(a.trade_count(), 4);
  const TradeLog b = simulate_regression_strategy(vec({1, 0, std::nan(""), 0, 0}), p);
  EXPECT_NEAR(b.profit(), 2.0, 1e-12);
  EXPECT_EQ(b.trade_count(), 2);
  EXPECT_THROW(simulate_regression_strategy(vec({1, 1}), p), DataError);
  EXPECT_THROW(simulate_regression_strategy(vec({1}), vec({1})), DataError);
  EXPECT_THROW(simulate_regression_strategy(vec({1, 1}), vec({1, -2})), DataError);
  EXPECT_THROW(simulate_regression_strategy(vec({1, 1}), vec({1, 2}), 1.0), ConfigError);
}

TEST(BinaryStrategy, Examples) {
  const Eigen::VectorXd p = vec({1, 2, 1});
  EXPECT_NEAR(simulate_binary_strategy(vec({0.9, 0.1, 0.5}), 0.5, p).profit(), 1.0, 1e-12);
  const TradeLog edge = simulate_binary_strategy(vec({0.9, 0.9}), 1.0, vec({2, 1}));
  const TradeLog neg = simulate_regression_strategy(vec({-1, -1}), vec({2, 1}));
  EXPECT_EQ(edge.portfolio_value, neg.portfolio_value);
  EXPECT_EQ(edge.trade_count(), neg.trade_count());

  std::mt19937_64 rng(1);
  const Eigen::VectorXd prices = exbt::testing::random_prices(rng, 300);
  const TradeLog always = simulate_binary_strategy(Eigen::VectorXd::Constant(300, 0.6), 0.5, prices);
  const TradeLog bh = buy_and_hold_log(prices);
  EXPECT_EQ(always.portfolio_value, bh.portfolio_value);
  const BacktestMetrics m = compute_metrics(always, bh), mb = buy_and_hold(prices);
  EXPECT_EQ(m.profit, mb.profit);
  EXPECT_EQ(m.excess_profit, 0.0);
  EXPECT_EQ(m.trades, 2);
  EXPECT_EQ(*m.sharpe, *mb.sharpe);
}

TEST(ExtremaStrategy, Examples) {
  const Eigen::VectorXd p = vec({1, 2, 1, 2});
  const TradeLog a = simulate_extrema_strategy(vec({0.9, 0.1, 0.9, 0.1}), vec({0.1, 0.9, 0.1, 0.9}), 0.5, p);
  EXPECT_NEAR(a.profit(), 3.0, 1e-12);
  EXPECT_EQ(a.trade_count(), 4);
  std::mt19937_64 rng(2);
  const Eigen::VectorXd prices = exbt::testing::random_prices(rng, 100);
  const Eigen::VectorXd same = Eigen::VectorXd::LinSpaced(100, 0.0, 1.0);
  EXPECT_EQ(simulate_extrema_strategy(same, same, 0.5, prices).portfolio_value, buy_and_hold_log(prices).portfolio_value);
  EXPECT_EQ(simulate_extrema_strategy(Eigen::VectorXd::Zero(100), Eigen::VectorXd::Zero(100), 0.5, prices).portfolio_value,
            buy_and_hold_log(prices).portfolio_value);
  EXPECT_THROW(simulate_extrema_strategy(same, same.head(99), 0.5, prices), DataError);
}

TEST(BuyAndHold, Examples) {
  const BacktestMetrics m = buy_and_hold(vec({100, 150}));
  EXPECT_NEAR(m.profit, 0.5, 1e-12);
  EXPECT_EQ(m.trades, 2);
  EXPECT_EQ(buy_and_hold(vec({3, 3, 3})).profit, 0.0);
  EXPECT_THROW(buy_and_hold(vec({3})), DataError);
  EXPECT_THROW(buy_and_hold(Eigen::VectorXd()), DataError);
}

TEST(PerfectKnowledge, TriangleWave) {
  const Eigen::VectorXd p = vec({1, 2, 1, 2});
  const auto t = targets::binary_updown_target(p);
  EXPECT_NEAR(perfect_knowledge(t, p).profit, 3.0, 1e-12);
  EXPECT_NEAR(brute_best(p), 3.0, 1e-12);
  const Eigen::VectorXd up = vec({1, 1.5, 2, 4});
  EXPECT_NEAR(perfect_knowledge(targets::binary_updown_target(up), up).profit, buy_and_hold(up).profit, 1e-12);
}

TEST(PerfectKnowledge, BinaryIsOptimalAndDominates) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const Eigen::Index n = 2 + Eigen::Index(rep % 11);
    Eigen::VectorXd p = exbt::testing::random_prices(rng, n, 0.05);
    if (rep % 3 == 0) p = p.array().round();
    p = p.cwiseMax(1.0);
    const auto bin = targets::binary_updown_target(p);
    const double best = perfect_knowledge(bin, p).profit;
    EXPECT_NEAR(best, brute_best(p), 1e-12);
    EXPECT_GE(best, buy_and_hold(p).profit - 1e-12);
    EXPECT_NEAR(perfect_knowledge(targets::continuous_return_target(p), p).profit, best, 1e-12);
    for (int w = 1; 2 * w + 1 <= n && w <= 3; ++w) {
      EXPECT_GE(best, perfect_knowledge(targets::extrema_targets(p, w), p).profit - 1e-12);
    }
  }
}

TEST(PerfectKnowledge, ExtremaTradesShrinkWithWindow) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::VectorXd p = exbt::testing::random_prices(rng, 400, 0.03);
    int prev = 1 << 30;
    for (int w : {1, 3, 7, 14, 21}) {
      const int trades = perfect_knowledge(targets::extrema_targets(p, w), p).trades;
      EXPECT_LE(trades, prev);
      prev = trades;
    }
  }
}

TEST(Sharpe, FormulaOracle) {
  Eigen::VectorXd r(10);
  for (int i = 0; i < 10; ++i) r[i] = i % 2 ? -0.01 : 0.01;
  r[3] = -0.02;
  double mean = 0.0;
  for (int i = 0; i < 10; ++i) mean += r[i];
  mean /= 10.0;
  double ss = 0.0;
  for (int i = 0; i < 10; ++i) ss += (r[i] - mean) * (r[i] - mean);
  const double sd = std::sqrt(ss / 9.0);
  double rb = 0, sg = 0;
  const auto s = annualised_sharpe(r, &rb, &sg);
  ASSERT_TRUE(s);
  EXPECT_NEAR(*s, 365.0 * mean / (std::sqrt(365.0) * sd), 1e-12);
  EXPECT_NEAR(rb, mean, 1e-15);
  EXPECT_NEAR(sg, sd, 1e-15);
}

TEST(Sharpe, UndefinedWithoutDispersion) {
  EXPECT_FALSE(annualised_sharpe(Eigen::VectorXd::Zero(20)));
  EXPECT_FALSE(annualised_sharpe(Eigen::VectorXd::Constant(20, 0.01)));
  EXPECT_FALSE(annualised_sharpe(Eigen::VectorXd::Constant(1, 0.01)));
  const BacktestMetrics flat = buy_and_hold(vec({5, 5, 5, 5}));
  EXPECT_FALSE(flat.sharpe);
  EXPECT_EQ(flat.n_days, 4);
}

TEST(Metrics, FieldsAndMismatch) {
  const Eigen::VectorXd p = vec({1, 2, 1, 2});
  const TradeLog a = simulate_regression_strategy(vec({1, -1, 1, 1}), p);
  const BacktestMetrics m = compute_metrics(a, buy_and_hold_log(p));
  EXPECT_NEAR(m.profit, 3.0, 1e-12);
  EXPECT_NEAR(m.excess_profit, 2.0, 1e-12);
  EXPECT_EQ(m.trades, 4);
  EXPECT_EQ(m.n_days, 4);
  EXPECT_THROW(compute_metrics(a, buy_and_hold_log(vec({1, 2}))), DataError);
}

TEST(TradeLogInvariants, RandomSignalsAndCosts) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u;
  for (int rep = 0; rep < 300; ++rep) {
    const Eigen::Index n = 2 + Eigen::Index(rng() % 80);
    const Eigen::VectorXd p = exbt::testing::random_prices(rng, n, 0.04);
    Eigen::VectorXd pmin(n), pmax(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      pmin[i] = u(rng);
      pmax[i] = u(rng);
    }
    const double cost = rep % 2 ? 0.0 : 0.005;
    for (const TradeLog& log : {simulate_extrema_strategy(pmin, pmax, 0.5, p, cost),
                                simulate_binary_strategy(pmin, 0.4, p, cost),
                                simulate_regression_strategy((pmax.array() - 0.5).matrix(), p, cost)}) {
      expect_well_formed(log, n);
      EXPECT_NEAR(log.final_value(), event_walk(log, cost), 1e-10);
      for (Eigen::Index t = 1; t < n; ++t) {
        EXPECT_NEAR(log.daily_returns[t - 1], log.portfolio_value[t] / log.portfolio_value[t - 1] - 1.0, 1e-12);
      }
    }
  }
}

TEST(TradeLog, WritesCsv) {
  const Eigen::VectorXd p = vec({1, 2, 1});
  std::vector<data::Date> d;
  for (int i = 0; i < 3; ++i) d.push_back(*data::parse_date("2020-02-28") + std::chrono::days(i));
  const auto dir = exbt::testing::temp_dir("tradelog");
  write_trade_log(simulate_regression_strategy(vec({1, -1, 1}), p), d, dir / "t.csv");
  EXPECT_EQ(exbt::testing::read_text(dir / "t.csv"),
            "date,action,price,portfolio_value\n2020-02-28,buy,1,1\n2020-02-29,sell,2,2\n");
}
