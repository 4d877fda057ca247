#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "exbt/error.hpp"
#include "exbt/prep/transforms.hpp"
#include "support.hpp"

using namespace exbt;
using namespace exbt::prep;

namespace {

const double NaN = std::numeric_limits<double>::quiet_NaN();

data::Panel make_panel(std::vector<data::Column> cols) {
  const auto n = std::size_t(cols.front().values.size());
  std::vector<data::Date> d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(*data::parse_date("2018-01-01") + std::chrono::days(i));
  return data::Panel(std::move(d), std::move(cols));
}

const FeatureMeta& meta_for(const std::vector<FeatureMeta>& m, const std::string& name) {
  for (const auto& x : m) {
    if (x.column == name) return x;
  }
  throw std::runtime_error("missing meta " + name);
}

// Crosses zero, so it is never eligible for a log transform.
Eigen::VectorXd centred(const Eigen::VectorXd& v) { return (v.array() - v.mean()).matrix(); }

}  // namespace

TEST(Difference, RoundTripsThroughIntegrate) {
  std::mt19937_64 rng(2);
  for (int order = 0; order <= 3; ++order) {
    Eigen::VectorXd v = exbt::testing::normal_noise(rng, 40);
    v.head(3).setConstant(NaN);
    const Differenced d = difference(v, order);
    for (Eigen::Index i = 0; i < 3 + order; ++i) EXPECT_TRUE(std::isnan(d.values[i]));
    const Eigen::VectorXd back = integrate(d);
    for (Eigen::Index i = 3; i < 40; ++i) EXPECT_NEAR(back[i], v[i], 1e-10);
  }
}

TEST(Difference, SecondDifferenceByHand) {
  Eigen::VectorXd v(5);
  v << 1, 4, 9, 16, 25;
  const Eigen::VectorXd d = difference(v, 2).values;
  EXPECT_TRUE(std::isnan(d[0]) && std::isnan(d[1]));
  EXPECT_EQ(d[2], 2.0);
  EXPECT_EQ(d[4], 2.0);
}

TEST(TransformPlan, DecisionsOnKnownSeries) {
  std::mt19937_64 rng(17);
  const Eigen::Index n = 600;
  const Eigen::VectorXd price = exbt::testing::random_prices(rng, n);
  const Eigen::VectorXd noise = exbt::testing::normal_noise(rng, n);
  const Eigen::VectorXd walk = exbt::testing::cumsum(exbt::testing::normal_noise(rng, n));
  const Eigen::VectorXd i2 = centred(exbt::testing::cumsum(exbt::testing::cumsum(exbt::testing::normal_noise(rng, n))));
  Eigen::VectorXd growing(n);
  for (Eigen::Index i = 0; i < n; ++i) growing[i] = std::exp(0.01 * double(i) + 0.3 * noise[i]);
  Eigen::VectorXd het_signed = exbt::testing::normal_noise(rng, n);
  for (Eigen::Index i = 0; i < n; ++i) het_signed[i] *= 0.2 + 3.0 * double(i) / double(n);

  const data::Panel p = make_panel({{"price", data::Role::price, price},
                                    {"noise", data::Role::feature, noise},
                                    {"walk", data::Role::feature, walk},
                                    {"i2", data::Role::feature, i2},
                                    {"growing", data::Role::feature, growing},
                                    {"het_signed", data::Role::feature, het_signed},
                                    {"flat", data::Role::feature, Eigen::VectorXd::Constant(n, 2.0)}});
  const auto meta = fit_transform_plan(p, 0.05, 2);

  EXPECT_TRUE(meta_for(meta, "price").logged);
  EXPECT_EQ(meta_for(meta, "price").order_of_integration, 1);
  EXPECT_EQ(meta_for(meta, "noise").order_of_integration, 0);
  EXPECT_FALSE(meta_for(meta, "noise").logged);
  EXPECT_EQ(meta_for(meta, "walk").order_of_integration, 1);
  EXPECT_EQ(meta_for(meta, "i2").order_of_integration, 2);
  EXPECT_TRUE(meta_for(meta, "growing").logged);
  EXPECT_EQ(meta_for(meta, "growing").order_of_integration, 1);
  EXPECT_TRUE(meta_for(meta, "het_signed").log_blocked);
  EXPECT_FALSE(meta_for(meta, "het_signed").logged);
  EXPECT_TRUE(meta_for(meta, "flat").constant);
  for (const auto& m : meta) EXPECT_LE(m.order_of_integration, 2);
}

TEST(TransformPlan, DiffCapIsRespected) {
  std::mt19937_64 rng(9);
  const Eigen::Index n = 400;
  const Eigen::VectorXd i3 = centred(
      exbt::testing::cumsum(exbt::testing::cumsum(exbt::testing::cumsum(exbt::testing::normal_noise(rng, n)))));
  const data::Panel p = make_panel({{"price", data::Role::price, exbt::testing::random_prices(rng, n)},
                                    {"i3", data::Role::feature, i3}});
  const auto meta = fit_transform_plan(p, 0.05, 1);
  const auto& m = meta_for(meta, "i3");
  EXPECT_EQ(m.order_of_integration, 1);
  EXPECT_TRUE(m.diff_cap_reached);
}

TEST(TransformPlan, LeadingMissingValuesAreSkipped) {
  std::mt19937_64 rng(5);
  const Eigen::Index n = 300;
  Eigen::VectorXd late = exbt::testing::normal_noise(rng, n);
  late.head(100).setConstant(NaN);
  const data::Panel p = make_panel({{"price", data::Role::price, exbt::testing::random_prices(rng, n)},
                                    {"late_score", data::Role::nlp_score, late}});
  const auto meta = fit_transform_plan(p);
  EXPECT_EQ(meta_for(meta, "late_score").order_of_integration, 0);
  const data::Panel t = apply_transforms(p, meta);
  EXPECT_TRUE(std::isnan(t.values("late_score")[99]));
  EXPECT_EQ(t.values("late_score")[100], late[100]);
  EXPECT_TRUE(std::isnan(t.price()[0]));
  EXPECT_NEAR(t.price()[1], std::log(p.price()[1] / p.price()[0]), 1e-12);
}

TEST(TransformPlan, Errors) {
  std::mt19937_64 rng(5);
  const Eigen::Index n = 100;
  Eigen::VectorXd gap = exbt::testing::normal_noise(rng, n);
  gap[50] = NaN;
  EXPECT_THROW(fit_transform_plan(make_panel({{"price", data::Role::price, exbt::testing::random_prices(rng, n)},
                                              {"gap", data::Role::feature, gap}})),
               DataError);
  EXPECT_THROW(fit_transform_plan(make_panel({{"price", data::Role::price, exbt::testing::random_prices(rng, n)},
                                              {"empty", data::Role::feature, Eigen::VectorXd::Constant(n, NaN)}})),
               DataError);
  Eigen::VectorXd bad_price = exbt::testing::random_prices(rng, n);
  bad_price[3] = -1.0;
  EXPECT_THROW(fit_transform_plan(make_panel({{"price", data::Role::price, bad_price}})), DataError);
}

TEST(TransformPlan, FitTransformsTrimsLargestOrder) {
  std::mt19937_64 rng(21);
  const Eigen::Index n = 500;
  const data::Panel p = make_panel(
      {{"price", data::Role::price, exbt::testing::random_prices(rng, n)},
       {"i2", data::Role::feature, centred(exbt::testing::cumsum(exbt::testing::cumsum(exbt::testing::normal_noise(rng, n))))}});
  const TransformResult r = fit_transforms(p);
  EXPECT_EQ(r.panel.size(), std::size_t(n - 2));
  EXPECT_EQ(r.raw_price.size(), n - 2);
  EXPECT_EQ(r.raw_price[0], p.price()[2]);
  EXPECT_TRUE(std::isfinite(r.panel.values("i2")[0]));
  EXPECT_EQ(r.panel.dates().front(), p.dates()[2]);
}
