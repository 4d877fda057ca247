#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "exbt/error.hpp"
#include "exbt/stats/heteroskedasticity.hpp"
#include "exbt/stats/ols.hpp"
#include "exbt/stats/unit_root.hpp"
#include "support.hpp"

using namespace exbt;
using namespace exbt::stats;

// Reference values below were computed once with statsmodels 0.14.6
// (adfuller, kpss, het_white, het_breuschpagan, het_goldfeldquandt) and
// arch 8.0 (PhillipsPerron) on tests/data/series.csv.

namespace {

void expect_rel(double got, double want, double rel) {
  EXPECT_NEAR(got, want, rel * std::max(1.0, std::abs(want))) << "want " << want;
}

// Relative error for tiny p-values.
void expect_p(double got, double want, double rel) {
  EXPECT_NEAR(got / want, 1.0, rel) << "got " << got << " want " << want;
}

struct UnitRootCase {
  const char* column;
  double adf, adf_p;
  int adf_lag;
  double kpss, kpss_p;
  double pp, pp_p;
};

const UnitRootCase kUnitRootCases[] = {
    {"wn", -18.438180083401498, 2.1631927827162737e-30, 0, 0.18032322917146154, 0.1, -18.40285577360215,
     2.1908589916342233e-30},
    {"rw", -1.8910651365412174, 0.3362759562290834, 0, 2.7071286209337626, 0.01, -1.801560458899779,
     0.37968724475432486},
    {"ar", -8.183130619790902, 8.030983739796633e-13, 3, 0.5678367642898529, 0.026388116150934036,
     -10.415390737757125, 1.759901614787389e-18},
    {"iar", -3.260440594371777, 0.0167420808586576, 4, 4.316587734892136, 0.01, -3.492361571290208,
     0.008185445815609012},
};

}  // namespace

TEST(Ols, RecoversExactLinearRelation) {
  Eigen::MatrixXd X(6, 2);
  X << 1, 0, 1, 1, 1, 2, 1, 3, 1, 4, 1, 5;
  Eigen::VectorXd y = 2.0 * X.col(0) - 0.5 * X.col(1);
  y[2] += 1e-3;
  const OlsFit f = ols(X, y);
  EXPECT_NEAR(f.coef[0], 2.0, 1e-3);
  EXPECT_NEAR(f.coef[1], -0.5, 1e-3);
  EXPECT_EQ(f.dof, 4);
  EXPECT_NEAR(f.resid.sum(), 0.0, 1e-12);
}

TEST(Ols, MatchesNormalEquationsAndStandardErrors) {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd X(50, 3);
  X.col(0).setOnes();
  X.col(1) = exbt::testing::normal_noise(rng, 50);
  X.col(2) = exbt::testing::normal_noise(rng, 50);
  const Eigen::VectorXd y = X * Eigen::Vector3d(1, 2, 3) + exbt::testing::normal_noise(rng, 50);
  const OlsFit f = ols(X, y);
  const Eigen::MatrixXd XtX = X.transpose() * X;
  const Eigen::VectorXd b = XtX.ldlt().solve(X.transpose() * y);
  EXPECT_LT((f.coef - b).norm(), 1e-10);
  const Eigen::VectorXd se = (f.sigma2() * XtX.inverse().diagonal()).cwiseSqrt();
  EXPECT_LT((f.se - se).norm(), 1e-10);
}

TEST(Ols, RejectsRankDeficientDesign) {
  Eigen::MatrixXd X(5, 2);
  X.col(0).setOnes();
  X.col(1).setConstant(3.0);
  EXPECT_THROW(ols(X, Eigen::VectorXd::LinSpaced(5, 0, 1)), NumericalError);
  EXPECT_THROW(ols(Eigen::MatrixXd::Ones(2, 2), Eigen::VectorXd::Ones(2)), NumericalError);
}

TEST(Distributions, KnownTailValues) {
  EXPECT_NEAR(t_pvalue(2.0, 10.0), 0.07338803477074039, 1e-12);
  EXPECT_NEAR(f_pvalue(3.0, 2.0, 20.0), 0.07253815028640576, 1e-12);
  EXPECT_NEAR(chi2_pvalue(3.8414588206941285, 1.0), 0.05, 1e-12);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
}

TEST(MacKinnon, PValuesMatchReference) {
  const std::pair<double, double> cases[] = {{-4.5, 0.0001966399003359905}, {-3.0, 0.034894400275345266},
                                             {-2.0, 0.28657309916843154},   {-1.0, 0.7532643012005655},
                                             {0.5, 0.9848730963065522},     {2.0, 0.9986729511999243}};
  for (auto [tau, p] : cases) expect_p(mackinnon_p_constant(tau), p, 1e-10);
  EXPECT_EQ(mackinnon_p_constant(3.0), 1.0);
  EXPECT_EQ(mackinnon_p_constant(-20.0), 0.0);
}

TEST(MacKinnon, CriticalValuesMatchReference) {
  EXPECT_NEAR(mackinnon_crit_constant(0.01, 100), -3.497501033, 1e-9);
  EXPECT_NEAR(mackinnon_crit_constant(0.05, 100), -2.89090644, 1e-9);
  EXPECT_NEAR(mackinnon_crit_constant(0.10, 100), -2.5824349, 1e-9);
  EXPECT_NEAR(mackinnon_crit_constant(0.01, 300), -3.4523371197407404, 1e-12);
  EXPECT_NEAR(mackinnon_crit_constant(0.05, 300), -2.871222860740741, 1e-12);
  EXPECT_NEAR(mackinnon_crit_constant(0.10, 300), -2.571929211111111, 1e-12);
}

TEST(Bandwidth, NeweyWestRule) {
  EXPECT_EQ(newey_west_bandwidth(100), 4);
  EXPECT_EQ(newey_west_bandwidth(300), 5);
  EXPECT_EQ(newey_west_bandwidth(1000), 6);
  EXPECT_EQ(adf_default_max_lag(300), 16);
  EXPECT_EQ(adf_default_max_lag(100), 12);
}

TEST(UnitRoot, MatchesReferenceImplementations) {
  const auto series = exbt::testing::oracle_series();
  for (const auto& c : kUnitRootCases) {
    SCOPED_TRACE(c.column);
    const Eigen::VectorXd& x = series.at(c.column);
    const TestResult adf = adf_test(x, adf_default_max_lag(x.size()));
    expect_rel(adf.statistic, c.adf, 1e-9);
    expect_p(adf.p_value, c.adf_p, 1e-7);
    EXPECT_EQ(adf.lags, c.adf_lag);
    EXPECT_EQ(adf.rejects_null, c.adf_p <= 0.05);

    const TestResult k = kpss_test(x);
    expect_rel(k.statistic, c.kpss, 1e-9);
    EXPECT_NEAR(k.p_value, c.kpss_p, 1e-9);

    const TestResult pp = pp_test(x);
    expect_rel(pp.statistic, c.pp, 1e-9);
    expect_p(pp.p_value, c.pp_p, 1e-6);
  }
}

TEST(UnitRoot, KpssVerdictUsesCriticalValues) {
  const auto series = exbt::testing::oracle_series();
  EXPECT_FALSE(kpss_test(series.at("wn")).rejects_null);
  EXPECT_TRUE(kpss_test(series.at("rw")).rejects_null);
  EXPECT_TRUE(kpss_test(series.at("rw")).p_bracketed);
  const TestResult ar = kpss_test(series.at("ar"));
  EXPECT_TRUE(ar.rejects_null);
  EXPECT_FALSE(kpss_test(series.at("ar"), 0.01).rejects_null);
  EXPECT_FALSE(ar.p_bracketed);
}

TEST(UnitRoot, DegenerateInputs) {
  const Eigen::VectorXd flat = Eigen::VectorXd::Constant(200, 3.0);
  EXPECT_THROW(adf_test(flat, 4), DataError);
  EXPECT_THROW(pp_test(flat), DataError);
  EXPECT_THROW(kpss_test(flat), DataError);
  EXPECT_THROW(adf_test(Eigen::VectorXd::LinSpaced(23, 0, 1), 4), DataError);
  Eigen::VectorXd gap = Eigen::VectorXd::LinSpaced(100, 0, 1);
  gap[50] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(adf_test(gap, 4), DataError);
}

TEST(UnitRoot, VoteNeedsTwoStationaryIndications) {
  UnitRootVote v;
  v.adf = false;
  EXPECT_TRUE(v.has_unit_root());
  v.pp = false;
  EXPECT_FALSE(v.has_unit_root());
  const auto series = exbt::testing::oracle_series();
  EXPECT_TRUE(unit_root_vote(series.at("rw")).has_unit_root());
  EXPECT_FALSE(unit_root_vote(series.at("wn")).has_unit_root());
}

TEST(UnitRoot, MonteCarloVerdictRates) {
  int rw_kept = 0, wn_rejected = 0;
  for (int seed = 0; seed < 40; ++seed) {
    std::mt19937_64 rng{std::uint64_t(seed)};
    const Eigen::VectorXd e = exbt::testing::normal_noise(rng, 500);
    rw_kept += unit_root_vote(exbt::testing::cumsum(e)).has_unit_root();
    wn_rejected += !unit_root_vote(e).has_unit_root();
  }
  EXPECT_GE(rw_kept, 36);
  EXPECT_GE(wn_rejected, 36);
}

TEST(Heteroskedasticity, MatchesReference) {
  const auto series = exbt::testing::oracle_series();
  struct Case {
    const char* column;
    double white, white_p, bp, bp_p, gq, gq_p;
  };
  const Case cases[] = {
      {"wn", 0.11550059562100978, 0.9438856083160847, 0.08563756684883961, 0.7697981232107014, 1.038945987589042,
       0.850385864860598},
      {"het", 57.81708181507672, 2.787277467700016e-13, 50.80887746179354, 1.018121771136513e-12,
       6.6358986714690795, 1.937715031581149e-18},
  };
  for (const auto& c : cases) {
    SCOPED_TRACE(c.column);
    const Eigen::VectorXd& y = series.at(c.column);
    const TestResult w = white_test(y), b = breusch_pagan_test(y), g = goldfeld_quandt_test(y);
    expect_rel(w.statistic, c.white, 1e-9);
    expect_p(w.p_value, c.white_p, 1e-6);
    expect_rel(b.statistic, c.bp, 1e-9);
    expect_p(b.p_value, c.bp_p, 1e-6);
    expect_rel(g.statistic, c.gq, 1e-9);
    expect_p(g.p_value, c.gq_p, 1e-6);
  }
  EXPECT_FALSE(het_vote(series.at("wn")).heteroskedastic());
  EXPECT_TRUE(het_vote(series.at("het")).heteroskedastic());
}

TEST(Heteroskedasticity, GoldfeldQuandtIsTwoSided) {
  std::mt19937_64 rng(4);
  Eigen::VectorXd shrinking = exbt::testing::normal_noise(rng, 300);
  for (Eigen::Index i = 0; i < 300; ++i) shrinking[i] *= 3.0 - 2.5 * double(i) / 299.0;
  const TestResult g = goldfeld_quandt_test(shrinking);
  EXPECT_LT(g.statistic, 1.0);
  EXPECT_TRUE(g.rejects_null);
}

TEST(Heteroskedasticity, DegenerateInputs) {
  EXPECT_THROW(white_test(Eigen::VectorXd::Constant(100, 1.0)), DataError);
  EXPECT_THROW(breusch_pagan_test(Eigen::VectorXd::LinSpaced(20, 0, 1)), DataError);
  EXPECT_THROW(goldfeld_quandt_test(Eigen::VectorXd::LinSpaced(20, 0, 1)), DataError);
}
