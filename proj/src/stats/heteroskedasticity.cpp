#include "exbt/stats/heteroskedasticity.hpp"

#include <algorithm>
#include <cmath>

#include "exbt/error.hpp"
#include "exbt/stats/ols.hpp"

namespace exbt::stats {

namespace {

constexpr Eigen::Index kMinLength = 30;

void check_series(const Eigen::VectorXd& y, const char* test) {
  if (y.size() < kMinLength) {
    throw DataError(std::string(test) + ": series too short (" + std::to_string(y.size()) +
                    " < 30)");
  }
  if (!y.allFinite()) throw DataError(std::string(test) + ": series has missing values");
  if (y.maxCoeff() == y.minCoeff()) throw DataError(std::string(test) + ": constant series");
}

// Time regressor scaled to [0, 1] to keep t^2 well conditioned.
Eigen::MatrixXd trend_design(Eigen::Index begin, Eigen::Index end, Eigen::Index n, int degree) {
  Eigen::MatrixXd X(end - begin, degree + 1);
  for (Eigen::Index i = begin; i < end; ++i) {
    const double t = double(i) / double(n - 1);
    double p = 1.0;
    for (int d = 0; d <= degree; ++d, p *= t) X(i - begin, d) = p;
  }
  return X;
}

Eigen::VectorXd trend_residuals(const Eigen::VectorXd& y) {
  return ols(trend_design(0, y.size(), y.size(), 1), y).resid;
}

TestResult lm_test(const Eigen::VectorXd& y, int degree, double alpha) {
  const Eigen::Index n = y.size();
  const Eigen::VectorXd e2 = trend_residuals(y).array().square();
  OlsFit aux = ols(trend_design(0, n, n, degree), e2);
  TestResult r;
  r.statistic = double(n) * aux.r_squared(e2);
  r.p_value = chi2_pvalue(r.statistic, degree);
  r.rejects_null = r.p_value <= alpha;
  return r;
}

}  // namespace

TestResult white_test(const Eigen::VectorXd& series, double alpha) {
  check_series(series, "white_test");
  return lm_test(series, 2, alpha);
}

TestResult breusch_pagan_test(const Eigen::VectorXd& series, double alpha) {
  check_series(series, "breusch_pagan_test");
  return lm_test(series, 1, alpha);
}

TestResult goldfeld_quandt_test(const Eigen::VectorXd& series, double alpha) {
  check_series(series, "goldfeld_quandt_test");
  const Eigen::Index n = series.size();
  const Eigen::Index third = n / 3;
  OlsFit lo = ols(trend_design(0, third, n, 1), series.head(third));
  OlsFit hi = ols(trend_design(n - third, n, n, 1), series.tail(third));
  if (lo.ssr == 0.0 && hi.ssr == 0.0) throw DataError("goldfeld_quandt_test: zero residual variance");
  TestResult r;
  r.statistic = hi.sigma2() / lo.sigma2();
  const double upper = f_pvalue(r.statistic, double(hi.dof), double(lo.dof));
  r.p_value = std::min(1.0, 2.0 * std::min(upper, 1.0 - upper));
  r.rejects_null = r.p_value <= alpha;
  return r;
}

HetVote het_vote(const Eigen::VectorXd& series, double alpha) {
  HetVote v;
  v.white = white_test(series, alpha).rejects_null;
  v.bp = breusch_pagan_test(series, alpha).rejects_null;
  v.gq = goldfeld_quandt_test(series, alpha).rejects_null;
  return v;
}

}  // namespace exbt::stats
