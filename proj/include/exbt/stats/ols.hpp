#pragma once

#include <Eigen/Dense>

namespace exbt::stats {

/// Ordinary least squares fit with classical (homoskedastic) standard errors.
struct OlsFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::VectorXd resid;
  double ssr = 0.0;
  Eigen::Index nobs = 0;
  Eigen::Index dof = 0;  // nobs - number of regressors

  double sigma2() const { return ssr / double(dof); }
  double t_stat(Eigen::Index j) const { return coef[j] / se[j]; }
  /// Coefficient of determination around the mean of y (requires an intercept column).
  double r_squared(const Eigen::VectorXd& y) const;
};

/// Solves min ||y - X b||^2 by column-pivoted QR. Throws NumericalError when
/// X is rank deficient or has no residual degrees of freedom.
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Two-sided p-value of a t statistic with `dof` degrees of freedom.
double t_pvalue(double t, double dof);
/// Upper-tail p-value of an F(d1, d2) statistic.
double f_pvalue(double f, double d1, double d2);
/// Upper-tail p-value of a chi-squared(k) statistic.
double chi2_pvalue(double x, double k);
double normal_cdf(double x);

/// Sample variance (n-1 denominator).
template <typename Derived>
double sample_variance(const Eigen::DenseBase<Derived>& v) {
  const double mean = v.mean();
  return (v.derived().array() - mean).square().sum() / double(v.size() - 1);
}

}  // namespace exbt::stats
