#include "exbt/stats/ols.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "exbt/error.hpp"

namespace exbt::stats {

double OlsFit::r_squared(const Eigen::VectorXd& y) const {
  const double tss = (y.array() - y.mean()).square().sum();
  return tss > 0.0 ? 1.0 - ssr / tss : 0.0;
}

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows(), k = X.cols();
  if (y.size() != n) throw DataError("ols: X and y row counts differ");
  if (n <= k) throw NumericalError("ols: no residual degrees of freedom");

  // Scale-free rank check: normalise columns before factorising.
  Eigen::VectorXd norms = X.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (norms[j] == 0.0) throw NumericalError("ols: rank-deficient design (zero column)");
  }
  Eigen::MatrixXd Xs = X * norms.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) throw NumericalError("ols: rank-deficient design");

  OlsFit fit;
  fit.nobs = n;
  fit.dof = n - k;
  Eigen::VectorXd bs = qr.solve(y);
  fit.coef = bs.cwiseQuotient(norms);
  fit.resid = y - X * fit.coef;
  fit.ssr = fit.resid.squaredNorm();

  // diag((Xs'Xs)^-1) from R^-1, then undo column scaling.
  Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::VectorXd diag_perm = Rinv.rowwise().squaredNorm();
  Eigen::VectorXd diag(k);
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index j = 0; j < k; ++j) diag[perm[j]] = diag_perm[j];
  fit.se = (fit.sigma2() * diag.array()).sqrt().matrix().cwiseQuotient(norms);
  return fit;
}

double t_pvalue(double t, double dof) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double f_pvalue(double f, double d1, double d2) {
  if (std::isnan(f)) return 1.0;
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  boost::math::fisher_f dist(d1, d2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

double chi2_pvalue(double x, double k) {
  if (std::isnan(x)) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x <= 0.0) return 1.0;
  boost::math::chi_squared dist(k);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double normal_cdf(double x) {
  if (x == -INFINITY) return 0.0;
  if (x == INFINITY) return 1.0;
  return boost::math::cdf(boost::math::normal(), x);
}

}  // namespace exbt::stats
