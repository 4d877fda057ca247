#include <Eigen/IterativeLinearSolvers>
#include <iostream>
#include <string>

#include "exbt/error.hpp"
#include "exbt/ml/linear.hpp"

namespace exbt::ml {

RidgeSolver ridge_solver_for(std::string_view tag) {
  if (tag == "svd" || tag == "cholesky" || tag == "direct") return RidgeSolver::direct;
  if (tag == "lsqr" || tag == "sparse_cg" || tag == "sag" || tag == "saga" || tag == "iterative") {
    return RidgeSolver::iterative;
  }
  throw ConfigError("unknown ridge solver '" + std::string(tag) + "'");
}

LinearModel ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                      RidgeSolver solver) {
  if (X.rows() != y.size()) throw DataError("ridge_fit: X and y row counts differ");
  if (X.rows() == 0) throw DataError("ridge_fit: no rows");
  if (!(lambda >= 0.0)) throw ConfigError("ridge_fit: lambda must be >= 0");

  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;
  const Eigen::Index k = X.cols();

  LinearModel m;
  if (lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xc);
    if (qr.rank() < k) throw NumericalError("ridge_fit: rank-deficient design with lambda = 0");
    m.coef = qr.solve(yc);
  } else {
    Eigen::MatrixXd A = Xc.transpose() * Xc;
    A.diagonal().array() += lambda;
    const Eigen::VectorXd b = Xc.transpose() * yc;
    if (solver == RidgeSolver::direct) {
      m.coef = A.llt().solve(b);
    } else {
      Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(1e-14);
      cg.setMaxIterations(std::max<Eigen::Index>(10 * k, 1000));
      cg.compute(A);
      m.coef = cg.solve(b);
      if (cg.info() != Eigen::Success) {
        throw NumericalError("ridge_fit: conjugate gradient did not converge");
      }
    }
  }
  if (!m.coef.allFinite()) throw NumericalError("ridge_fit: non-finite coefficients");
  m.intercept = y_mean - x_mean.dot(m.coef);
  return m;
}

}  // namespace exbt::ml
