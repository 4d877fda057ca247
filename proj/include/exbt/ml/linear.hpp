#pragma once

#include <Eigen/Dense>
#include <string_view>

#include "exbt/targets/targets.hpp"

namespace exbt::ml {

/// Solver families actually implemented. Config tags map onto these.
enum class RidgeSolver { direct, iterative };
enum class LogisticSolver { newton, lbfgs };

/// svd, cholesky -> direct; lsqr, sparse_cg, sag, saga -> iterative (CG).
RidgeSolver ridge_solver_for(std::string_view tag);
/// newton-cholesky, newton-cg, liblinear -> newton; lbfgs, sag, saga -> lbfgs.
LogisticSolver logistic_solver_for(std::string_view tag);

struct LinearModel {
  Eigen::VectorXd coef;
  double intercept = 0.0;

  Eigen::VectorXd decision(const Eigen::MatrixXd& X) const {
    return (X * coef).array() + intercept;
  }
};

/// min ||y - X b - c||^2 + lambda ||b||^2 with an unpenalised intercept c.
/// lambda = 0 on a rank-deficient X throws NumericalError.
LinearModel ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                      RidgeSolver solver = RidgeSolver::direct);

struct LogisticFit {
  LinearModel model;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

/// Weighted binary cross-entropy (summed over samples) + lambda/2 ||b||^2,
/// intercept unpenalised. Writes the gradient w.r.t. [intercept, coef] when
/// `grad` is non-null.
double logistic_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& sample_weight, double lambda,
                          const Eigen::VectorXd& theta, Eigen::VectorXd* grad);

/// Converges to a gradient norm below 1e-6 within 10000 iterations or throws
/// NumericalError carrying the final gradient norm.
LogisticFit logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                         const targets::ClassWeights& weights = {},
                         LogisticSolver solver = LogisticSolver::newton);

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z);

}  // namespace exbt::ml
