#include <cmath>
#include <string>

#include "exbt/error.hpp"
#include "exbt/ml/lbfgs.hpp"
#include "exbt/ml/linear.hpp"

namespace exbt::ml {

namespace {

constexpr double kTolerance = 1e-6;
constexpr int kMaxIterations = 10000;

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd A(X.rows(), X.cols() + 1);
  A.col(0).setOnes();
  A.rightCols(X.cols()) = X;
  return A;
}

}  // namespace

LogisticSolver logistic_solver_for(std::string_view tag) {
  if (tag == "newton-cholesky" || tag == "newton-cg" || tag == "liblinear" || tag == "newton") {
    return LogisticSolver::newton;
  }
  if (tag == "lbfgs" || tag == "l-bfgs" || tag == "sag" || tag == "saga") return LogisticSolver::lbfgs;
  throw ConfigError("unknown logistic solver '" + std::string(tag) + "'");
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  Eigen::VectorXd p(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    p[i] = z[i] >= 0 ? 1.0 / (1.0 + std::exp(-z[i])) : std::exp(z[i]) / (1.0 + std::exp(z[i]));
  }
  return p;
}

double logistic_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& sample_weight, double lambda,
                          const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
  const Eigen::VectorXd coef = theta.tail(X.cols());
  const Eigen::VectorXd z = (X * coef).array() + theta[0];
  double f = 0.5 * lambda * coef.squaredNorm();
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    f += sample_weight[i] * (softplus(z[i]) - y[i] * z[i]);
  }
  if (grad) {
    const Eigen::VectorXd r = sample_weight.cwiseProduct(sigmoid(z) - y);
    grad->resize(theta.size());
    (*grad)[0] = r.sum();
    grad->tail(X.cols()) = X.transpose() * r + lambda * coef;
  }
  return f;
}

LogisticFit logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                         const targets::ClassWeights& weights, LogisticSolver solver) {
  if (X.rows() != y.size()) throw DataError("logistic_fit: X and y row counts differ");
  if (!(lambda >= 0.0)) throw ConfigError("logistic_fit: lambda must be >= 0");
  const Eigen::Index n = X.rows(), k = X.cols();
  Eigen::VectorXd sw(n);
  double pos = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    sw[i] = weights(y[i]);
    pos += y[i] > 0.5;
  }
  if (pos == 0 || pos == double(n)) throw DataError("logistic_fit: both classes must be present");

  auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& g) {
    return logistic_objective(X, y, sw, lambda, theta, &g);
  };

  // Newton iterations with backtracking. Near the optimum the objective is
  // flat to rounding, so a step that shrinks the gradient is also accepted.
  const Eigen::MatrixXd A = with_intercept(X);
  auto newton = [&](Eigen::VectorXd theta, int max_it, int& it) {
    Eigen::VectorXd g, g_new;
    double f = objective(theta, g);
    for (it = 0; it < max_it && g.norm() >= kTolerance; ++it) {
      const Eigen::VectorXd p = sigmoid(A * theta);
      const Eigen::VectorXd h = sw.array() * p.array() * (1.0 - p.array());
      Eigen::MatrixXd H = A.transpose() * h.asDiagonal() * A;
      H.diagonal().tail(k).array() += lambda;
      H.diagonal().array() += 1e-12 * H.diagonal().maxCoeff();
      const Eigen::VectorXd step = H.ldlt().solve(-g);
      const double slope = g.dot(step);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Eigen::VectorXd cand = theta + t * step;
        const double f_new = objective(cand, g_new);
        const bool armijo = f_new <= f + 1e-4 * t * slope;
        const bool flat = f_new <= f + 1e-12 * std::abs(f) && g_new.norm() < g.norm();
        if (std::isfinite(f_new) && (armijo || flat)) {
          theta = cand;
          f = f_new;
          g = g_new;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    return theta;
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(k + 1);
  LogisticFit out;
  Eigen::VectorXd g;
  if (solver == LogisticSolver::lbfgs) {
    LbfgsResult r = lbfgs_minimize(objective, theta, {kMaxIterations, kTolerance, 10});
    theta = r.x;
    out.iterations = r.iterations;
    if (!r.converged && theta.allFinite()) {
      // L-BFGS stalls on rounding before the absolute tolerance; finish with Newton.
      int it = 0;
      theta = newton(theta, 50, it);
      out.iterations += it;
    }
  } else {
    theta = newton(theta, kMaxIterations, out.iterations);
  }
  out.objective = objective(theta, g);
  out.gradient_norm = g.norm();
  if (!theta.allFinite() || !(out.gradient_norm < kTolerance)) {
    throw NumericalError("logistic_fit: did not converge, final gradient norm " +
                         std::to_string(out.gradient_norm));
  }
  out.model.intercept = theta[0];
  out.model.coef = theta.tail(k);
  return out;
}

}  // namespace exbt::ml
