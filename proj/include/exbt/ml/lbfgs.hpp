#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace exbt::ml {

struct LbfgsOptions {
  int max_iterations = 10000;
  double gradient_tolerance = 1e-6;
  int memory = 10;
  /// Stop after this many consecutive steps that change the objective by
  /// less than a few ulps.
  int stall_limit = 20;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with a backtracking Armijo line search.
/// `f(x, grad)` returns the objective and writes the gradient. Stops when the
/// gradient norm falls below the tolerance, after max_iterations, when the
/// line search can no longer decrease the objective, or when the objective
/// has stopped moving at rounding level.
template <typename Objective>
LbfgsResult lbfgs_minimize(Objective&& f, Eigen::VectorXd x, const LbfgsOptions& opt = {}) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd g(n), g_new(n), x_new(n);
  double fx = f(x, g);
  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;

  LbfgsResult r;
  int it = 0, stalled = 0;
  for (; it < opt.max_iterations; ++it) {
    if (!std::isfinite(fx)) break;
    if (g.norm() < opt.gradient_tolerance) {
      r.converged = true;
      break;
    }
    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> a(S.size());
    for (int i = int(S.size()) - 1; i >= 0; --i) {
      a[std::size_t(i)] = rho[std::size_t(i)] * S[std::size_t(i)].dot(q);
      q -= a[std::size_t(i)] * Y[std::size_t(i)];
    }
    double gamma = 1.0;
    if (!S.empty()) gamma = S.back().dot(Y.back()) / Y.back().squaredNorm();
    Eigen::VectorXd d = gamma * q;
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double b = rho[i] * Y[i].dot(d);
      d += S[i] * (a[i] - b);
    }
    d = -d;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      d = -g;
      slope = -g.squaredNorm();
    }
    double step = S.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * d;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && (f_new <= fx + 1e-4 * step * slope || g_new.norm() < opt.gradient_tolerance)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    stalled = std::abs(fx - f_new) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(fx), 1.0)
                  ? stalled + 1
                  : 0;
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (int(S.size()) > opt.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    x = x_new;
    g = g_new;
    fx = f_new;
    if (stalled >= opt.stall_limit) {
      ++it;
      break;
    }
  }
  if (!r.converged && g.norm() < opt.gradient_tolerance) r.converged = true;
  r.x = std::move(x);
  r.value = fx;
  r.gradient_norm = g.norm();
  r.iterations = it;
  return r;
}

}  // namespace exbt::ml
