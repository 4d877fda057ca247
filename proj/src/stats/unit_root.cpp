#include "exbt/stats/unit_root.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "exbt/error.hpp"
#include "exbt/stats/ols.hpp"

namespace exbt::stats {

namespace {

void check_series(const Eigen::VectorXd& y, Eigen::Index min_len, const char* test) {
  if (y.size() < min_len) {
    throw DataError(std::string(test) + ": series too short (" + std::to_string(y.size()) +
                    " < " + std::to_string(min_len) + ")");
  }
  if (!y.allFinite()) throw DataError(std::string(test) + ": series has missing values");
  if (y.maxCoeff() == y.minCoeff()) throw DataError(std::string(test) + ": constant series");
}

// Regression of dy_t on [y_{t-1}, 1, dy_{t-1..t-p}] over rows t0..n-1 of dy.
OlsFit adf_regression(const Eigen::VectorXd& y, int p, Eigen::Index first_row) {
  const Eigen::VectorXd dy = y.tail(y.size() - 1) - y.head(y.size() - 1);
  const Eigen::Index rows = dy.size() - first_row;
  Eigen::MatrixXd X(rows, 2 + p);
  Eigen::VectorXd lhs = dy.tail(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index t = first_row + r;  // index into dy; level y_{t} precedes dy_t
    X(r, 0) = y[t];
    X(r, 1) = 1.0;
    for (int i = 1; i <= p; ++i) X(r, 1 + i) = dy[t - i];
  }
  return ols(X, lhs);
}

double polyval(const double* c, int n, double x) {
  double acc = 0.0;
  for (int i = n - 1; i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

}  // namespace

double mackinnon_p_constant(double tau) {
  constexpr double tau_max = 2.74, tau_min = -18.83, tau_star = -1.61;
  constexpr double small_p[] = {2.1659, 1.4412, 0.038269};
  constexpr double large_p[] = {1.7339, 0.93202, -0.12745, -0.010368};
  if (tau > tau_max) return 1.0;
  if (tau < tau_min) return 0.0;
  if (tau <= tau_star) return normal_cdf(polyval(small_p, 3, tau));
  return normal_cdf(polyval(large_p, 4, tau));
}

double mackinnon_crit_constant(double level, Eigen::Index nobs) {
  static constexpr std::array<std::array<double, 4>, 3> table{{
      {-3.43035, -6.5393, -16.786, -79.433},
      {-2.86154, -2.8903, -4.234, -40.040},
      {-2.56677, -1.5384, -2.809, 0.0},
  }};
  std::size_t row = level <= 0.01 ? 0 : level <= 0.05 ? 1 : 2;
  const double inv = 1.0 / double(nobs);
  const auto& b = table[row];
  return b[0] + b[1] * inv + b[2] * inv * inv + b[3] * inv * inv * inv;
}

int newey_west_bandwidth(Eigen::Index n) {
  return int(std::floor(4.0 * std::pow(double(n) / 100.0, 2.0 / 9.0)));
}

double bartlett_long_run_variance(const Eigen::VectorXd& u, int lags) {
  const Eigen::Index n = u.size();
  double s = u.squaredNorm() / double(n);
  for (int j = 1; j <= lags && j < n; ++j) {
    const double gamma = u.tail(n - j).dot(u.head(n - j)) / double(n);
    s += 2.0 * (1.0 - double(j) / double(lags + 1)) * gamma;
  }
  return s;
}

int adf_default_max_lag(Eigen::Index n) {
  return int(std::ceil(12.0 * std::pow(double(n) / 100.0, 0.25)));
}

TestResult adf_test(const Eigen::VectorXd& series, int max_lag, double alpha) {
  if (max_lag < 0) throw ConfigError("adf_test: max_lag must be nonnegative");
  check_series(series, 20 + max_lag, "adf_test");

  // AIC over a common sample so the candidates are comparable.
  int best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= max_lag; ++p) {
    OlsFit fit = adf_regression(series, p, max_lag);
    const double n = double(fit.nobs);
    const double aic = n * std::log(fit.ssr / n) + 2.0 * double(p + 2);
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = p;
    }
  }
  OlsFit fit = adf_regression(series, best_lag, best_lag);
  TestResult r;
  r.statistic = fit.t_stat(0);
  r.p_value = mackinnon_p_constant(r.statistic);
  r.rejects_null = r.p_value <= alpha;
  r.lags = best_lag;
  return r;
}

TestResult pp_test(const Eigen::VectorXd& series, double alpha) {
  check_series(series, 20, "pp_test");
  const Eigen::Index n = series.size() - 1;
  Eigen::MatrixXd X(n, 2);
  X.col(0) = series.head(n);
  X.col(1).setOnes();
  Eigen::VectorXd lhs = series.tail(n);
  OlsFit fit = ols(X, lhs);

  const int lags = newey_west_bandwidth(n);
  const Eigen::VectorXd& u = fit.resid;
  const double gamma0 = u.squaredNorm() / double(n);
  const double lam2 = bartlett_long_run_variance(u, lags);
  const double lam = std::sqrt(lam2);
  const double s = std::sqrt(fit.sigma2());
  const double sigma_rho = fit.se[0];
  const double t_rho = (fit.coef[0] - 1.0) / sigma_rho;

  TestResult r;
  r.statistic = std::sqrt(gamma0 / lam2) * t_rho -
                0.5 * ((lam2 - gamma0) / lam) * (double(n) * sigma_rho / s);
  r.p_value = mackinnon_p_constant(r.statistic);
  r.rejects_null = r.p_value <= alpha;
  r.lags = lags;
  return r;
}

TestResult kpss_test(const Eigen::VectorXd& series, double alpha) {
  check_series(series, 20, "kpss_test");
  const Eigen::Index n = series.size();
  const Eigen::VectorXd e = series.array() - series.mean();
  const int lags = newey_west_bandwidth(n);
  double partial = 0.0, eta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    partial += e[i];
    eta += partial * partial;
  }
  eta /= double(n) * double(n);
  const double s2 = bartlett_long_run_variance(e, lags);

  // Level-stationarity critical values, Kwiatkowski et al. (1992) Table 1.
  static constexpr std::array<double, 4> crit{0.347, 0.463, 0.574, 0.739};
  static constexpr std::array<double, 4> pvals{0.10, 0.05, 0.025, 0.01};

  TestResult r;
  r.statistic = eta / s2;
  r.lags = lags;
  if (r.statistic <= crit.front()) {
    r.p_value = pvals.front();
    r.p_bracketed = true;
  } else if (r.statistic >= crit.back()) {
    r.p_value = pvals.back();
    r.p_bracketed = true;
  } else {
    std::size_t k = 1;
    while (r.statistic > crit[k]) ++k;
    const double w = (r.statistic - crit[k - 1]) / (crit[k] - crit[k - 1]);
    r.p_value = pvals[k - 1] + w * (pvals[k] - pvals[k - 1]);
  }
  // Decide on the statistic itself so bracketed p-values cannot flip a verdict.
  double c;
  if (alpha >= pvals.front()) {
    c = crit.front();
  } else if (alpha <= pvals.back()) {
    c = crit.back();
  } else {
    std::size_t k = 1;
    while (alpha < pvals[k]) ++k;
    const double w = (alpha - pvals[k - 1]) / (pvals[k] - pvals[k - 1]);
    c = crit[k - 1] + w * (crit[k] - crit[k - 1]);
  }
  r.rejects_null = r.statistic > c;
  return r;
}

UnitRootVote unit_root_vote(const Eigen::VectorXd& series, double alpha) {
  UnitRootVote v;
  const int max_lag = std::min(adf_default_max_lag(series.size()), int(series.size()) - 20);
  v.adf = !adf_test(series, std::max(max_lag, 0), alpha).rejects_null;
  v.pp = !pp_test(series, alpha).rejects_null;
  v.kpss = kpss_test(series, alpha).rejects_null;
  return v;
}

}  // namespace exbt::stats
