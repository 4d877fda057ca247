#pragma once

#include <Eigen/Dense>

namespace exbt::stats {

/// Outcome of a single hypothesis test.
///
/// `rejects_null` always refers to the test's own null hypothesis: a unit
/// root for ADF and PP, level stationarity for KPSS. KPSS p-values come from
/// a critical-value table and are bracketed to [0.01, 0.10]; `p_bracketed`
/// marks a value clipped at either end.
struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool rejects_null = false;
  bool p_bracketed = false;
  int lags = 0;
};

/// MacKinnon (1994) approximate p-value for a Dickey-Fuller tau statistic,
/// constant-only regression, one series.
double mackinnon_p_constant(double tau);
/// MacKinnon (2010) finite-sample critical value for the constant-only
/// regression at level 0.01, 0.05 or 0.10.
double mackinnon_crit_constant(double level, Eigen::Index nobs);

/// floor(4 (n/100)^(2/9)), the Newey-West bandwidth used by PP and KPSS.
int newey_west_bandwidth(Eigen::Index n);
/// Bartlett-weighted long-run variance of an already-centred series.
double bartlett_long_run_variance(const Eigen::VectorXd& u, int lags);

/// Augmented Dickey-Fuller with constant; lag order by AIC over 0..max_lag on
/// a common sample, final regression refit on the full sample for that lag.
TestResult adf_test(const Eigen::VectorXd& series, int max_lag, double alpha = 0.05);
/// Default maximum lag, 12 (n/100)^(1/4).
int adf_default_max_lag(Eigen::Index n);

/// Phillips-Perron Z-tau with constant.
TestResult pp_test(const Eigen::VectorXd& series, double alpha = 0.05);

/// KPSS level-stationarity test.
TestResult kpss_test(const Eigen::VectorXd& series, double alpha = 0.05);

/// Per-test unit-root indications, all in "unit root present" polarity.
struct UnitRootVote {
  bool adf = true;
  bool pp = true;
  bool kpss = true;

  int stationary_votes() const { return int(!adf) + int(!pp) + int(!kpss); }
  /// Unit root unless at least two of three tests indicate stationarity.
  bool has_unit_root() const { return stationary_votes() < 2; }
};

UnitRootVote unit_root_vote(const Eigen::VectorXd& series, double alpha = 0.05);

}  // namespace exbt::stats
