#pragma once

#include <Eigen/Dense>

#include "exbt/stats/unit_root.hpp"

namespace exbt::stats {

// All three tests run on the residuals of an auxiliary regression of the
// series on an intercept and a linear time trend. Null: homoskedasticity.

/// White: n R^2 of e^2 on [1, t, t^2] ~ chi2(2).
TestResult white_test(const Eigen::VectorXd& series, double alpha = 0.05);
/// Breusch-Pagan, Koenker's studentised form: n R^2 of e^2 on [1, t] ~ chi2(1).
TestResult breusch_pagan_test(const Eigen::VectorXd& series, double alpha = 0.05);
/// Goldfeld-Quandt: trend regressions on the first and last thirds, middle
/// third dropped; two-sided F test on the residual variance ratio.
TestResult goldfeld_quandt_test(const Eigen::VectorXd& series, double alpha = 0.05);

struct HetVote {
  bool white = false;
  bool bp = false;
  bool gq = false;

  int rejections() const { return int(white) + int(bp) + int(gq); }
  /// Homoskedastic if at least two of three tests fail to reject.
  bool heteroskedastic() const { return rejections() >= 2; }
};

HetVote het_vote(const Eigen::VectorXd& series, double alpha = 0.05);

}  // namespace exbt::stats
