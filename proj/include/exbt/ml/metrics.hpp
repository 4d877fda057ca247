#pragma once

#include <Eigen/Dense>

namespace exbt::ml {

struct ThresholdChoice {
  double tau = 0.5;
  double accuracy = 0.0;
};

/// Grid point maximising the accuracy of 1[prob > tau]; ties go to the
/// smallest tau. Sort-and-sweep, O((n + g) log n).
ThresholdChoice threshold_search(const Eigen::VectorXd& probs, const Eigen::VectorXd& labels,
                                 const Eigen::VectorXd& grid);

/// 0.00, 0.01, ..., 1.00.
Eigen::VectorXd default_threshold_grid();

/// Mann-Whitney statistic P(s_pos > s_neg) + P(s_pos = s_neg) / 2 via
/// tie-averaged ranks. Throws DataError on a single class.
double auc_roc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

/// Fraction of positions where predicted and true 0/1 labels agree.
double accuracy(const Eigen::VectorXd& predicted, const Eigen::VectorXd& labels);

}  // namespace exbt::ml
