#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "exbt/data/panel.hpp"

namespace exbt::ml {

/// A (column, lag) pair. Lag 1 is the value observed on the decision day.
struct FeatureRef {
  std::string column;
  int lag = 1;

  std::string name() const { return column + "_lag" + std::to_string(lag); }
  friend bool operator==(const FeatureRef&, const FeatureRef&) = default;
};

/// Observations x features. Row r holds, for each FeatureRef, the panel
/// value at row_index[r] - lag + 1.
struct DesignMatrix {
  Eigen::MatrixXd rows;
  std::vector<std::string> feature_names;
  std::vector<Eigen::Index> row_index;
  std::vector<data::Date> row_dates;

  Eigen::Index size() const { return rows.rows(); }
};

/// Builds rows for panel indices in [begin, end), dropping rows where any
/// referenced value is missing or reaches before the panel start.
DesignMatrix build_design(const data::Panel& panel, const std::vector<FeatureRef>& features,
                          Eigen::Index begin, Eigen::Index end);

/// Keeps only the rows whose `labels[row_index]` is finite; returns the labels.
Eigen::VectorXd restrict_to_labelled(DesignMatrix& d, const Eigen::VectorXd& labels);

}  // namespace exbt::ml
