#pragma once

#include <Eigen/Core>
#include <vector>

namespace exbt::harness {

/// Half-open row range [begin, end).
struct RowRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;

  Eigen::Index size() const { return end - begin; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

struct CvSplit {
  RowRange train;
  RowRange test;
};

/// Increasing-window plan: k + 1 contiguous blocks, fold i trains on blocks
/// 1..i and tests on block i + 1.
struct CvPlan {
  int k = 7;
  std::vector<Eigen::Index> block_boundaries;  // k + 2 cut points, 0 first, n last
  std::vector<CvSplit> splits;
};

/// Equal blocks of n / (k + 1) rows; the n mod (k + 1) leftover rows go one
/// each to the leading blocks. Requires n >= 2 (k + 1).
CvPlan make_cv_splits(Eigen::Index n_days, int k = 7);

}  // namespace exbt::harness
