#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "exbt/data/panel.hpp"
#include "exbt/stats/heteroskedasticity.hpp"
#include "exbt/stats/unit_root.hpp"

namespace exbt::prep {

/// Transform decision for one column, fitted on a training span.
struct FeatureMeta {
  std::string column;
  int order_of_integration = 0;
  bool logged = false;
  /// Heteroskedastic, but a nonpositive value prevented the log.
  bool log_blocked = false;
  /// Still indicated a unit root after max_diff differences.
  bool diff_cap_reached = false;
  /// Zero variance on the fitting span; no tests run, excluded from selection.
  bool constant = false;
  stats::UnitRootVote unit_root;  // at the final differencing level
  stats::HetVote het;             // on levels
  double alpha = 0.05;
};

/// Result of differencing: the series (NaN before index first+order) plus the
/// first valid value of every intermediate level, enough to invert.
struct Differenced {
  Eigen::VectorXd values;
  std::vector<double> initial;
  Eigen::Index first = 0;  // first observed index of the input
};

/// Repeated first differences; leading NaNs are carried through.
Differenced difference(const Eigen::VectorXd& v, int order);
/// Cumulative-sum inverse of difference().
Eigen::VectorXd integrate(const Differenced& d);

/// Decides per-column transforms from the panel's rows: log when at least
/// two heteroskedasticity tests reject and the column is strictly positive,
/// then difference until at least two unit-root tests indicate stationarity
/// or max_diff is reached. The price column is always logged and then
/// differenced by the same rule.
std::vector<FeatureMeta> fit_transform_plan(const data::Panel& panel, double alpha = 0.05,
                                            int max_diff = 2);

/// Applies fitted decisions. Row alignment is preserved: values that are
/// undefined after differencing become NaN. Columns without a meta entry
/// pass through unchanged.
data::Panel apply_transforms(const data::Panel& panel, const std::vector<FeatureMeta>& meta);

struct TransformResult {
  data::Panel panel;              // trimmed by the largest differencing order
  std::vector<FeatureMeta> meta;
  Eigen::VectorXd raw_price;      // untouched price, aligned with `panel`
};

/// fit_transform_plan + apply_transforms, then drops the first max-order rows.
TransformResult fit_transforms(const data::Panel& panel, double alpha = 0.05, int max_diff = 2);

/// `column,order_of_integration,logged,adf,pp,kpss,white,bp,gq`
void write_feature_meta(const std::vector<FeatureMeta>& meta, const std::filesystem::path& path);

}  // namespace exbt::prep
