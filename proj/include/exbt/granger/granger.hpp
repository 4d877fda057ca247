#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "exbt/data/panel.hpp"

namespace exbt::granger {

enum class Mode { per_lag, joint };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

inline constexpr int kDefaultMaxLag = 14;
inline constexpr int kDefaultOwnLags = 14;

/// p-value of x_{t-lag} in the OLS of y_t on [1, y_{t-1..t-own_lags}, x_{t-lag}].
/// Rows with a NaN in any regressor are dropped. Throws DataError when fewer
/// than own_lags + lag + 10 rows remain, NumericalError on a singular design.
double granger_per_lag(const Eigen::VectorXd& target, const Eigen::VectorXd& feature, int lag,
                       int own_lags = kDefaultOwnLags);

/// Nested-model F test of x_{t-1..t-max_lag} given [1, y_{t-1..t-own_lags}].
double granger_joint(const Eigen::VectorXd& target, const Eigen::VectorXd& feature, int max_lag,
                     int own_lags = kDefaultOwnLags);

struct LagUnit {
  std::string column;
  int lag = 0;  // 0 in joint mode
  double p_value = 1.0;
  bool selected = false;
};

struct LagSelection {
  Mode mode = Mode::per_lag;
  int max_lag = kDefaultMaxLag;
  double alpha = 0.05;
  std::vector<LagUnit> tested;  // ordered by (column, lag)

  std::vector<LagUnit> selected() const;
};

/// Tests every column of `panel` except those listed in
/// `skip` against the target. The target value at row t describes the move
/// after day t, so "lag L" means the feature observed L-1 days before the
/// decision day: lag 1 is the same-day close. Internally the target is
/// shifted one step forward before calling the primitives above.
///
/// Columns with zero variance on the usable rows get p = 1 and are never
/// selected, as do units the regression cannot test: too few rows, or lags
/// already spanned by the target's own lags (the differenced log price
/// against a continuous return target).
LagSelection select_features(const data::Panel& panel, const Eigen::VectorXd& target_labels,
                             Mode mode, double alpha = 0.05, int max_lag = kDefaultMaxLag,
                             int own_lags = kDefaultOwnLags,
                             const std::vector<std::string>& skip = {});

/// `column,lag,p_value,selected` (lag empty in joint mode).
void write_selection(const LagSelection& s, const std::filesystem::path& path);

}  // namespace exbt::granger
