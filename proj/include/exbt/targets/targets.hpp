#pragma once

#include <Eigen/Dense>
#include <deque>
#include <limits>
#include <filesystem>
#include <string_view>
#include <vector>

#include "exbt/data/csv.hpp"

namespace exbt::targets {

enum class TargetKind { continuous_return, binary_updown, extrema_pair };

std::string_view to_string(TargetKind k);
TargetKind parse_target_kind(std::string_view s);

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// One label construction over a price series, index-aligned with it.
/// The label at index t concerns the move from t to t+1 (continuous,
/// binary) or whether t itself is a local extremum (extrema_pair).
struct TargetSeries {
  TargetKind kind = TargetKind::binary_updown;
  int window = 0;           // extrema only
  Eigen::VectorXd values;   // continuous return or 0/1; extrema: unused
  Eigen::VectorXd is_min;   // extrema only
  Eigen::VectorXd is_max;   // extrema only
  Mask defined;

  Eigen::Index size() const { return defined.size(); }
  /// Number of label series (two classifiers for extrema).
  int label_count() const { return kind == TargetKind::extrema_pair ? 2 : 1; }
  /// Label series `which` with NaN where undefined. For extrema, 0 = is_min, 1 = is_max.
  Eigen::VectorXd labels(int which = 0) const;
  bool is_classification() const { return kind != TargetKind::continuous_return; }
};

/// ln(p[t+1]) - ln(p[t]); last index undefined.
TargetSeries continuous_return_target(const Eigen::VectorXd& price);
/// 1 iff p[t+1] > p[t]; last index undefined.
TargetSeries binary_updown_target(const Eigen::VectorXd& price);
/// Strict local minima/maxima over the full +/- w window; undefined within
/// w of either end.
TargetSeries extrema_targets(const Eigen::VectorXd& price, int w);

TargetSeries make_target(TargetKind kind, const Eigen::VectorXd& price, int window);

/// m[t] = extreme of v[t-w+1 .. t] under `better` (e.g. std::less for the
/// minimum), defined for t >= w-1. Monotone-deque sliding window.
template <typename Derived, typename Compare>
Eigen::VectorXd sliding_extreme(const Eigen::DenseBase<Derived>& v, int w, Compare better) {
  const Eigen::Index n = v.size();
  Eigen::VectorXd out = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  std::deque<Eigen::Index> q;
  for (Eigen::Index i = 0; i < n; ++i) {
    while (!q.empty() && !better(v[q.back()], v[i])) q.pop_back();
    q.push_back(i);
    if (q.front() <= i - w) q.pop_front();
    if (i >= w - 1) out[i] = v[q.front()];
  }
  return out;
}

struct ClassWeights {
  double weight_positive = 1.0;
  double weight_negative = 1.0;

  double operator()(double label) const { return label > 0.5 ? weight_positive : weight_negative; }
};

/// n / (2 n_c) per class; NaN labels are ignored.
ClassWeights class_weights(const Eigen::VectorXd& labels);

/// `date,kind,value`, or `date,kind,is_min,is_max,defined` for extrema.
void write_targets(const TargetSeries& t, const std::vector<data::Date>& dates,
                   const std::filesystem::path& path);

}  // namespace exbt::targets
