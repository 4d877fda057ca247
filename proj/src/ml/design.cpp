#include "exbt/ml/design.hpp"

#include <cmath>

#include "exbt/error.hpp"

namespace exbt::ml {

DesignMatrix build_design(const data::Panel& panel, const std::vector<FeatureRef>& features,
                          Eigen::Index begin, Eigen::Index end) {
  if (begin < 0 || end > Eigen::Index(panel.size()) || begin > end) {
    throw DataError("build_design: row range out of bounds");
  }
  std::vector<const Eigen::VectorXd*> cols;
  DesignMatrix d;
  for (const auto& f : features) {
    if (f.lag < 1) throw ConfigError("build_design: lag must be >= 1");
    cols.push_back(&panel.values(f.column));
    d.feature_names.push_back(f.name());
  }
  const Eigen::Index k = Eigen::Index(features.size());
  Eigen::MatrixXd buf(end - begin, k);
  Eigen::Index r = 0;
  for (Eigen::Index t = begin; t < end; ++t) {
    bool ok = true;
    for (Eigen::Index j = 0; j < k && ok; ++j) {
      const Eigen::Index src = t - features[std::size_t(j)].lag + 1;
      ok = src >= 0 && std::isfinite((*cols[std::size_t(j)])[src]);
      if (ok) buf(r, j) = (*cols[std::size_t(j)])[src];
    }
    if (!ok) continue;
    d.row_index.push_back(t);
    d.row_dates.push_back(panel.dates()[std::size_t(t)]);
    ++r;
  }
  d.rows = buf.topRows(r);
  return d;
}

Eigen::VectorXd restrict_to_labelled(DesignMatrix& d, const Eigen::VectorXd& labels) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < d.size(); ++r) {
    if (std::isfinite(labels[d.row_index[std::size_t(r)]])) keep.push_back(r);
  }
  DesignMatrix out;
  out.feature_names = d.feature_names;
  out.rows.resize(Eigen::Index(keep.size()), d.rows.cols());
  Eigen::VectorXd y(Eigen::Index(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.rows.row(Eigen::Index(i)) = d.rows.row(keep[i]);
    out.row_index.push_back(d.row_index[std::size_t(keep[i])]);
    out.row_dates.push_back(d.row_dates[std::size_t(keep[i])]);
    y[Eigen::Index(i)] = labels[out.row_index.back()];
  }
  d = std::move(out);
  return y;
}

}  // namespace exbt::ml
