#include "exbt/ml/scaling.hpp"

#include <cmath>
#include <string>

#include "exbt/error.hpp"

namespace exbt::ml {

std::string_view to_string(Scaling s) {
  switch (s) {
    case Scaling::none: return "none";
    case Scaling::standardise: return "standardise";
    case Scaling::minmax: return "minmax";
  }
  return "none";
}

Scaling parse_scaling(std::string_view s) {
  if (s == "none") return Scaling::none;
  if (s == "standardise" || s == "standardize") return Scaling::standardise;
  if (s == "minmax" || s == "min-max") return Scaling::minmax;
  throw ConfigError("unknown scaling '" + std::string(s) + "'");
}

void Scaler::fit(const Eigen::MatrixXd& train) {
  const Eigen::Index k = train.cols();
  shift_ = Eigen::RowVectorXd::Zero(k);
  scale_ = Eigen::RowVectorXd::Ones(k);
  if (kind_ == Scaling::none || train.rows() == 0) return;
  if (kind_ == Scaling::standardise) {
    shift_ = train.colwise().mean();
    const double n = double(train.rows());
    scale_ = ((train.rowwise() - shift_).array().square().colwise().sum() / n).sqrt();
  } else {
    shift_ = train.colwise().minCoeff();
    scale_ = train.colwise().maxCoeff() - shift_;
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(scale_[j] > 0.0) || !std::isfinite(scale_[j])) scale_[j] = 1.0;
  }
}

Eigen::MatrixXd Scaler::transform(const Eigen::MatrixXd& X) const {
  if (kind_ == Scaling::none) return X;
  if (X.cols() != shift_.size()) throw DataError("Scaler: column count differs from fit");
  return (X.rowwise() - shift_).array().rowwise() / scale_.array();
}

}  // namespace exbt::ml
