#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace exbt::ml {

enum class Scaling { none, standardise, minmax };

std::string_view to_string(Scaling s);
Scaling parse_scaling(std::string_view s);

/// Column-wise affine scaler: x' = (x - shift) / scale. Fitted on training
/// rows only; zero-spread columns get scale 1.
class Scaler {
 public:
  Scaler() = default;
  explicit Scaler(Scaling kind) : kind_(kind) {}
  /// Already-fitted scaler, e.g. read back from a model file.
  Scaler(Scaling kind, Eigen::RowVectorXd shift, Eigen::RowVectorXd scale)
      : kind_(kind), shift_(std::move(shift)), scale_(std::move(scale)) {}

  void fit(const Eigen::MatrixXd& train);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;

  Scaling kind() const { return kind_; }
  const Eigen::RowVectorXd& shift() const { return shift_; }
  const Eigen::RowVectorXd& scale() const { return scale_; }

 private:
  Scaling kind_ = Scaling::none;
  Eigen::RowVectorXd shift_;
  Eigen::RowVectorXd scale_;
};

}  // namespace exbt::ml
