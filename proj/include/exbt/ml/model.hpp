#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "exbt/ml/linear.hpp"
#include "exbt/ml/mlp.hpp"
#include "exbt/ml/scaling.hpp"
#include "exbt/targets/targets.hpp"

namespace exbt::ml {

enum class Family { ridge, logistic, mlp };

std::string_view to_string(Family f);
Family parse_family(std::string_view s);

/// Hyperparameters of one candidate. validate() enforces the search ranges:
/// ridge lambda [0.001, 100], logistic lambda [0.0005, 1000], MLP 1-4 layers
/// of 10-200 units, l2 [1e-4, 0.1], learning rate [1e-3, 0.1], epochs
/// [10, 1000], batch size in {16, 32, 64, 128}.
struct ModelConfig {
  Family family = Family::logistic;
  double ridge_lambda = 1.0;
  std::string ridge_solver = "cholesky";
  double logistic_lambda = 1.0;
  std::string logistic_solver = "lbfgs";
  MlpConfig mlp;
  Scaling scaling = Scaling::standardise;
  std::uint64_t seed = 0;

  void validate() const;
  /// Flat `key = value` lines, the same keys the experiment config accepts
  /// in its [model] section.
  std::string to_text() const;
};

struct Prediction {
  enum class Kind { point, probability };
  Kind kind = Kind::point;
  Eigen::VectorXd values;
};

struct ParameterBlock {
  std::string name;
  Eigen::MatrixXd data;
};

/// A trained, immutable predictor.
class FittedModel {
 public:
  virtual ~FittedModel() = default;
  virtual Prediction predict(const Eigen::MatrixXd& X) const = 0;
  virtual std::string family() const = 0;
  virtual std::vector<ParameterBlock> parameters() const = 0;
};

/// Anything that can be trained on a design matrix. External learners
/// (gradient boosting, sequence models) plug into the harness through this.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::unique_ptr<FittedModel> fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                           Task task, const targets::ClassWeights& weights) const = 0;
};

/// Learner for a built-in family, with the configured feature scaling
/// fitted inside fit() on the rows it is given.
std::unique_ptr<Learner> make_learner(const ModelConfig& config);

/// Rebuilds a fitted built-in model from its serialised blocks.
std::unique_ptr<FittedModel> restore_model(std::string_view family,
                                           const std::vector<ParameterBlock>& blocks);

}  // namespace exbt::ml
