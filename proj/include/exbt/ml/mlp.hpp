#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>
#include <vector>

#include "exbt/targets/targets.hpp"

namespace exbt::ml {

enum class Activation { identity, logistic, tanh, relu };
enum class Optimiser { lbfgs, sgd, adam };
enum class Task { regression, classification };

std::string_view to_string(Activation a);
std::string_view to_string(Optimiser o);
Activation parse_activation(std::string_view s);
Optimiser parse_optimiser(std::string_view s);

struct MlpConfig {
  std::vector<int> layer_sizes{100};
  Activation activation = Activation::relu;
  Optimiser optimiser = Optimiser::adam;
  double l2 = 1e-4;
  double learning_rate = 1e-3;
  int epochs = 200;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

/// Fully connected network: hidden layers with a shared activation, one
/// output unit (linear for regression, sigmoid for classification).
///
/// Objective on a batch B out of N training rows:
///   J = (1/|B|) sum_i w_i loss_i + l2 / (2N) sum_l ||W_l||_F^2
/// with loss = (z - y)^2 / 2 for regression and the cross-entropy of
/// sigmoid(z) for classification. Biases are not penalised.
class Mlp {
 public:
  Mlp() = default;
  Mlp(Eigen::Index inputs, std::vector<int> hidden, Activation activation, Task task);

  /// Glorot-uniform weights, zero biases.
  void initialise(std::uint64_t seed);

  /// Linear output for regression, probability for classification.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

  /// Flattened as W_0, b_0, W_1, b_1, ..., W_out, b_out (column-major).
  Eigen::Index parameter_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& p);

  double objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& sample_weight, double l2, double n_total,
                   Eigen::VectorXd* grad) const;

  Activation activation() const { return activation_; }
  Task task() const { return task_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  /// Replace all layers; shapes must chain (fan_out of l = fan_in of l+1, last fan_out = 1).
  void set_layers(std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases);

 private:
  Activation activation_ = Activation::relu;
  Task task_ = Task::regression;
  std::vector<Eigen::MatrixXd> weights_;  // fan_in x fan_out
  std::vector<Eigen::VectorXd> biases_;
};

/// Trains for exactly `epochs` epochs (L-BFGS: iterations), no early stopping.
/// Deterministic for a fixed config seed. Throws NumericalError naming the
/// epoch when the loss becomes non-finite.
Mlp mlp_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const MlpConfig& config, Task task,
            const targets::ClassWeights& weights = {});

}  // namespace exbt::ml
