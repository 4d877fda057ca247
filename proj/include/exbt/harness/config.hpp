#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exbt/granger/granger.hpp"
#include "exbt/ml/model.hpp"
#include "exbt/targets/targets.hpp"

namespace exbt::harness {

enum class FeatureSet { all, without_nlp };

std::string_view to_string(FeatureSet f);
FeatureSet parse_feature_set(std::string_view s);

struct DataSpec {
  std::filesystem::path panel;
  std::string price_column = "price";
  std::optional<std::filesystem::path> exclusions;
  FeatureSet feature_set = FeatureSet::all;
  std::vector<std::string> drop;
};

struct TargetSpec {
  targets::TargetKind kind = targets::TargetKind::binary_updown;
  int window = 7;
};

struct PreprocessSpec {
  double alpha = 0.05;
  int max_diff = 2;
  /// Columns with fewer observed training values are left out of a fold.
  int min_observations = 50;
};

struct SelectionSpec {
  granger::Mode mode = granger::Mode::per_lag;
  double alpha = 0.05;
  int max_lag = granger::kDefaultMaxLag;
  int own_lags = granger::kDefaultOwnLags;
};

template <typename T>
struct Range {
  T lo{};
  T hi{};
};

/// Random-search ranges. Scale parameters (lambdas, l2, learning rate) are
/// drawn log-uniformly, integers uniformly on [lo, hi], menus uniformly.
struct SearchSpace {
  Range<double> ridge_lambda{0.001, 100.0};
  std::vector<std::string> ridge_solvers{"svd", "cholesky", "lsqr", "sparse_cg", "sag", "saga"};
  Range<double> logistic_lambda{0.0005, 1000.0};
  std::vector<std::string> logistic_solvers{"lbfgs", "liblinear", "newton-cg", "newton-cholesky", "sag", "saga"};
  Range<int> layers{1, 4};
  Range<int> layer_size{10, 200};
  std::vector<ml::Activation> activations{ml::Activation::identity, ml::Activation::logistic,
                                          ml::Activation::tanh, ml::Activation::relu};
  std::vector<ml::Optimiser> optimisers{ml::Optimiser::lbfgs, ml::Optimiser::sgd, ml::Optimiser::adam};
  Range<double> l2{1e-4, 0.1};
  Range<double> learning_rate{1e-3, 0.1};
  Range<int> epochs{10, 1000};
  std::vector<int> batch_sizes{16, 32, 64, 128};
  /// Empty means: all three for the MLP, the [model] scaling otherwise.
  std::vector<ml::Scaling> scalings;
  int iterations = 200;
  std::optional<double> time_budget_seconds;

  /// Throws ConfigError when a range leaves the admissible bounds.
  void validate() const;
};

struct ExperimentSpec {
  DataSpec data;
  TargetSpec target;
  PreprocessSpec preprocess;
  SelectionSpec selection;
  ml::ModelConfig model;
  SearchSpace search;
  int folds = 7;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool audit = false;
  double cost = 0.0;

  void validate() const;
};

/// Parses a TOML experiment file. Relative data paths resolve against
/// `base_dir`. Unknown sections or keys are rejected.
ExperimentSpec parse_experiment(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Reads the keys of a [model] table given as TOML text (the format
/// produced by ModelConfig::to_text).
ml::ModelConfig parse_model_config(std::string_view text);

}  // namespace exbt::harness
