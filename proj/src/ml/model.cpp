#include "exbt/ml/model.hpp"

#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "exbt/data/csv.hpp"
#include "exbt/error.hpp"

namespace exbt::ml {

namespace {

void notice_alias(std::string_view family, std::string_view tag, std::string_view actual) {
  static std::mutex mu;
  static std::set<std::string> seen;
  std::lock_guard lock(mu);
  std::string key = std::string(family) + "/" + std::string(tag);
  if (seen.insert(key).second && tag != actual) {
    std::clog << "note: " << family << " solver '" << tag << "' runs as '" << actual << "'\n";
  }
}

Eigen::MatrixXd scalar_block(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

std::vector<ParameterBlock> scaler_blocks(const Scaler& s) {
  Eigen::MatrixXd m(2, s.shift().size());
  if (s.shift().size() > 0) {
    m.row(0) = s.shift();
    m.row(1) = s.scale();
  }
  return {{"scaler_kind", scalar_block(double(int(s.kind())))}, {"scaler", m}};
}

const Eigen::MatrixXd& find_block(const std::vector<ParameterBlock>& blocks, std::string_view name) {
  for (const auto& b : blocks) {
    if (b.name == name) return b.data;
  }
  throw DataError("model file lacks block '" + std::string(name) + "'");
}

Scaler restore_scaler(const std::vector<ParameterBlock>& blocks) {
  const auto kind = Scaling(int(find_block(blocks, "scaler_kind")(0, 0)));
  const Eigen::MatrixXd& m = find_block(blocks, "scaler");
  if (m.rows() != 2) return Scaler(kind, Eigen::RowVectorXd(), Eigen::RowVectorXd());
  return Scaler(kind, m.row(0), m.row(1));
}

class LinearPredictor final : public FittedModel {
 public:
  LinearPredictor(Family family, Scaler scaler, LinearModel model)
      : family_(family), scaler_(std::move(scaler)), model_(std::move(model)) {}

  Prediction predict(const Eigen::MatrixXd& X) const override {
    Eigen::VectorXd z = model_.decision(scaler_.transform(X));
    if (family_ == Family::logistic) return {Prediction::Kind::probability, sigmoid(z)};
    return {Prediction::Kind::point, std::move(z)};
  }
  std::string family() const override { return std::string(to_string(family_)); }
  std::vector<ParameterBlock> parameters() const override {
    auto out = scaler_blocks(scaler_);
    out.push_back({"coef", model_.coef});
    out.push_back({"intercept", scalar_block(model_.intercept)});
    return out;
  }

 private:
  Family family_;
  Scaler scaler_;
  LinearModel model_;
};

class MlpPredictor final : public FittedModel {
 public:
  MlpPredictor(Scaler scaler, Mlp net) : scaler_(std::move(scaler)), net_(std::move(net)) {}

  Prediction predict(const Eigen::MatrixXd& X) const override {
    const auto kind =
        net_.task() == Task::classification ? Prediction::Kind::probability : Prediction::Kind::point;
    return {kind, net_.predict(scaler_.transform(X))};
  }
  std::string family() const override { return "mlp"; }
  std::vector<ParameterBlock> parameters() const override {
    auto out = scaler_blocks(scaler_);
    Eigen::MatrixXd meta(1, 3);
    meta << double(int(net_.activation())), double(int(net_.task())), double(net_.weights().size());
    out.push_back({"meta", meta});
    for (std::size_t l = 0; l < net_.weights().size(); ++l) {
      out.push_back({"W" + std::to_string(l), net_.weights()[l]});
      out.push_back({"b" + std::to_string(l), net_.biases()[l]});
    }
    return out;
  }

 private:
  Scaler scaler_;
  Mlp net_;
};

class BuiltinLearner final : public Learner {
 public:
  explicit BuiltinLearner(ModelConfig c) : config_(std::move(c)) {}

  std::unique_ptr<FittedModel> fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Task task,
                                   const targets::ClassWeights& weights) const override {
    Scaler scaler(config_.scaling);
    scaler.fit(X);
    const Eigen::MatrixXd Xs = scaler.transform(X);
    switch (config_.family) {
      case Family::ridge: {
        if (task != Task::regression) throw ConfigError("ridge serves regression targets only");
        // Ridge stays unweighted.
        auto m = ridge_fit(Xs, y, config_.ridge_lambda, ridge_solver_for(config_.ridge_solver));
        return std::make_unique<LinearPredictor>(Family::ridge, std::move(scaler), std::move(m));
      }
      case Family::logistic: {
        if (task != Task::classification) throw ConfigError("logistic serves classification targets only");
        auto f = logistic_fit(Xs, y, config_.logistic_lambda, weights,
                              logistic_solver_for(config_.logistic_solver));
        return std::make_unique<LinearPredictor>(Family::logistic, std::move(scaler), std::move(f.model));
      }
      case Family::mlp: {
        auto cfg = config_.mlp;
        cfg.seed = config_.seed;
        return std::make_unique<MlpPredictor>(std::move(scaler), mlp_fit(Xs, y, cfg, task, weights));
      }
    }
    throw ConfigError("unknown model family");
  }

 private:
  ModelConfig config_;
};

void check_range(const char* what, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << what << " = " << v << " outside [" << lo << ", " << hi << "]";
    throw ConfigError(os.str());
  }
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::ridge: return "ridge";
    case Family::logistic: return "logistic";
    case Family::mlp: return "mlp";
  }
  return "logistic";
}

Family parse_family(std::string_view s) {
  if (s == "ridge") return Family::ridge;
  if (s == "logistic" || s == "logit") return Family::logistic;
  if (s == "mlp") return Family::mlp;
  throw ConfigError("unknown model family '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  switch (family) {
    case Family::ridge:
      check_range("ridge lambda", ridge_lambda, 0.001, 100.0);
      notice_alias("ridge", ridge_solver, ridge_solver_for(ridge_solver) == RidgeSolver::direct ? "cholesky" : "sparse_cg");
      break;
    case Family::logistic:
      check_range("logistic lambda", logistic_lambda, 0.0005, 1000.0);
      notice_alias("logistic", logistic_solver,
                   logistic_solver_for(logistic_solver) == LogisticSolver::newton ? "newton-cholesky" : "lbfgs");
      break;
    case Family::mlp:
      if (mlp.layer_sizes.empty() || mlp.layer_sizes.size() > 4) {
        throw ConfigError("mlp: between 1 and 4 layers required");
      }
      for (int s : mlp.layer_sizes) check_range("mlp layer size", s, 10, 200);
      check_range("mlp l2", mlp.l2, 1e-4, 0.1);
      check_range("mlp learning_rate", mlp.learning_rate, 1e-3, 0.1);
      check_range("mlp epochs", mlp.epochs, 10, 1000);
      if (mlp.batch_size != 16 && mlp.batch_size != 32 && mlp.batch_size != 64 && mlp.batch_size != 128) {
        throw ConfigError("mlp batch_size must be one of 16, 32, 64, 128");
      }
      break;
  }
}

std::string ModelConfig::to_text() const {
  std::ostringstream os;
  os << "family = \"" << to_string(family) << "\"\n";
  os << "scaling = \"" << to_string(scaling) << "\"\n";
  os << "seed = " << seed << "\n";
  switch (family) {
    case Family::ridge:
      os << "lambda = " << data::format_double(ridge_lambda) << "\n";
      os << "solver = \"" << ridge_solver << "\"\n";
      break;
    case Family::logistic:
      os << "lambda = " << data::format_double(logistic_lambda) << "\n";
      os << "solver = \"" << logistic_solver << "\"\n";
      break;
    case Family::mlp:
      os << "layer_sizes = [";
      for (std::size_t i = 0; i < mlp.layer_sizes.size(); ++i) os << (i ? ", " : "") << mlp.layer_sizes[i];
      os << "]\n";
      os << "activation = \"" << to_string(mlp.activation) << "\"\n";
      os << "optimiser = \"" << to_string(mlp.optimiser) << "\"\n";
      os << "l2 = " << data::format_double(mlp.l2) << "\n";
      os << "learning_rate = " << data::format_double(mlp.learning_rate) << "\n";
      os << "epochs = " << mlp.epochs << "\n";
      os << "batch_size = " << mlp.batch_size << "\n";
      break;
  }
  return os.str();
}

std::unique_ptr<Learner> make_learner(const ModelConfig& config) {
  return std::make_unique<BuiltinLearner>(config);
}

std::unique_ptr<FittedModel> restore_model(std::string_view family,
                                           const std::vector<ParameterBlock>& blocks) {
  Scaler scaler = restore_scaler(blocks);
  const Family f = parse_family(family);
  if (f == Family::ridge || f == Family::logistic) {
    LinearModel m;
    m.coef = find_block(blocks, "coef").col(0);
    m.intercept = find_block(blocks, "intercept")(0, 0);
    return std::make_unique<LinearPredictor>(f, std::move(scaler), std::move(m));
  }
  const Eigen::MatrixXd& meta = find_block(blocks, "meta");
  const auto layers = std::size_t(meta(0, 2));
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;
  for (std::size_t l = 0; l < layers; ++l) {
    W.push_back(find_block(blocks, "W" + std::to_string(l)));
    b.push_back(find_block(blocks, "b" + std::to_string(l)).col(0));
  }
  std::vector<int> hidden;
  for (std::size_t l = 0; l + 1 < layers; ++l) hidden.push_back(int(W[l].cols()));
  Mlp net(W.front().rows(), hidden, Activation(int(meta(0, 0))), Task(int(meta(0, 1))));
  net.set_layers(std::move(W), std::move(b));
  return std::make_unique<MlpPredictor>(std::move(scaler), std::move(net));
}

}  // namespace exbt::ml
