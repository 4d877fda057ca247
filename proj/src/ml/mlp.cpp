#include "exbt/ml/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "exbt/error.hpp"
#include "exbt/ml/lbfgs.hpp"
#include "exbt/ml/linear.hpp"

namespace exbt::ml {

namespace {

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& Z) {
  switch (a) {
    case Activation::identity: return Z;
    case Activation::logistic: return (1.0 + (-Z.array()).exp()).inverse().matrix();
    case Activation::tanh: return Z.array().tanh().matrix();
    case Activation::relu: return Z.cwiseMax(0.0);
  }
  return Z;
}

// Derivative expressed through the pre-activation Z and activation A.
Eigen::ArrayXXd activation_slope(Activation a, const Eigen::MatrixXd& Z, const Eigen::MatrixXd& A) {
  switch (a) {
    case Activation::identity: return Eigen::ArrayXXd::Ones(Z.rows(), Z.cols());
    case Activation::logistic: return A.array() * (1.0 - A.array());
    case Activation::tanh: return 1.0 - A.array().square();
    case Activation::relu: return (Z.array() > 0.0).cast<double>();
  }
  return Eigen::ArrayXXd::Ones(Z.rows(), Z.cols());
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::logistic: return "logistic";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
  }
  return "relu";
}

std::string_view to_string(Optimiser o) {
  switch (o) {
    case Optimiser::lbfgs: return "lbfgs";
    case Optimiser::sgd: return "sgd";
    case Optimiser::adam: return "adam";
  }
  return "adam";
}

Activation parse_activation(std::string_view s) {
  if (s == "identity" || s == "linear") return Activation::identity;
  if (s == "logistic" || s == "sigmoid") return Activation::logistic;
  if (s == "tanh") return Activation::tanh;
  if (s == "relu") return Activation::relu;
  throw ConfigError("unknown activation '" + std::string(s) + "'");
}

Optimiser parse_optimiser(std::string_view s) {
  if (s == "lbfgs" || s == "l-bfgs") return Optimiser::lbfgs;
  if (s == "sgd") return Optimiser::sgd;
  if (s == "adam") return Optimiser::adam;
  throw ConfigError("unknown optimiser '" + std::string(s) + "'");
}

Mlp::Mlp(Eigen::Index inputs, std::vector<int> hidden, Activation activation, Task task)
    : activation_(activation), task_(task) {
  Eigen::Index fan_in = inputs;
  hidden.push_back(1);
  for (int h : hidden) {
    if (h < 1) throw ConfigError("Mlp: layer sizes must be positive");
    weights_.push_back(Eigen::MatrixXd::Zero(fan_in, h));
    biases_.push_back(Eigen::VectorXd::Zero(h));
    fan_in = h;
  }
}

void Mlp::initialise(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    auto& W = weights_[l];
    const double limit = std::sqrt(6.0 / double(W.rows() + W.cols()));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = u(rng);
    }
    biases_[l].setZero();
  }
}

void Mlp::set_layers(std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases) {
  if (weights.empty() || weights.size() != biases.size()) throw DataError("Mlp: bad layer list");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (biases[l].size() != weights[l].cols()) throw DataError("Mlp: bias shape mismatch");
    if (l > 0 && weights[l].rows() != weights[l - 1].cols()) throw DataError("Mlp: layer shapes do not chain");
  }
  if (weights.back().cols() != 1) throw DataError("Mlp: output layer must have one unit");
  weights_ = std::move(weights);
  biases_ = std::move(biases);
}

Eigen::VectorXd Mlp::predict(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd A = X;
  for (std::size_t l = 0; l + 1 < weights_.size(); ++l) {
    A = activate(activation_, (A * weights_[l]).rowwise() + biases_[l].transpose());
  }
  Eigen::VectorXd z = (A * weights_.back()).col(0).array() + biases_.back()[0];
  return task_ == Task::classification ? sigmoid(z) : z;
}

Eigen::Index Mlp::parameter_count() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

Eigen::VectorXd Mlp::parameters() const {
  Eigen::VectorXd p(parameter_count());
  Eigen::Index o = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    p.segment(o, weights_[l].size()) = weights_[l].reshaped();
    o += weights_[l].size();
    p.segment(o, biases_[l].size()) = biases_[l];
    o += biases_[l].size();
  }
  return p;
}

void Mlp::set_parameters(const Eigen::VectorXd& p) {
  if (p.size() != parameter_count()) throw DataError("Mlp: parameter vector has wrong length");
  Eigen::Index o = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l].reshaped() = p.segment(o, weights_[l].size());
    o += weights_[l].size();
    biases_[l] = p.segment(o, biases_[l].size());
    o += biases_[l].size();
  }
}

double Mlp::objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& sample_weight, double l2, double n_total,
                      Eigen::VectorXd* grad) const {
  const std::size_t L = weights_.size();
  const double nb = double(X.rows());
  std::vector<Eigen::MatrixXd> Z(L - 1), A(L);
  A[0] = X;
  for (std::size_t l = 0; l + 1 < L; ++l) {
    Z[l] = (A[l] * weights_[l]).rowwise() + biases_[l].transpose();
    A[l + 1] = activate(activation_, Z[l]);
  }
  const Eigen::VectorXd z = (A[L - 1] * weights_.back()).col(0).array() + biases_.back()[0];

  double loss = 0.0;
  Eigen::VectorXd dz(z.size());
  if (task_ == Task::classification) {
    const Eigen::VectorXd p = sigmoid(z);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      loss += sample_weight[i] * (softplus(z[i]) - y[i] * z[i]);
    }
    dz = sample_weight.cwiseProduct(p - y) / nb;
  } else {
    const Eigen::VectorXd r = z - y;
    loss = 0.5 * sample_weight.dot(r.cwiseProduct(r));
    dz = sample_weight.cwiseProduct(r) / nb;
  }
  double penalty = 0.0;
  for (const auto& W : weights_) penalty += W.squaredNorm();
  const double reg = l2 / n_total;
  const double value = loss / nb + 0.5 * reg * penalty;
  if (!grad) return value;

  std::vector<Eigen::MatrixXd> gW(L);
  std::vector<Eigen::VectorXd> gb(L);
  Eigen::MatrixXd delta = dz;  // N x 1
  for (std::size_t l = L; l-- > 0;) {
    gW[l] = A[l].transpose() * delta + reg * weights_[l];
    gb[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd dA = delta * weights_[l].transpose();
    delta = (dA.array() * activation_slope(activation_, Z[l - 1], A[l])).matrix();
  }
  grad->resize(parameter_count());
  Eigen::Index o = 0;
  for (std::size_t l = 0; l < L; ++l) {
    grad->segment(o, gW[l].size()) = gW[l].reshaped();
    o += gW[l].size();
    grad->segment(o, gb[l].size()) = gb[l];
    o += gb[l].size();
  }
  return value;
}

Mlp mlp_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const MlpConfig& config, Task task,
            const targets::ClassWeights& weights) {
  const Eigen::Index n = X.rows();
  if (n == 0 || y.size() != n) throw DataError("mlp_fit: X and y must be non-empty and aligned");
  if (config.layer_sizes.empty() || config.layer_sizes.size() > 4) {
    throw ConfigError("mlp_fit: between 1 and 4 hidden layers required");
  }
  if (config.epochs < 1 || config.batch_size < 1) throw ConfigError("mlp_fit: epochs and batch size must be positive");

  Eigen::VectorXd sw = Eigen::VectorXd::Ones(n);
  if (task == Task::classification) {
    double pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      sw[i] = weights(y[i]);
      pos += y[i] > 0.5;
    }
    if (pos == 0 || pos == double(n)) throw DataError("mlp_fit: both classes must be present");
  }

  Mlp net(X.cols(), config.layer_sizes, config.activation, task);
  net.initialise(config.seed);
  const double n_total = double(n);
  auto fail = [](int epoch) {
    throw NumericalError("mlp_fit: non-finite loss at epoch " + std::to_string(epoch));
  };

  if (config.optimiser == Optimiser::lbfgs) {
    Mlp work = net;
    int evaluations = 0;
    auto f = [&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
      work.set_parameters(p);
      ++evaluations;
      return work.objective(X, y, sw, config.l2, n_total, &g);
    };
    LbfgsResult r = lbfgs_minimize(f, net.parameters(), {config.epochs, 0.0, 10, std::numeric_limits<int>::max()});
    if (!std::isfinite(r.value) || !r.x.allFinite()) fail(r.iterations + 1);
    net.set_parameters(r.x);
    return net;
  }

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  Eigen::VectorXd theta = net.parameters();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd g;
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8, momentum = 0.9;
  long step = 0;
  const Eigen::Index bs = std::min<Eigen::Index>(config.batch_size, n);
  Eigen::MatrixXd Xb;
  Eigen::VectorXd yb, wb;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += bs) {
      const Eigen::Index len = std::min(bs, n - start);
      Xb.resize(len, X.cols());
      yb.resize(len);
      wb.resize(len);
      for (Eigen::Index r = 0; r < len; ++r) {
        const Eigen::Index src = order[std::size_t(start + r)];
        Xb.row(r) = X.row(src);
        yb[r] = y[src];
        wb[r] = sw[src];
      }
      net.set_parameters(theta);
      const double value = net.objective(Xb, yb, wb, config.l2, n_total, &g);
      if (!std::isfinite(value) || !g.allFinite()) fail(epoch);
      ++step;
      if (config.optimiser == Optimiser::adam) {
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(beta1, double(step));
        const double c2 = 1.0 - std::pow(beta2, double(step));
        theta.array() -= config.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
      } else {
        m = momentum * m - config.learning_rate * g;
        theta += m;
      }
    }
  }
  net.set_parameters(theta);
  if (!theta.allFinite()) fail(config.epochs);
  return net;
}

}  // namespace exbt::ml
