#include "exbt/ml/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "exbt/error.hpp"

namespace exbt::ml {

Eigen::VectorXd default_threshold_grid() {
  Eigen::VectorXd g(101);
  for (int i = 0; i <= 100; ++i) g[i] = double(i) / 100.0;
  return g;
}

ThresholdChoice threshold_search(const Eigen::VectorXd& probs, const Eigen::VectorXd& labels,
                                 const Eigen::VectorXd& grid) {
  if (grid.size() == 0) throw ConfigError("threshold_search: empty grid");
  if (probs.size() != labels.size()) throw DataError("threshold_search: length mismatch");
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i] >= grid[i - 1])) throw ConfigError("threshold_search: grid must be sorted");
  }
  const Eigen::Index n = probs.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index(0));
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return probs[a] < probs[b]; });

  // At threshold tau, rows with prob <= tau are predicted 0.
  Eigen::Index positives = 0;
  for (Eigen::Index i = 0; i < n; ++i) positives += labels[i] > 0.5;
  Eigen::Index correct = positives;  // tau below every prob: all predicted 1
  std::size_t cursor = 0;
  ThresholdChoice best{grid[0], -1.0};
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    while (cursor < idx.size() && probs[idx[cursor]] <= grid[g]) {
      correct += labels[idx[cursor]] > 0.5 ? -1 : 1;
      ++cursor;
    }
    const double acc = n == 0 ? 0.0 : double(correct) / double(n);
    if (acc > best.accuracy) best = {grid[g], acc};
  }
  return best;
}

double auc_roc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  if (scores.size() != labels.size()) throw DataError("auc_roc: length mismatch");
  const Eigen::Index n = scores.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index(0));
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  // Twice the tie-averaged rank keeps everything in integers.
  long double rank2_pos = 0;
  double n_pos = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const long double avg2 = (long double)(i + 1) + (long double)j;  // 2 * mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]] > 0.5) {
        rank2_pos += avg2;
        n_pos += 1;
      }
    }
    i = j;
  }
  const double n_neg = double(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc_roc: both classes must be present");
  const long double u2 = rank2_pos - (long double)n_pos * (n_pos + 1);
  return double(u2 / 2.0L / ((long double)n_pos * n_neg));
}

double accuracy(const Eigen::VectorXd& predicted, const Eigen::VectorXd& labels) {
  if (predicted.size() != labels.size()) throw DataError("accuracy: length mismatch");
  if (predicted.size() == 0) throw DataError("accuracy: empty input");
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < predicted.size(); ++i) hits += (predicted[i] > 0.5) == (labels[i] > 0.5);
  return double(hits) / double(predicted.size());
}

}  // namespace exbt::ml
