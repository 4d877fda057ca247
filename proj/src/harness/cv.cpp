#include "exbt/harness/cv.hpp"

#include <string>

#include "exbt/error.hpp"

namespace exbt::harness {

CvPlan make_cv_splits(Eigen::Index n_days, int k) {
  if (k < 1) throw ConfigError("cv: k must be at least 1");
  const Eigen::Index blocks = k + 1;
  if (n_days < 2 * blocks) {
    throw DataError("cv: " + std::to_string(n_days) + " days is too few for " + std::to_string(k) + " folds");
  }
  CvPlan plan;
  plan.k = k;
  const Eigen::Index base = n_days / blocks, extra = n_days % blocks;
  plan.block_boundaries.push_back(0);
  for (Eigen::Index b = 0; b < blocks; ++b) {
    plan.block_boundaries.push_back(plan.block_boundaries.back() + base + (b < extra ? 1 : 0));
  }
  for (int i = 1; i <= k; ++i) {
    plan.splits.push_back({{0, plan.block_boundaries[std::size_t(i)]},
                           {plan.block_boundaries[std::size_t(i)], plan.block_boundaries[std::size_t(i) + 1]}});
  }
  return plan;
}

}  // namespace exbt::harness
