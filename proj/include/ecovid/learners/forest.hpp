#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ecovid/learners/common.hpp"

namespace ecovid::learn {

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0;  // go left when x[feature] <= threshold
  double value = 0;      // mean target of the node's samples
  int left = -1;
  int right = -1;
  std::size_t samples = 0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  /// Index of the leaf reached by `row`.
  std::size_t leaf(const Eigen::Ref<const Vector>& row) const;
  double predict(const Eigen::Ref<const Vector>& row) const { return nodes[leaf(row)].value; }
};

struct TreeParams {
  std::size_t mtry = 0;       // features tried per split; 0 means all
  std::size_t max_depth = 0;  // 0 means unlimited
  std::size_t min_leaf = 1;
};

/// CART regression tree on the given (possibly repeated) sample indices.
/// Splits maximize variance reduction; with mtry == n_features every feature
/// is scanned in index order, otherwise mtry features are drawn without
/// replacement from `rng_seed`.
RegressionTree fit_tree(const Matrix& X, const Vector& y, const std::vector<std::size_t>& samples,
                        const TreeParams& params, std::uint64_t rng_seed);

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t mtry = 0;  // 0 means ceil(d / 3)
  std::uint64_t seed = 0;
  std::size_t max_depth = 0;
  std::size_t min_leaf = 1;
  bool bootstrap = true;  // false: every tree sees the identity sample
  bool parallel = true;   // OpenMP over trees; output is identical either way
};

struct ForestModel {
  std::vector<RegressionTree> trees;
  ForestParams params;  // mtry resolved
  std::size_t n_features = 0;
};

/// Per-tree seeds are derived from (seed, tree index), so training order
/// does not affect the result. Throws EmptyCorpusError on empty input.
ForestModel forest_fit(const Matrix& X, const Vector& y, const ForestParams& params);
Vector forest_predict(const ForestModel& model, const Matrix& X);

}  // namespace ecovid::learn
