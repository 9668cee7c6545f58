#include "ecovid/learners/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecovid/error.hpp"
#include "ecovid/rng.hpp"

namespace ecovid::learn {

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0;
  std::size_t left_count = 0;
  double score = 0;  // S_L^2 / n_L + S_R^2 / n_R
};

struct PendingNode {
  int node;
  std::vector<std::size_t> samples;
  std::size_t depth;
};

double mean_of(const Vector& y, const std::vector<std::size_t>& samples) {
  double s = 0;
  for (auto i : samples) s += y(static_cast<Eigen::Index>(i));
  return s / static_cast<double>(samples.size());
}

bool is_pure(const Vector& y, const std::vector<std::size_t>& samples) {
  const double first = y(static_cast<Eigen::Index>(samples.front()));
  return std::all_of(samples.begin(), samples.end(),
                     [&](std::size_t i) { return y(static_cast<Eigen::Index>(i)) == first; });
}

SplitChoice best_split(const Matrix& X, const Vector& y, const std::vector<std::size_t>& samples,
                       const std::vector<std::size_t>& features, std::size_t min_leaf) {
  const std::size_t n = samples.size();
  double total = 0;
  for (auto i : samples) total += y(static_cast<Eigen::Index>(i));
  const double parent_score = total * total / static_cast<double>(n);

  SplitChoice best;
  best.score = parent_score;
  std::vector<std::size_t> order(samples);
  for (auto f : features) {
    const auto col = static_cast<Eigen::Index>(f);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return X(static_cast<Eigen::Index>(a), col) < X(static_cast<Eigen::Index>(b), col);
    });
    double left_sum = 0;
    for (std::size_t p = 1; p < n; ++p) {
      left_sum += y(static_cast<Eigen::Index>(order[p - 1]));
      const double lo = X(static_cast<Eigen::Index>(order[p - 1]), col);
      const double hi = X(static_cast<Eigen::Index>(order[p]), col);
      if (p < min_leaf || n - p < min_leaf || !(lo < hi)) continue;
      const double right_sum = total - left_sum;
      const double score = left_sum * left_sum / static_cast<double>(p) +
                           right_sum * right_sum / static_cast<double>(n - p);
      if (score > best.score * (1 + 1e-12) + 1e-12) {
        double thr = 0.5 * (lo + hi);
        if (!(thr < hi)) thr = lo;
        best = {static_cast<int>(f), thr, p, score};
      }
    }
  }
  return best;
}

}  // namespace

std::size_t RegressionTree::leaf(const Eigen::Ref<const Vector>& row) const {
  std::size_t k = 0;
  while (nodes[k].feature >= 0) {
    const auto& node = nodes[k];
    k = static_cast<std::size_t>(row(node.feature) <= node.threshold ? node.left : node.right);
  }
  return k;
}

RegressionTree fit_tree(const Matrix& X, const Vector& y, const std::vector<std::size_t>& samples,
                        const TreeParams& params, std::uint64_t rng_seed) {
  if (samples.empty()) throw EmptyCorpusError("cannot grow a tree on an empty sample");
  const auto d = static_cast<std::size_t>(X.cols());
  const std::size_t mtry = params.mtry == 0 ? d : std::min(params.mtry, d);
  const std::size_t min_leaf = std::max<std::size_t>(1, params.min_leaf);
  Rng rng(rng_seed);

  std::vector<std::size_t> all_features(d);
  std::iota(all_features.begin(), all_features.end(), 0);

  RegressionTree tree;
  tree.nodes.push_back({});
  std::vector<PendingNode> stack;
  stack.push_back({0, samples, 0});
  while (!stack.empty()) {
    auto job = std::move(stack.back());
    stack.pop_back();
    auto& node = tree.nodes[static_cast<std::size_t>(job.node)];
    node.samples = job.samples.size();
    node.value = mean_of(y, job.samples);

    const bool depth_done = params.max_depth > 0 && job.depth >= params.max_depth;
    if (depth_done || job.samples.size() < 2 * min_leaf || is_pure(y, job.samples)) continue;

    std::vector<std::size_t> features;
    if (mtry == d) {
      features = all_features;
    } else {
      auto pool = all_features;
      for (std::size_t k = 0; k < mtry; ++k) {
        const auto pick = k + static_cast<std::size_t>(rng.uniform_index(d - k));
        std::swap(pool[k], pool[pick]);
      }
      features.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(mtry));
    }

    const auto split = best_split(X, y, job.samples, features, min_leaf);
    if (split.feature < 0) continue;

    std::vector<std::size_t> left, right;
    for (auto i : job.samples) {
      (X(static_cast<Eigen::Index>(i), split.feature) <= split.threshold ? left : right).push_back(i);
    }
    const int left_id = static_cast<int>(tree.nodes.size());
    const int right_id = left_id + 1;
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left_id;
    node.right = right_id;
    tree.nodes.push_back({});
    tree.nodes.push_back({});
    // Right first so the left subtree is expanded first.
    stack.push_back({right_id, std::move(right), job.depth + 1});
    stack.push_back({left_id, std::move(left), job.depth + 1});
  }
  return tree;
}

ForestModel forest_fit(const Matrix& X, const Vector& y, const ForestParams& params) {
  if (X.rows() == 0) throw EmptyCorpusError("forest_fit: empty training set");
  if (X.rows() != y.size()) throw ShapeError("forest_fit: X rows and target length differ");
  if (params.n_trees == 0) throw ParameterError("forest needs at least one tree");
  const auto d = static_cast<std::size_t>(X.cols());
  if (d == 0) throw ParameterError("forest needs at least one feature");

  ForestModel model;
  model.params = params;
  model.n_features = d;
  if (model.params.mtry == 0) model.params.mtry = (d + 2) / 3;
  if (model.params.mtry > d) throw ParameterError("forest mtry exceeds the feature count");
  model.trees.resize(params.n_trees);

  const auto n = static_cast<std::size_t>(X.rows());
  const TreeParams tp{model.params.mtry, params.max_depth, params.min_leaf};
  auto grow = [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, 2 * t));
    std::vector<std::size_t> sample(n);
    if (params.bootstrap) {
      for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_index(n));
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    model.trees[t] = fit_tree(X, y, sample, tp, derive_seed(params.seed, 2 * t + 1));
  };

  if (params.parallel) {
    const auto count = static_cast<std::ptrdiff_t>(params.n_trees);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < count; ++t) grow(static_cast<std::size_t>(t));
  } else {
    for (std::size_t t = 0; t < params.n_trees; ++t) grow(t);
  }
  return model;
}

Vector forest_predict(const ForestModel& model, const Matrix& X) {
  if (static_cast<std::size_t>(X.cols()) != model.n_features) throw ShapeError("forest: feature count differs from fit");
  Vector out(X.rows());
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    double s = 0;
    for (const auto& tree : model.trees) s += tree.predict(X.row(r).transpose());
    out(r) = s / static_cast<double>(model.trees.size());
  }
  return out;
}

}  // namespace ecovid::learn
