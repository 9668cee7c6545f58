#include "ecovid/learners/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecovid/error.hpp"
#include "ecovid/rng.hpp"

namespace ecovid::learn {

std::vector<FeatureImportance> permutation_importance(const PredictFn& predict, const Matrix& X_test,
                                                      const Vector& y_test, const MetricFn& metric,
                                                      MetricDirection direction, std::uint64_t seed,
                                                      std::size_t repeats, const std::vector<std::string>& names) {
  if (repeats == 0) throw ParameterError("permutation_importance: repeats must be at least 1");
  if (X_test.rows() != y_test.size()) throw ShapeError("permutation_importance: X rows and target length differ");
  if (!names.empty() && names.size() != static_cast<std::size_t>(X_test.cols()))
    throw ShapeError("permutation_importance: one name per column required");

  const double sign = direction == MetricDirection::LowerIsBetter ? 1.0 : -1.0;
  const double baseline = metric(y_test, predict(X_test));
  const auto n = static_cast<std::size_t>(X_test.rows());

  std::vector<FeatureImportance> out;
  for (Eigen::Index j = 0; j < X_test.cols(); ++j) {
    std::vector<double> drops;
    Matrix Xp = X_test;
    for (std::size_t r = 0; r < repeats; ++r) {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j) * 1000003ULL + r));
      rng.shuffle(std::span<std::size_t>(perm));
      for (std::size_t i = 0; i < n; ++i) Xp(static_cast<Eigen::Index>(i), j) = X_test(static_cast<Eigen::Index>(perm[i]), j);
      drops.push_back(sign * (metric(y_test, predict(Xp)) - baseline));
    }
    FeatureImportance fi;
    fi.feature = static_cast<std::size_t>(j);
    fi.name = names.empty() ? "x" + std::to_string(j) : names[static_cast<std::size_t>(j)];
    double sum = 0;
    for (double d : drops) sum += d;
    fi.importance = sum / static_cast<double>(repeats);
    double ss = 0;
    for (double d : drops) ss += (d - fi.importance) * (d - fi.importance);
    fi.spread = std::sqrt(ss / static_cast<double>(repeats));
    out.push_back(std::move(fi));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.importance > b.importance; });
  return out;
}

}  // namespace ecovid::learn
