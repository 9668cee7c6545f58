#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ecovid/learners/common.hpp"

namespace ecovid::learn {

using PredictFn = std::function<Vector(const Matrix&)>;
using MetricFn = std::function<double(const Vector& truth, const Vector& predicted)>;

enum class MetricDirection { LowerIsBetter, HigherIsBetter };

struct FeatureImportance {
  std::size_t feature = 0;
  std::string name;
  double importance = 0;  // mean degradation over repeats
  double spread = 0;      // population std of the degradation over repeats
};

/// Mean metric degradation when each column is shuffled, ranked descending
/// (ties by column index). Throws ParameterError when repeats == 0.
std::vector<FeatureImportance> permutation_importance(const PredictFn& predict, const Matrix& X_test,
                                                      const Vector& y_test, const MetricFn& metric,
                                                      MetricDirection direction, std::uint64_t seed,
                                                      std::size_t repeats,
                                                      const std::vector<std::string>& names = {});

}  // namespace ecovid::learn
