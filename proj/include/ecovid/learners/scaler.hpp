#pragma once

#include "ecovid/learners/common.hpp"

namespace ecovid::learn {

struct ScalerParams {
  Vector means;
  Vector stds;  // population standard deviation
};

/// Column means and population standard deviations. Requires n >= 1.
ScalerParams scaler_fit(const Matrix& X);

/// (x - mean) / std per column; zero-variance columns map to 0.
/// Throws ShapeError when the column count differs from the fit.
Matrix scaler_transform(const ScalerParams& params, const Matrix& X);

}  // namespace ecovid::learn
