#pragma once

#include <span>
#include <vector>

#include "ecovid/learners/common.hpp"

namespace ecovid::learn {

struct RidgeModel {
  Vector weights;
  double intercept = 0;
  double alpha = 1.0;
};

/// Ridge regression on centered data: solves (Xc'Xc + alpha I) w = Xc' tc
/// and sets intercept = mean(t) - mean(X) w.
/// alpha == 0 with a singular Gram matrix throws SingularError.
RidgeModel ridge_fit_targets(const Matrix& X, const Vector& targets, double alpha);

/// Ridge classifier: labels in {0,1} are regressed as {-1,+1}.
RidgeModel ridge_fit(const Matrix& X, std::span<const int> labels, double alpha);

Vector ridge_decision(const RidgeModel& model, const Matrix& X);

/// 1 iff the decision value is strictly positive.
std::vector<int> ridge_predict(const RidgeModel& model, const Matrix& X);

}  // namespace ecovid::learn
