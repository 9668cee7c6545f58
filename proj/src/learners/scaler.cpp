#include "ecovid/learners/scaler.hpp"

#include "ecovid/error.hpp"

namespace ecovid::learn {

ScalerParams scaler_fit(const Matrix& X) {
  if (X.rows() < 1) throw ParameterError("scaler_fit needs at least one row");
  ScalerParams p;
  const double n = static_cast<double>(X.rows());
  p.means = X.colwise().sum().transpose() / n;
  p.stds.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double ss = (X.col(j).array() - p.means(j)).square().sum();
    p.stds(j) = std::sqrt(ss / n);
  }
  return p;
}

Matrix scaler_transform(const ScalerParams& params, const Matrix& X) {
  if (X.cols() != params.means.size())
    throw ShapeError("scaler expects " + std::to_string(params.means.size()) + " columns, got " +
                     std::to_string(X.cols()));
  Matrix out(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (params.stds(j) == 0) {
      out.col(j).setZero();
    } else {
      out.col(j) = (X.col(j).array() - params.means(j)) / params.stds(j);
    }
  }
  return out;
}

}  // namespace ecovid::learn
