#include "ecovid/learners/ridge.hpp"

#include "ecovid/error.hpp"

namespace ecovid::learn {

RidgeModel ridge_fit_targets(const Matrix& X, const Vector& targets, double alpha) {
  if (!(alpha >= 0)) throw ParameterError("ridge alpha must be non-negative");
  if (X.rows() != targets.size()) throw ShapeError("ridge: X rows and target length differ");
  if (X.rows() == 0) throw EmptyError("ridge: no training rows");

  const Vector x_mean = X.colwise().mean().transpose();
  const double t_mean = targets.mean();
  const Matrix Xc = X.rowwise() - x_mean.transpose();
  const Vector tc = targets.array() - t_mean;

  Matrix A = Xc.transpose() * Xc;
  A.diagonal().array() += alpha;
  const Vector rhs = Xc.transpose() * tc;

  RidgeModel m;
  m.alpha = alpha;
  if (alpha > 0) {
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) throw SingularError("ridge: Cholesky factorization failed");
    m.weights = llt.solve(rhs);
  } else {
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) throw SingularError("ridge: X'X is singular and alpha is 0");
    m.weights = lu.solve(rhs);
  }
  m.intercept = t_mean - x_mean.dot(m.weights);
  return m;
}

RidgeModel ridge_fit(const Matrix& X, std::span<const int> labels, double alpha) {
  Vector t(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ParameterError("ridge classifier labels must be 0 or 1");
    t(static_cast<Eigen::Index>(i)) = labels[i] == 1 ? 1.0 : -1.0;
  }
  return ridge_fit_targets(X, t, alpha);
}

Vector ridge_decision(const RidgeModel& model, const Matrix& X) {
  if (X.cols() != model.weights.size()) throw ShapeError("ridge: feature count differs from fit");
  return (X * model.weights).array() + model.intercept;
}

std::vector<int> ridge_predict(const RidgeModel& model, const Matrix& X) {
  const Vector d = ridge_decision(model, X);
  std::vector<int> out(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) out[static_cast<std::size_t>(i)] = d(i) > 0 ? 1 : 0;
  return out;
}

}  // namespace ecovid::learn
