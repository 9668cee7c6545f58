#pragma once

#include <cstddef>

#include "ecovid/learners/common.hpp"

namespace ecovid::learn {

enum class KernelType { Linear, Rbf };

struct Kernel {
  KernelType type = KernelType::Rbf;
  double gamma = 0;  // rbf width; <= 0 means 1 / n_features at fit time

  double operator()(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) const;
};

struct SvrParams {
  double C = 1.0;
  double epsilon = 0.1;
  Kernel kernel;
  std::size_t max_sweeps = 20000;
  double tol = 1e-12;  // stop once a full sweep gains less than this
};

/// Solution of the epsilon-SVR dual in beta_i = alpha_i - alpha_i*.
struct SvrDual {
  Vector beta;
  double bias = 0;
  double objective = 0;
  std::size_t sweeps = 0;
};

struct SvrModel {
  Vector dual_coefs;       // beta_i of the support vectors, |beta_i| <= C
  Matrix support_vectors;  // one row per support vector
  double bias = 0;
  Kernel kernel;           // gamma resolved
  double C = 1.0;
  double epsilon = 0.1;
  std::size_t sweeps = 0;
};

/// Dual objective  y'beta - eps * sum|beta| - 0.5 beta' K beta.
double svr_dual_objective(const Matrix& K, const Vector& y, const Vector& beta, double epsilon);

/// Maximizes the dual subject to sum(beta) = 0 and |beta_i| <= C by exact
/// pairwise (SMO-style) line maximization. Throws KernelError when K is not
/// numerically positive semidefinite.
SvrDual svr_solve_dual(const Matrix& K, const Vector& y, const SvrParams& params);

Matrix gram_matrix(const Matrix& X, const Kernel& kernel);

SvrModel svr_fit(const Matrix& X, const Vector& y, const SvrParams& params);
Vector svr_predict(const SvrModel& model, const Matrix& X);

}  // namespace ecovid::learn
