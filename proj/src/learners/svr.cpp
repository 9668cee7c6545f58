#include "ecovid/learners/svr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ecovid/error.hpp"

namespace ecovid::learn {

namespace {

struct PairStep {
  double t = 0;
  double gain = 0;
};

/// Exact maximizer of the concave piecewise-quadratic
///   phi(t) = a t - 0.5 eta t^2 - eps (|bi + t| - |bi| + |bj - t| - |bj|)
/// over t in [lo, hi].
PairStep best_pair_step(double a, double eta, double eps, double bi, double bj, double lo, double hi) {
  auto phi = [&](double t) {
    return a * t - 0.5 * eta * t * t - eps * (std::abs(bi + t) - std::abs(bi) + std::abs(bj - t) - std::abs(bj));
  };
  std::array<double, 4> knots{lo, hi, std::clamp(-bi, lo, hi), std::clamp(bj, lo, hi)};
  std::sort(knots.begin(), knots.end());

  PairStep best;  // t = 0 is always feasible with zero gain
  auto consider = [&](double t) {
    const double g = phi(t);
    if (g > best.gain) best = {t, g};
  };
  for (double k : knots) consider(k);
  if (eta > 0) {
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
      const double a0 = knots[s], a1 = knots[s + 1];
      if (a1 <= a0) continue;
      const double mid = 0.5 * (a0 + a1);
      const double si = (bi + mid) > 0 ? 1.0 : -1.0;
      const double sj = (bj - mid) > 0 ? 1.0 : -1.0;
      const double t = (a - eps * (si - sj)) / eta;
      consider(std::clamp(t, a0, a1));
    }
  }
  return best;
}

void check_psd(const Matrix& K) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(K, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw KernelError("kernel matrix eigen-decomposition failed");
  const auto& ev = eig.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-8 * scale)
    throw KernelError("kernel matrix is not positive semidefinite (min eigenvalue " + std::to_string(ev.minCoeff()) +
                      ")");
}

double compute_bias(const Matrix& K, const Vector& y, const Vector& beta, double C, double eps) {
  const Vector g = K * beta;
  const Eigen::Index n = y.size();
  double free_sum = 0;
  std::size_t free_count = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  const double bound_tol = 1e-12 * std::max(1.0, C);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = y(i) - g(i);
    const double b = beta(i);
    if (b > 0 && b < C - bound_tol) {
      free_sum += r - eps;
      ++free_count;
    } else if (b < 0 && b > -C + bound_tol) {
      free_sum += r + eps;
      ++free_count;
    } else if (b == 0) {
      lower = std::max(lower, r - eps);
      upper = std::min(upper, r + eps);
    } else if (b > 0) {  // at +C: residual >= eps
      upper = std::min(upper, r - eps);
    } else {  // at -C: residual <= -eps
      lower = std::max(lower, r + eps);
    }
  }
  if (free_count > 0) return free_sum / static_cast<double>(free_count);
  if (std::isfinite(lower) && std::isfinite(upper)) return 0.5 * (lower + upper);
  if (std::isfinite(lower)) return lower;
  if (std::isfinite(upper)) return upper;
  return 0;
}

}  // namespace

double Kernel::operator()(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) const {
  if (type == KernelType::Linear) return a.dot(b);
  return std::exp(-gamma * (a - b).squaredNorm());
}

double svr_dual_objective(const Matrix& K, const Vector& y, const Vector& beta, double epsilon) {
  return y.dot(beta) - epsilon * beta.cwiseAbs().sum() - 0.5 * beta.dot(K * beta);
}

SvrDual svr_solve_dual(const Matrix& K, const Vector& y, const SvrParams& params) {
  if (!(params.C > 0)) throw ParameterError("SVR C must be positive");
  if (!(params.epsilon >= 0)) throw ParameterError("SVR epsilon must be non-negative");
  if (K.rows() != K.cols() || K.rows() != y.size()) throw ShapeError("SVR: Gram matrix and targets disagree");
  if (y.size() == 0) throw EmptyError("SVR: no training rows");
  check_psd(K);

  const Eigen::Index n = y.size();
  const double C = params.C, eps = params.epsilon;
  SvrDual out;
  out.beta = Vector::Zero(n);
  Vector grad = y;  // y - K beta

  for (std::size_t sweep = 0; sweep < params.max_sweeps; ++sweep) {
    double sweep_gain = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      PairStep best;
      Eigen::Index best_j = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double eta = K(i, i) + K(j, j) - 2 * K(i, j);
        const double bi = out.beta(i), bj = out.beta(j);
        const double lo = std::max(-C - bi, bj - C);
        const double hi = std::min(C - bi, bj + C);
        if (hi <= lo) continue;
        const auto step = best_pair_step(grad(i) - grad(j), std::max(eta, 0.0), eps, bi, bj, lo, hi);
        if (step.gain > best.gain) {
          best = step;
          best_j = j;
        }
      }
      if (best_j < 0 || best.t == 0) continue;
      const Eigen::Index j = best_j;
      out.beta(i) += best.t;
      out.beta(j) -= best.t;
      // Snap to the box and to zero to keep exact bound/zero states.
      for (Eigen::Index k : {i, j}) {
        if (std::abs(out.beta(k)) < 1e-15) out.beta(k) = 0;
        out.beta(k) = std::clamp(out.beta(k), -C, C);
      }
      grad -= best.t * (K.col(i) - K.col(j));
      sweep_gain += best.gain;
    }
    out.sweeps = sweep + 1;
    if (sweep_gain < params.tol) break;
  }
  out.bias = compute_bias(K, y, out.beta, C, eps);
  out.objective = svr_dual_objective(K, y, out.beta, eps);
  return out;
}

Matrix gram_matrix(const Matrix& X, const Kernel& kernel) {
  const Eigen::Index n = X.rows();
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      K(i, j) = kernel(X.row(i).transpose(), X.row(j).transpose());
      K(j, i) = K(i, j);
    }
  }
  return K;
}

SvrModel svr_fit(const Matrix& X, const Vector& y, const SvrParams& params) {
  if (X.rows() != y.size()) throw ShapeError("SVR: X rows and target length differ");
  SvrModel m;
  m.kernel = params.kernel;
  if (m.kernel.type == KernelType::Rbf && m.kernel.gamma <= 0)
    m.kernel.gamma = 1.0 / static_cast<double>(std::max<Eigen::Index>(1, X.cols()));
  m.C = params.C;
  m.epsilon = params.epsilon;
  const auto dual = svr_solve_dual(gram_matrix(X, m.kernel), y, params);
  m.bias = dual.bias;
  m.sweeps = dual.sweeps;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < dual.beta.size(); ++i) {
    if (dual.beta(i) != 0) sv.push_back(i);
  }
  m.dual_coefs.resize(static_cast<Eigen::Index>(sv.size()));
  m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
  for (std::size_t k = 0; k < sv.size(); ++k) {
    m.dual_coefs(static_cast<Eigen::Index>(k)) = dual.beta(sv[k]);
    m.support_vectors.row(static_cast<Eigen::Index>(k)) = X.row(sv[k]);
  }
  return m;
}

Vector svr_predict(const SvrModel& model, const Matrix& X) {
  if (model.support_vectors.rows() > 0 && X.cols() != model.support_vectors.cols())
    throw ShapeError("SVR: feature count differs from fit");
  Vector out(X.rows());
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    double f = model.bias;
    for (Eigen::Index k = 0; k < model.dual_coefs.size(); ++k)
      f += model.dual_coefs(k) * model.kernel(model.support_vectors.row(k).transpose(), X.row(r).transpose());
    out(r) = f;
  }
  return out;
}

}  // namespace ecovid::learn
