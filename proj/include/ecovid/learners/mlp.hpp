#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ecovid/learners/common.hpp"

namespace ecovid::learn {

enum class Activation { Relu, Tanh };

struct MlpParams {
  std::vector<std::size_t> hidden = {16};
  Activation activation = Activation::Relu;
  double eta = 0.01;
  std::size_t max_iter = 1000;
  double tol = 1e-12;  // stop when the loss improves by less than this
  std::uint64_t seed = 0;
};

/// Fully connected network with a single linear output unit.
struct MlpModel {
  std::vector<Matrix> weights;  // weights[l] is (out x in)
  std::vector<Vector> biases;
  Activation activation = Activation::Relu;
  std::vector<double> loss_history;
  std::size_t iterations = 0;

  std::size_t parameter_count() const;
  /// Layer-by-layer concatenation of (weights column-major, biases).
  Vector flatten() const;
  void unflatten(const Vector& params);
};

/// Glorot-uniform weights from `seed`, zero biases.
MlpModel mlp_init(std::size_t n_inputs, const MlpParams& params);

Vector mlp_predict(const MlpModel& model, const Matrix& X);

/// Mean squared error (1/n) sum (yhat - y)^2.
double mlp_loss(const MlpModel& model, const Matrix& X, const Vector& y);

struct LossGradient {
  double loss = 0;
  Vector gradient;  // same layout as MlpModel::flatten()
};

/// Loss and its gradient by backpropagation.
LossGradient mlp_loss_gradient(const MlpModel& model, const Matrix& X, const Vector& y);

/// Full-batch gradient descent: w <- w - eta * grad. Throws DivergenceError
/// naming the iteration if the loss becomes non-finite.
MlpModel mlp_fit(const Matrix& X, const Vector& y, const MlpParams& params);

}  // namespace ecovid::learn
