#include "ecovid/learners/mlp.hpp"

#include <cmath>

#include "ecovid/error.hpp"
#include "ecovid/rng.hpp"

namespace ecovid::learn {

namespace {

Matrix activate(const Matrix& z, Activation a) {
  if (a == Activation::Relu) return z.cwiseMax(0.0);
  return z.array().tanh().matrix();
}

/// Derivative expressed through the pre-activation z and activation h.
Matrix activate_grad(const Matrix& z, const Matrix& h, Activation a) {
  if (a == Activation::Relu) return (z.array() > 0).cast<double>().matrix();
  return (1.0 - h.array().square()).matrix();
}

struct ForwardPass {
  std::vector<Matrix> z;  // pre-activations per layer, (units x n)
  std::vector<Matrix> h;  // h[0] = input, h[l+1] = layer l output
};

ForwardPass forward(const MlpModel& m, const Matrix& X) {
  ForwardPass fp;
  fp.h.push_back(X.transpose());
  const std::size_t L = m.weights.size();
  for (std::size_t l = 0; l < L; ++l) {
    Matrix z = m.weights[l] * fp.h.back();
    z.colwise() += m.biases[l];
    fp.h.push_back(l + 1 == L ? z : activate(z, m.activation));
    fp.z.push_back(std::move(z));
  }
  return fp;
}

}  // namespace

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  return n;
}

Vector MlpModel::flatten() const {
  Vector out(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.segment(k, weights[l].size()) = weights[l].reshaped();
    k += weights[l].size();
    out.segment(k, biases[l].size()) = biases[l];
    k += biases[l].size();
  }
  return out;
}

void MlpModel::unflatten(const Vector& params) {
  if (static_cast<std::size_t>(params.size()) != parameter_count()) throw ShapeError("MLP parameter vector has wrong length");
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l].reshaped() = params.segment(k, weights[l].size());
    k += weights[l].size();
    biases[l] = params.segment(k, biases[l].size());
    k += biases[l].size();
  }
}

MlpModel mlp_init(std::size_t n_inputs, const MlpParams& params) {
  if (n_inputs == 0) throw ParameterError("MLP needs at least one input feature");
  std::vector<std::size_t> sizes{n_inputs};
  for (auto h : params.hidden) {
    if (h == 0) throw ParameterError("MLP hidden layers must have at least one unit");
    sizes.push_back(h);
  }
  sizes.push_back(1);

  MlpModel m;
  m.activation = params.activation;
  Rng rng(params.seed);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(sizes[l]);
    const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    Matrix W(out, in);
    for (Eigen::Index c = 0; c < in; ++c)
      for (Eigen::Index r = 0; r < out; ++r) W(r, c) = rng.uniform(-limit, limit);
    m.weights.push_back(std::move(W));
    m.biases.push_back(Vector::Zero(out));
  }
  return m;
}

Vector mlp_predict(const MlpModel& model, const Matrix& X) {
  if (model.weights.empty() || X.cols() != model.weights.front().cols()) throw ShapeError("MLP: feature count differs from fit");
  return forward(model, X).h.back().row(0).transpose();
}

double mlp_loss(const MlpModel& model, const Matrix& X, const Vector& y) {
  const Vector r = mlp_predict(model, X) - y;
  return r.squaredNorm() / static_cast<double>(y.size());
}

LossGradient mlp_loss_gradient(const MlpModel& model, const Matrix& X, const Vector& y) {
  if (X.rows() != y.size()) throw ShapeError("MLP: X rows and target length differ");
  if (y.size() == 0) throw EmptyError("MLP: no training rows");
  const auto fp = forward(model, X);
  const double n = static_cast<double>(y.size());
  const Vector resid = fp.h.back().row(0).transpose() - y;

  LossGradient out;
  out.loss = resid.squaredNorm() / n;

  const std::size_t L = model.weights.size();
  std::vector<Matrix> gW(L);
  std::vector<Vector> gb(L);
  Matrix delta = (2.0 / n) * resid.transpose();  // (1 x n)
  for (std::size_t l = L; l-- > 0;) {
    gW[l] = delta * fp.h[l].transpose();
    gb[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (model.weights[l].transpose() * delta).cwiseProduct(activate_grad(fp.z[l - 1], fp.h[l], model.activation));
    }
  }
  out.gradient.resize(static_cast<Eigen::Index>(model.parameter_count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < L; ++l) {
    out.gradient.segment(k, gW[l].size()) = gW[l].reshaped();
    k += gW[l].size();
    out.gradient.segment(k, gb[l].size()) = gb[l];
    k += gb[l].size();
  }
  return out;
}

MlpModel mlp_fit(const Matrix& X, const Vector& y, const MlpParams& params) {
  if (!(params.eta > 0)) throw ParameterError("MLP learning rate must be positive");
  if (X.rows() != y.size()) throw ShapeError("MLP: X rows and target length differ");
  auto model = mlp_init(static_cast<std::size_t>(X.cols()), params);
  Vector theta = model.flatten();
  for (std::size_t it = 0; it < params.max_iter; ++it) {
    const auto lg = mlp_loss_gradient(model, X, y);
    if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) throw DivergenceError(it, "MLP loss is not finite");
    model.loss_history.push_back(lg.loss);
    model.iterations = it;
    if (it > 0 && std::abs(model.loss_history[it - 1] - lg.loss) < params.tol) break;
    theta -= params.eta * lg.gradient;
    model.unflatten(theta);
    model.iterations = it + 1;
  }
  const double final_loss = mlp_loss(model, X, y);
  if (!std::isfinite(final_loss)) throw DivergenceError(model.iterations, "MLP loss is not finite");
  return model;
}

}  // namespace ecovid::learn
