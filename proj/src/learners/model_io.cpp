#include "ecovid/learners/model_io.hpp"

#include "ecovid/error.hpp"

namespace ecovid::learn {

using nlohmann::json;

namespace {

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix mat_from(const json& j) {
  Matrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto& data = j.at("data");
  for (Eigen::Index r = 0; r < m.rows(); ++r) m.row(r) = vec_from(data.at(static_cast<std::size_t>(r))).transpose();
  return m;
}

std::string kernel_name(KernelType t) { return t == KernelType::Linear ? "linear" : "rbf"; }

KernelType kernel_from(const std::string& s) {
  if (s == "linear") return KernelType::Linear;
  if (s == "rbf") return KernelType::Rbf;
  throw SchemaError(0, "unknown kernel '" + s + "'");
}

std::string activation_name(Activation a) { return a == Activation::Relu ? "relu" : "tanh"; }

Activation activation_from(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  throw SchemaError(0, "unknown activation '" + s + "'");
}

json params_json(const RidgeModel& m) {
  return {{"weights", vec_json(m.weights)}, {"intercept", m.intercept}, {"alpha", m.alpha}};
}

json params_json(const SvrModel& m) {
  return {{"dual_coefs", vec_json(m.dual_coefs)},
          {"support_vectors", mat_json(m.support_vectors)},
          {"bias", m.bias},
          {"kernel", kernel_name(m.kernel.type)},
          {"gamma", m.kernel.gamma},
          {"C", m.C},
          {"epsilon", m.epsilon}};
}

json params_json(const ForestModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.value, n.left, n.right, n.samples});
    trees.push_back(std::move(nodes));
  }
  return {{"n_features", m.n_features},
          {"n_trees", m.params.n_trees},
          {"mtry", m.params.mtry},
          {"max_depth", m.params.max_depth},
          {"min_leaf", m.params.min_leaf},
          {"bootstrap", m.params.bootstrap},
          {"seed", m.params.seed},
          {"trees", trees}};
}

json params_json(const MlpModel& m) {
  json layers = json::array();
  for (std::size_t l = 0; l < m.weights.size(); ++l)
    layers.push_back({{"weights", mat_json(m.weights[l])}, {"biases", vec_json(m.biases[l])}});
  return {{"activation", activation_name(m.activation)}, {"layers", layers}, {"iterations", m.iterations}};
}

RidgeModel ridge_from(const json& p) {
  RidgeModel m;
  m.weights = vec_from(p.at("weights"));
  m.intercept = p.at("intercept").get<double>();
  m.alpha = p.at("alpha").get<double>();
  return m;
}

SvrModel svr_from(const json& p) {
  SvrModel m;
  m.dual_coefs = vec_from(p.at("dual_coefs"));
  m.support_vectors = mat_from(p.at("support_vectors"));
  m.bias = p.at("bias").get<double>();
  m.kernel.type = kernel_from(p.at("kernel").get<std::string>());
  m.kernel.gamma = p.at("gamma").get<double>();
  m.C = p.at("C").get<double>();
  m.epsilon = p.at("epsilon").get<double>();
  return m;
}

ForestModel forest_from(const json& p) {
  ForestModel m;
  m.n_features = p.at("n_features").get<std::size_t>();
  m.params.n_trees = p.at("n_trees").get<std::size_t>();
  m.params.mtry = p.at("mtry").get<std::size_t>();
  m.params.max_depth = p.at("max_depth").get<std::size_t>();
  m.params.min_leaf = p.at("min_leaf").get<std::size_t>();
  m.params.bootstrap = p.at("bootstrap").get<bool>();
  m.params.seed = p.at("seed").get<std::uint64_t>();
  for (const auto& t : p.at("trees")) {
    RegressionTree tree;
    for (const auto& n : t) {
      TreeNode node;
      node.feature = n.at(0).get<int>();
      node.threshold = n.at(1).get<double>();
      node.value = n.at(2).get<double>();
      node.left = n.at(3).get<int>();
      node.right = n.at(4).get<int>();
      node.samples = n.at(5).get<std::size_t>();
      tree.nodes.push_back(node);
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

MlpModel mlp_from(const json& p) {
  MlpModel m;
  m.activation = activation_from(p.at("activation").get<std::string>());
  m.iterations = p.at("iterations").get<std::size_t>();
  for (const auto& layer : p.at("layers")) {
    m.weights.push_back(mat_from(layer.at("weights")));
    m.biases.push_back(vec_from(layer.at("biases")));
  }
  return m;
}

}  // namespace

std::string TrainedModel::model_type() const {
  static constexpr const char* kNames[] = {"ridge", "svr", "forest", "mlp"};
  return kNames[model.index()];
}

Vector predict(const TrainedModel& m, const Matrix& X_raw) {
  const Matrix X = scaler_transform(m.scaler, X_raw);
  Vector out = std::visit(
      [&](const auto& inner) -> Vector {
        using T = std::decay_t<decltype(inner)>;
        if constexpr (std::is_same_v<T, RidgeModel>) return ridge_decision(inner, X);
        else if constexpr (std::is_same_v<T, SvrModel>) return svr_predict(inner, X);
        else if constexpr (std::is_same_v<T, ForestModel>) return forest_predict(inner, X);
        else return mlp_predict(inner, X);
      },
      m.model);
  return (out.array() * m.target_std + m.target_mean).matrix();
}

json to_json(const TrainedModel& m) {
  json params = std::visit([](const auto& inner) { return params_json(inner); }, m.model);
  params["scaler"] = {{"means", vec_json(m.scaler.means)}, {"stds", vec_json(m.scaler.stds)}};
  params["target_mean"] = m.target_mean;
  params["target_std"] = m.target_std;
  return {{"model_type", m.model_type()},
          {"hyperparameters", m.hyperparameters},
          {"parameters", params},
          {"seed", m.seed},
          {"feature_names", m.feature_names}};
}

TrainedModel trained_model_from_json(const json& doc) {
  try {
    TrainedModel m;
    const auto type = doc.at("model_type").get<std::string>();
    const auto& p = doc.at("parameters");
    if (type == "ridge") m.model = ridge_from(p);
    else if (type == "svr") m.model = svr_from(p);
    else if (type == "forest") m.model = forest_from(p);
    else if (type == "mlp") m.model = mlp_from(p);
    else throw SchemaError(0, "unknown model_type '" + type + "'");
    m.scaler.means = vec_from(p.at("scaler").at("means"));
    m.scaler.stds = vec_from(p.at("scaler").at("stds"));
    m.target_mean = p.at("target_mean").get<double>();
    m.target_std = p.at("target_std").get<double>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    m.hyperparameters = doc.at("hyperparameters");
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(0, std::string("malformed model document: ") + e.what());
  }
}

}  // namespace ecovid::learn
