#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ecovid/learners/forest.hpp"
#include "ecovid/learners/mlp.hpp"
#include "ecovid/learners/ridge.hpp"
#include "ecovid/learners/scaler.hpp"
#include "ecovid/learners/svr.hpp"

namespace ecovid::learn {

/// A fitted learner together with its input scaler and (for regressors
/// trained on standardized targets) the target scaling to undo.
struct TrainedModel {
  std::variant<RidgeModel, SvrModel, ForestModel, MlpModel> model;
  ScalerParams scaler;
  double target_mean = 0;
  double target_std = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  nlohmann::json hyperparameters = nlohmann::json::object();

  /// "ridge", "svr", "forest" or "mlp".
  std::string model_type() const;
};

/// Raw (unscaled) features in, model output out: ridge returns decision
/// values, regressors return predictions in target units.
Vector predict(const TrainedModel& model, const Matrix& X_raw);

/// {model_type, hyperparameters, parameters, seed, feature_names}.
nlohmann::json to_json(const TrainedModel& model);
TrainedModel trained_model_from_json(const nlohmann::json& doc);

}  // namespace ecovid::learn
