#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "csm/features.hpp"
#include "csm/lambdamart.hpp"
#include "csm/nn.hpp"

namespace csm {

enum class ModelKind {
  kRandom,
  kJt,
  kBaz,
  kMlp,
  kRankNet,
  kLambdaMart,
  kListNet,
  kListMle,
};

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Heuristic kinds score raw features directly; learned kinds carry trained
/// parameters and expect cross-sectionally standardized inputs.
inline bool is_heuristic(ModelKind k) {
  return k == ModelKind::kRandom || k == ModelKind::kJt || k == ModelKind::kBaz;
}
inline bool is_neural(ModelKind k) {
  return k == ModelKind::kMlp || k == ModelKind::kRankNet ||
         k == ModelKind::kListNet || k == ModelKind::kListMle;
}

/// A trained (or heuristic) scorer: which kind, its parameters, and whether
/// it expects standardized feature rows.
struct ScoreModel {
  ModelKind kind = ModelKind::kRandom;
  MlpSpec mlp_spec;
  MlpParams mlp;
  TreeEnsemble ensemble;
  uint64_t random_seed = 0;
  bool standardized_inputs = false;
  std::string metadata_json;  // hyperparameters + training history

  static ScoreModel heuristic(ModelKind kind, uint64_t random_seed = 0);
};

/// Uniform scores, deterministic per (seed, rebalance date), one draw per
/// row in asset order.
Eigen::VectorXd score_random(int n, uint64_t seed, const Date& rebalance_date);

/// Raw 252-day cumulative return column (the classical momentum score).
Eigen::VectorXd score_jt(const FeatureGroup& group);

/// The composite MACD column passed through unchanged.
Eigen::VectorXd score_baz(const FeatureGroup& group);

/// Dispatches on model kind. Throws if the group's standardization does not
/// match what the model was trained on.
Eigen::VectorXd score(const ScoreModel& model, const FeatureGroup& group);

/// Versioned JSON checkpoint (spec, parameters, seed, metadata).
void save_checkpoint(const ScoreModel& model, const std::string& path);
ScoreModel load_checkpoint(const std::string& path);
std::string checkpoint_to_json(const ScoreModel& model);
ScoreModel checkpoint_from_json(const std::string& text);

}  // namespace csm
